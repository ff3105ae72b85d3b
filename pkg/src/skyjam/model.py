"""Problem instances, value types, unit conversions and feasibility checks.

Geometry convention: all ground terminals live in the z = 0 plane and are
given as 2-D coordinates in meters.  The jammer flies at a fixed altitude
``H`` above that plane, so the squared jammer-to-terminal distance is
``||q - w||^2 + H^2``.  Time is discretized into ``n_slots`` equal slots of
length ``dt = period_t / n_slots``; the per-slot displacement bound is
``l_max = v_max * dt``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

# Relative tolerance used by every feasibility verdict in this package.
FEAS_RTOL = 1e-9


class ScenarioError(ValueError):
    """A scenario config is missing keys or describes an impossible instance."""


class SolverError(RuntimeError):
    """An optimizer failed or produced an infeasible iterate."""


# ---------------------------------------------------------------------------
# unit conversions (all internal computation is linear: watts / power ratios)
# ---------------------------------------------------------------------------


def db_to_linear(db: float) -> float:
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * np.log10(np.asarray(x, dtype=float))


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((np.asarray(dbm, dtype=float) - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    return 10.0 * np.log10(np.asarray(watts, dtype=float)) + 30.0


def _frozen_point(value, field: str) -> np.ndarray:
    arr = np.array(value, dtype=float)
    if arr.shape != (2,):
        raise ScenarioError(f"{field}: expected a 2-D point, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ScenarioError(f"{field}: coordinates must be finite, got {arr}")
    arr.setflags(write=False)
    return arr


def _require_positive(value: float, field: str) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ScenarioError(f"{field}: must be a positive finite number, got {value}")
    return value


@dataclass(frozen=True)
class Scenario:
    """One problem instance: geometry, channel constants and power budgets.

    Power fields are linear watts and ``gamma0`` is the linear
    noise-normalized reference channel gain; use :func:`build_scenario` to
    construct an instance from the dB / dBm config representation.
    """

    w_s: np.ndarray          # source position, meters
    w_d: np.ndarray          # destination position
    w_e: np.ndarray          # eavesdropper position
    q0: np.ndarray           # jammer start (projected on ground plane)
    qf: np.ndarray           # jammer final position
    altitude_h: float        # flight altitude H, meters
    v_max: float             # max speed, m/s
    period_t: float          # mission duration T, seconds
    n_slots: int             # number of time slots N
    gamma0: float            # reference gain at 1 m over noise power, linear
    pathloss_exp: float      # ground-link path loss exponent phi
    p_s_avg: float           # source average power budget, watts
    p_s_peak: float          # source peak power, watts
    p_u_avg: float           # jammer average power budget, watts
    p_u_peak: float          # jammer peak power, watts
    epsilon: float           # fractional-increase stopping threshold

    def __post_init__(self):
        for field in ("w_s", "w_d", "w_e", "q0", "qf"):
            object.__setattr__(self, field, _frozen_point(getattr(self, field), field))
        for field in ("altitude_h", "v_max", "period_t", "gamma0", "epsilon"):
            object.__setattr__(self, field, _require_positive(getattr(self, field), field))
        n = int(self.n_slots)
        if n < 1:
            raise ScenarioError(f"n_slots: must be >= 1, got {self.n_slots}")
        object.__setattr__(self, "n_slots", n)
        if not math.isfinite(self.pathloss_exp) or self.pathloss_exp < 2.0:
            raise ScenarioError(f"pathloss_exp: must be >= 2, got {self.pathloss_exp}")
        for field in ("p_s_avg", "p_s_peak", "p_u_avg", "p_u_peak"):
            value = float(getattr(self, field))
            if not math.isfinite(value) or value < 0.0:
                raise ScenarioError(f"{field}: must be non-negative and finite, got {value}")
            object.__setattr__(self, field, value)
        if self.p_s_avg > self.p_s_peak:
            raise ScenarioError("p_s_avg: average source power exceeds p_s_peak")
        if self.p_u_avg > self.p_u_peak:
            raise ScenarioError("p_u_avg: average jammer power exceeds p_u_peak")
        # The final point must be reachable within the mission: ||qf-q0|| <= N*L.
        reach = self.n_slots * self.l_max
        dist = float(np.linalg.norm(self.qf - self.q0))
        if dist > reach * (1.0 + FEAS_RTOL):
            raise ScenarioError(
                f"qf: unreachable, ||qf-q0|| = {dist:.6g} m exceeds "
                f"n_slots * v_max * dt = {reach:.6g} m"
            )

    @property
    def dt(self) -> float:
        """Slot length in seconds."""
        return self.period_t / self.n_slots

    @property
    def l_max(self) -> float:
        """Per-slot displacement bound L = v_max * dt, meters."""
        return self.v_max * self.dt

    @property
    def d_sd(self) -> float:
        """Source-destination ground distance."""
        return float(np.linalg.norm(self.w_s - self.w_d))

    @property
    def d_se(self) -> float:
        """Source-eavesdropper ground distance."""
        return float(np.linalg.norm(self.w_s - self.w_e))


_REQUIRED_KEYS = (
    "ws", "wd", "we", "q0", "qf", "H", "V", "T",
    "gamma0_db", "pathloss_exp",
    "ps_avg_dbm", "ps_peak_dbm", "pu_avg_dbm", "pu_peak_dbm",
    "epsilon",
)


def _resolve_n_slots(config: dict, period_t: float) -> int:
    """Work out N from the ``dt_or_N`` config entry.

    Accepted forms: a JSON integer (slot count N), a JSON float (slot length
    dt in seconds), or an object ``{"N": k}`` / ``{"dt": x}``.  When absent,
    dt defaults to 1 s.  A requested dt that does not divide T evenly is
    rounded to the nearest slot count.
    """
    raw = config.get("dt_or_N", 1.0)
    if isinstance(raw, dict):
        if set(raw) == {"N"}:
            raw = int(raw["N"])
        elif set(raw) == {"dt"}:
            raw = float(raw["dt"])
        else:
            raise ScenarioError(f"dt_or_N: expected {{'N': ...}} or {{'dt': ...}}, got {raw}")
    if isinstance(raw, bool):
        raise ScenarioError(f"dt_or_N: expected a number, got {raw}")
    if isinstance(raw, int):
        return raw
    dt = float(raw)
    if not math.isfinite(dt) or dt <= 0.0:
        raise ScenarioError(f"dt_or_N: slot length must be positive, got {dt}")
    return max(1, int(round(period_t / dt)))


def build_scenario(config: dict) -> Scenario:
    """Build a :class:`Scenario` from a config mapping with dB/dBm units.

    Raises :class:`ScenarioError` naming the offending key on missing or
    invalid entries.
    """
    missing = [key for key in _REQUIRED_KEYS if key not in config]
    if missing:
        raise ScenarioError(f"missing config key(s): {', '.join(missing)}")
    for key in ("gamma0_db", "ps_avg_dbm", "ps_peak_dbm", "pu_avg_dbm", "pu_peak_dbm"):
        if not math.isfinite(float(config[key])):
            raise ScenarioError(f"{key}: must be finite, got {config[key]}")
    period_t = _require_positive(config["T"], "T")
    return Scenario(
        w_s=config["ws"],
        w_d=config["wd"],
        w_e=config["we"],
        q0=config["q0"],
        qf=config["qf"],
        altitude_h=config["H"],
        v_max=config["V"],
        period_t=period_t,
        n_slots=_resolve_n_slots(config, period_t),
        gamma0=float(db_to_linear(config["gamma0_db"])),
        pathloss_exp=float(config["pathloss_exp"]),
        p_s_avg=float(dbm_to_watts(config["ps_avg_dbm"])),
        p_s_peak=float(dbm_to_watts(config["ps_peak_dbm"])),
        p_u_avg=float(dbm_to_watts(config["pu_avg_dbm"])),
        p_u_peak=float(dbm_to_watts(config["pu_peak_dbm"])),
        epsilon=float(config["epsilon"]),
    )


def read_config(path) -> dict:
    """Load a scenario config JSON file into a plain dict."""
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def default_scenario_path() -> Path:
    """Path of the bundled benchmark scenario config."""
    return Path(resources.files("skyjam").joinpath("data/default_scenario.json"))


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------


def _frozen_array(value, name: str, ndim: int) -> np.ndarray:
    arr = np.array(value, dtype=float)
    if arr.ndim != ndim:
        raise ValueError(f"{name}: expected {ndim}-D array, got shape {arr.shape}")
    if arr.shape[0] < 1:
        raise ValueError(f"{name}: must contain at least one slot")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Trajectory:
    """Waypoints q[n] for slots n = 1..N, meters, shape (N, 2)."""

    q: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.q, "q", 2)
        if arr.shape[1] != 2:
            raise ValueError(f"q: waypoints must be 2-D points, got shape {arr.shape}")
        object.__setattr__(self, "q", arr)

    def __len__(self) -> int:
        return self.q.shape[0]


@dataclass(frozen=True)
class PowerSchedule:
    """Per-slot source and jammer transmit powers in watts, each shape (N,)."""

    p_s: np.ndarray
    p_u: np.ndarray

    def __post_init__(self):
        p_s = _frozen_array(self.p_s, "p_s", 1)
        p_u = _frozen_array(self.p_u, "p_u", 1)
        if p_s.shape != p_u.shape:
            raise ValueError(f"p_s/p_u length mismatch: {p_s.shape} vs {p_u.shape}")
        object.__setattr__(self, "p_s", p_s)
        object.__setattr__(self, "p_u", p_u)

    def __len__(self) -> int:
        return self.p_s.shape[0]


@dataclass(frozen=True)
class Violation:
    """One violated constraint: name, slot index (-1 for aggregates), excess."""

    constraint: str
    index: int
    magnitude: float


@dataclass(frozen=True)
class FeasibilityVerdict:
    violations: tuple

    @property
    def feasible(self) -> bool:
        return len(self.violations) == 0

    @property
    def worst(self):
        if not self.violations:
            return None
        return max(self.violations, key=lambda v: v.magnitude)


@dataclass(frozen=True)
class Solution:
    """Optimizer output: trajectory, powers, objective and iteration trace."""

    trajectory: Trajectory
    schedule: PowerSchedule
    objective: float
    per_slot_rates: np.ndarray   # (N, 2): destination lower bound, eve upper bound
    trace: tuple                 # per-sweep surrogate objective values

    def __post_init__(self):
        rates = _frozen_array(self.per_slot_rates, "per_slot_rates", 2)
        object.__setattr__(self, "per_slot_rates", rates)
        object.__setattr__(self, "objective", float(self.objective))
        object.__setattr__(self, "trace", tuple(float(v) for v in self.trace))


# ---------------------------------------------------------------------------
# feasibility checks
# ---------------------------------------------------------------------------


def check_trajectory(s: Scenario, t: Trajectory) -> FeasibilityVerdict:
    """Verdict on the mobility constraints: steps <= L and q[N] = qf.

    Step ``n`` (1-based, n = 1 is q0 -> q[1]) is violated when its squared
    length exceeds ``l_max**2 * (1 + FEAS_RTOL)``; the magnitude reported is
    the squared-length excess.  The final-point constraint uses an absolute
    distance tolerance of ``FEAS_RTOL * max(1, l_max)`` meters.
    """
    if len(t) != s.n_slots:
        raise ValueError(f"trajectory has {len(t)} slots, scenario expects {s.n_slots}")
    ext = np.vstack([s.q0[None, :], t.q])
    step_sq = np.sum(np.diff(ext, axis=0) ** 2, axis=1)
    limit = s.l_max ** 2
    violations = [
        Violation("step", int(n) + 1, float(step_sq[n] - limit))
        for n in np.nonzero(step_sq > limit * (1.0 + FEAS_RTOL))[0]
    ]
    final_miss = float(np.linalg.norm(t.q[-1] - s.qf))
    if final_miss > FEAS_RTOL * max(1.0, s.l_max):
        violations.append(Violation("final_point", s.n_slots, final_miss))
    return FeasibilityVerdict(tuple(violations))


def check_schedule(s: Scenario, p: PowerSchedule) -> FeasibilityVerdict:
    """Verdict on per-slot peak, non-negativity and average power budgets."""
    if len(p) != s.n_slots:
        raise ValueError(f"schedule has {len(p)} slots, scenario expects {s.n_slots}")
    violations = []
    budgets = (
        ("p_s", p.p_s, s.p_s_peak, s.p_s_avg),
        ("p_u", p.p_u, s.p_u_peak, s.p_u_avg),
    )
    for name, arr, peak, avg in budgets:
        atol = FEAS_RTOL * max(peak, 1e-12)
        for n in np.nonzero(arr < -atol)[0]:
            violations.append(Violation(f"{name}_nonneg", int(n) + 1, float(-arr[n])))
        for n in np.nonzero(arr > peak + atol)[0]:
            violations.append(Violation(f"{name}_peak", int(n) + 1, float(arr[n] - peak)))
        mean = float(arr.mean())
        if mean > avg + FEAS_RTOL * max(avg, 1e-12):
            violations.append(Violation(f"{name}_avg", -1, mean - avg))
    return FeasibilityVerdict(tuple(violations))


def uniform_line_trajectory(s: Scenario) -> Trajectory:
    """Uniformly spaced straight line from q0 to qf, feasible by reachability."""
    frac = np.arange(1, s.n_slots + 1, dtype=float)[:, None] / s.n_slots
    return Trajectory(s.q0[None, :] + frac * (s.qf - s.q0)[None, :])
