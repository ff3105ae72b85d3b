"""Benchmark schemes: joint design plus the three reduced baselines.

* ``jtp``: joint trajectory and power design (the full BCD driver).
* ``tnp``: trajectory design only, both powers pinned to their averages.
* ``ltp``: power control only on the pre-determined visit-the-eavesdropper
  path built by :func:`build_ltp_trajectory`.
* ``nj``: no jamming; closed-form source power control on the straight line
  (the trajectory is irrelevant and only kept for reporting).
"""

from __future__ import annotations

import enum
import math
import time
import warnings

import numpy as np

from .driver import (BcdConfig, assemble_solution, bcd_optimize,
                     fractional_increase, initial_schedule)
from .model import (PowerSchedule, Scenario, Solution, SolverError, Trajectory,
                    uniform_line_trajectory)
from .objective import surrogate_objective
from .source_power import p3_coefficients, solve_p3
from .trajectory import p7_coefficients, solve_p7
from .uav_power import p5_coefficients, solve_p5


class SchemeId(enum.Enum):
    JTP = "jtp"
    TNP = "tnp"
    LTP = "ltp"
    NJ = "nj"


def _slots_needed(dist: float, l_max: float) -> int:
    if dist <= 1e-12:
        return 0
    return int(math.ceil(dist / l_max - 1e-12))


def _max_speed_leg(start: np.ndarray, end: np.ndarray, alloc: int,
                   l_max: float) -> np.ndarray:
    """Waypoints after ``start``: wait out extra slots, then max-speed steps.

    The last step is shorter when the leg length is not a multiple of L, so
    the leg lands exactly on ``end`` at its final slot.
    """
    dist = float(np.linalg.norm(end - start))
    needed = _slots_needed(dist, l_max)
    if needed > alloc:
        raise SolverError(f"leg needs {needed} slots but only {alloc} allocated")
    if needed == 0:
        return np.tile(end, (alloc, 1))
    direction = (end - start) / dist
    travelled = np.minimum(np.arange(1, needed + 1) * l_max, dist)
    points = start[None, :] + travelled[:, None] * direction[None, :]
    if alloc > needed:
        points = np.vstack([np.tile(start, (alloc - needed, 1)), points])
    return points


def _best_turn_point(s: Scenario) -> float:
    """Farthest progress along q0 -> w_e keeping qf reachable in time.

    For each candidate slot count ``k`` spent on the first leg, the set of
    progress values whose remaining distance fits in ``(N - k)`` slots is an
    interval (the sublevel set of the convex distance-to-qf function), so
    scanning k and intersecting with ``s <= k L`` finds the exact maximum.
    The discrete feasibility predicate is not monotone along the segment,
    which rules out a plain bisection.
    """
    l_max = s.l_max
    d1 = float(np.linalg.norm(s.w_e - s.q0))
    if d1 <= 1e-12:
        return 0.0
    u1 = (s.w_e - s.q0) / d1
    w = s.qf - s.q0
    beta = float(np.dot(u1, w))
    base_sq = float(np.dot(w, w))
    best = 0.0
    for k in range(s.n_slots + 1):
        reach = (s.n_slots - k) * l_max
        disc = beta * beta - base_sq + reach * reach
        if disc < 0.0:
            continue
        root = math.sqrt(disc)
        cand = min(k * l_max, d1, beta + root)
        if cand >= max(0.0, beta - root) - 1e-9 and cand > best:
            best = cand
    return best


def build_ltp_trajectory(s: Scenario) -> Trajectory:
    """Pre-determined path: fly to above the eavesdropper, hover, leave late.

    When the round trip does not fit in the mission, the path degenerates to
    two maximal-speed segments turning at the farthest reachable point of
    the q0 -> w_e segment (the straight line when there is no slack at all).
    """
    l_max = s.l_max
    n = s.n_slots
    d1 = float(np.linalg.norm(s.w_e - s.q0))
    n1 = _slots_needed(d1, l_max)
    n2 = _slots_needed(float(np.linalg.norm(s.qf - s.w_e)), l_max)
    if n1 + n2 <= n:
        leg_in = _max_speed_leg(s.q0, s.w_e, n1, l_max)
        hover = np.tile(s.w_e, (n - n1 - n2, 1))
        leg_out = _max_speed_leg(s.w_e, s.qf, n2, l_max)
        return Trajectory(np.vstack([leg_in, hover, leg_out]))
    progress = _best_turn_point(s)
    turn = s.q0 + progress * (s.w_e - s.q0) / d1
    k = _slots_needed(progress, l_max)
    leg_in = _max_speed_leg(s.q0, turn, k, l_max)
    leg_out = _max_speed_leg(turn, s.qf, n - k, l_max)
    return Trajectory(np.vstack([leg_in, leg_out]))


def run_jtp(s: Scenario, cfg: BcdConfig | None = None, trace_hook=None) -> Solution:
    return bcd_optimize(s, cfg, trace_hook)


def run_tnp(s: Scenario, cfg: BcdConfig | None = None, trace_hook=None) -> Solution:
    """Trajectory-only design: powers stay at their average values."""
    if cfg is None:
        cfg = BcdConfig(epsilon=s.epsilon)
    trajectory = build_ltp_trajectory(s) \
        if cfg.init_trajectory_mode == "best_effort_ltp" else uniform_line_trajectory(s)
    schedule = initial_schedule(s)
    previous = surrogate_objective(s, trajectory, schedule, validate=False)
    trace = []
    started = time.perf_counter()
    stopped = False
    for sweep in range(1, cfg.max_iters + 1):
        try:
            trajectory = solve_p7(s, p7_coefficients(s, trajectory, schedule), trajectory)
        except Exception as exc:
            raise SolverError(f"sweep {sweep}: trajectory update failed: {exc}") from exc
        current = surrogate_objective(s, trajectory, schedule)
        trace.append(current)
        if trace_hook is not None:
            trace_hook(sweep, current, time.perf_counter() - started)
        if fractional_increase(previous, current) < cfg.epsilon:
            stopped = True
            break
        previous = current
    if not stopped:
        warnings.warn(
            f"trajectory-only loop hit max_iters = {cfg.max_iters}", RuntimeWarning)
    return assemble_solution(s, trajectory, schedule, trace)


def run_ltp(s: Scenario, cfg: BcdConfig | None = None, trace_hook=None) -> Solution:
    """Power control only, on the pre-determined visit-the-eavesdropper path."""
    if cfg is None:
        cfg = BcdConfig(epsilon=s.epsilon)
    trajectory = build_ltp_trajectory(s)
    schedule = initial_schedule(s)
    previous = surrogate_objective(s, trajectory, schedule, validate=False)
    trace = []
    started = time.perf_counter()
    stopped = False
    for sweep in range(1, cfg.max_iters + 1):
        try:
            p_s, _ = solve_p3(s, p3_coefficients(s, trajectory, schedule.p_u))
            p_u = schedule.p_u
            for _ in range(cfg.inner_sca_steps):
                p_u, _ = solve_p5(s, p5_coefficients(s, trajectory, p_s, p_u))
            schedule = PowerSchedule(p_s=p_s, p_u=p_u)
        except Exception as exc:
            raise SolverError(f"sweep {sweep}: power update failed: {exc}") from exc
        current = surrogate_objective(s, trajectory, schedule)
        trace.append(current)
        if trace_hook is not None:
            trace_hook(sweep, current, time.perf_counter() - started)
        if fractional_increase(previous, current) < cfg.epsilon:
            stopped = True
            break
        previous = current
    if not stopped:
        warnings.warn(
            f"power-only loop hit max_iters = {cfg.max_iters}", RuntimeWarning)
    return assemble_solution(s, trajectory, schedule, trace)


def run_nj(s: Scenario, trace_hook=None) -> Solution:
    """No jamming: zero p_u, closed-form p_s, objective independent of T."""
    trajectory = uniform_line_trajectory(s)
    p_u = np.zeros(s.n_slots)
    started = time.perf_counter()
    p_s, _ = solve_p3(s, p3_coefficients(s, trajectory, p_u))
    schedule = PowerSchedule(p_s=p_s, p_u=p_u)
    objective = surrogate_objective(s, trajectory, schedule)
    if trace_hook is not None:
        trace_hook(1, objective, time.perf_counter() - started)
    return assemble_solution(s, trajectory, schedule, (objective,))


def run_scheme(scheme: SchemeId, s: Scenario, cfg: BcdConfig | None = None,
               trace_hook=None) -> Solution:
    scheme = SchemeId(scheme)
    if scheme is SchemeId.JTP:
        return run_jtp(s, cfg, trace_hook)
    if scheme is SchemeId.TNP:
        return run_tnp(s, cfg, trace_hook)
    if scheme is SchemeId.LTP:
        return run_ltp(s, cfg, trace_hook)
    return run_nj(s, trace_hook)
