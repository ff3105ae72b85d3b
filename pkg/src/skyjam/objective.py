"""Surrogate objective and Monte-Carlo secrecy-rate estimation.

The optimizer maximizes the tractable surrogate

    (1/N) * sum_n ( rate_lb_dest[n] - rate_ub_eve[n] )

while the physically meaningful quantity is the ergodic secrecy rate
``(1/N) * sum_n [E(R_D[n]) - E(R_E[n])]^+`` with the expectation over the
Rayleigh (exponential-power) ground fading.  :func:`mc_secrecy_rate`
estimates the latter by Monte Carlo with one independent counter-based
substream per (slot, terminal), so estimates are reproducible bit-for-bit
for a given seed regardless of slot evaluation order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .channel import LN2, rate_lb_dest, rate_ub_eve, uav_gain
from .model import PowerSchedule, Scenario, Trajectory, check_schedule, check_trajectory


def per_slot_bound_rates(s: Scenario, t: Trajectory, p: PowerSchedule):
    """Vectors (rate_lb_dest[n], rate_ub_eve[n]) for n = 1..N."""
    lo = rate_lb_dest(s, t.q, p.p_s, p.p_u)
    up = rate_ub_eve(s, t.q, p.p_s, p.p_u)
    return lo, up


def surrogate_objective(s: Scenario, t: Trajectory, p: PowerSchedule,
                        validate: bool = True) -> float:
    """Average surrogate secrecy rate (may be negative), bits/s/Hz.

    With ``validate`` (default) infeasible trajectories or schedules are
    rejected with a ValueError.
    """
    if validate:
        for verdict, label in ((check_trajectory(s, t), "trajectory"),
                               (check_schedule(s, p), "schedule")):
            if not verdict.feasible:
                worst = verdict.worst
                raise ValueError(
                    f"infeasible {label}: {worst.constraint}[{worst.index}] "
                    f"exceeds by {worst.magnitude:.3e}"
                )
    lo, up = per_slot_bound_rates(s, t, p)
    return float(np.mean(lo - up))


@dataclass(frozen=True)
class SecrecyReport:
    """Monte-Carlo secrecy-rate estimates for one (trajectory, schedule).

    ``mc_rate_expectation_form`` applies [.]^+ to the per-slot difference of
    estimated means (the ergodic secrecy rate); ``mc_rate_realization_form``
    applies [.]^+ per fading realization before averaging.  ``std_errors``
    holds one aggregate standard error per estimate; per-slot means and
    standard errors are kept for bound-validation work.
    """

    surrogate_rate: float
    mc_rate_expectation_form: float
    mc_rate_realization_form: float
    std_errors: dict
    samples: int
    seed: int
    rate_d_mean: np.ndarray
    rate_e_mean: np.ndarray
    rate_d_se: np.ndarray
    rate_e_se: np.ndarray

    def to_dict(self) -> dict:
        return {
            "surrogate_rate": float(self.surrogate_rate),
            "mc_rate_expectation_form": float(self.mc_rate_expectation_form),
            "mc_rate_realization_form": float(self.mc_rate_realization_form),
            "std_errors": {k: float(v) for k, v in self.std_errors.items()},
            "samples": int(self.samples),
            "seed": int(self.seed),
            "rate_d_mean": [float(v) for v in self.rate_d_mean],
            "rate_e_mean": [float(v) for v in self.rate_e_mean],
            "rate_d_se": [float(v) for v in self.rate_d_se],
            "rate_e_se": [float(v) for v in self.rate_e_se],
        }

    def to_json(self, **kwargs) -> str:
        kwargs.setdefault("sort_keys", True)
        return json.dumps(self.to_dict(), **kwargs)


def _slot_stream(seed: int, slot: int, terminal: int) -> np.random.Generator:
    # One Philox substream per (slot, terminal); terminal 0 = destination.
    seq = np.random.SeedSequence(entropy=(int(seed), int(slot), int(terminal)))
    return np.random.Generator(np.random.Philox(seq))


def _exponential_unit(rng: np.random.Generator, samples: int) -> np.ndarray:
    # Inverse-CDF sampling keeps the draw reproducible across numpy versions:
    # U in [0, 1) so 1 - U in (0, 1] and -log1p(-U) is finite.
    return -np.log1p(-rng.random(samples))


def mc_secrecy_rate(s: Scenario, t: Trajectory, p: PowerSchedule,
                    samples: int, seed: int) -> SecrecyReport:
    """Estimate the ergodic secrecy rate of a candidate solution.

    Draws ``samples`` exponential fading realizations per slot and terminal.
    Slots with zero source power contribute exactly zero (no sampling
    needed); substream indexing keeps the remaining slots' draws unchanged.
    """
    samples = int(samples)
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    seed = int(seed)
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")

    n = s.n_slots
    # Mean per-slot SNRs: the MC model keeps the exact fading mean (no
    # exp(-EULER_GAMMA) factor, which belongs to the analytic bound only).
    snr_d = s.gamma0 * s.d_sd ** (-s.pathloss_exp) * p.p_s \
        / (uav_gain(s, t.q, s.w_d) * p.p_u + 1.0)
    snr_e = s.gamma0 * s.d_se ** (-s.pathloss_exp) * p.p_s \
        / (uav_gain(s, t.q, s.w_e) * p.p_u + 1.0)

    d_mean = np.zeros(n)
    e_mean = np.zeros(n)
    d_se = np.zeros(n)
    e_se = np.zeros(n)
    real_mean = np.zeros(n)
    real_se = np.zeros(n)
    root_m = np.sqrt(samples)
    for slot in range(n):
        if snr_d[slot] == 0.0 and snr_e[slot] == 0.0:
            continue
        xi_d = _exponential_unit(_slot_stream(seed, slot, 0), samples)
        xi_e = _exponential_unit(_slot_stream(seed, slot, 1), samples)
        r_d = np.log1p(snr_d[slot] * xi_d) / LN2
        r_e = np.log1p(snr_e[slot] * xi_e) / LN2
        d_mean[slot] = r_d.mean()
        e_mean[slot] = r_e.mean()
        clipped = np.maximum(r_d - r_e, 0.0)
        real_mean[slot] = clipped.mean()
        if samples > 1:
            d_se[slot] = r_d.std(ddof=1) / root_m
            e_se[slot] = r_e.std(ddof=1) / root_m
            real_se[slot] = clipped.std(ddof=1) / root_m

    expectation_form = float(np.mean(np.maximum(d_mean - e_mean, 0.0)))
    realization_form = float(np.mean(real_mean))
    se_expectation = float(np.sqrt(np.sum(d_se ** 2 + e_se ** 2)) / n)
    se_realization = float(np.sqrt(np.sum(real_se ** 2)) / n)
    return SecrecyReport(
        surrogate_rate=surrogate_objective(s, t, p, validate=False),
        mc_rate_expectation_form=expectation_form,
        mc_rate_realization_form=realization_form,
        std_errors={"expectation_form": se_expectation,
                    "realization_form": se_realization},
        samples=samples,
        seed=seed,
        rate_d_mean=d_mean,
        rate_e_mean=e_mean,
        rate_d_se=d_se,
        rate_e_se=e_se,
    )
