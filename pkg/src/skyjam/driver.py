"""Block coordinate descent over source power, jammer power and trajectory.

Each sweep updates the three blocks in order (exact source-power update,
one SCA jammer-power step, one SCA trajectory step), so the surrogate
objective never decreases.  The sweep loop stops when the fractional
increase falls below ``epsilon`` or after ``max_iters`` sweeps (with a
warning).  Everything is deterministic: same scenario and config, same
solution, bit for bit.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass

import numpy as np

from .model import (PowerSchedule, Scenario, Solution, SolverError, Trajectory,
                    check_schedule, check_trajectory, uniform_line_trajectory)
from .objective import per_slot_bound_rates, surrogate_objective
from .source_power import p3_coefficients, solve_p3
from .trajectory import p7_coefficients, solve_p7
from .uav_power import p5_coefficients, solve_p5

_TRAJECTORY_INIT_MODES = ("best_effort_ltp", "straight_line")
_POWER_INIT_MODES = ("uniform_average",)


@dataclass(frozen=True)
class BcdConfig:
    """Knobs of the sweep loop; defaults reproduce the benchmark setup."""

    epsilon: float = 1e-4
    max_iters: int = 200
    init_trajectory_mode: str = "best_effort_ltp"
    init_power_mode: str = "uniform_average"
    inner_sca_steps: int = 1   # SCA re-linearizations per block per sweep

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.init_trajectory_mode not in _TRAJECTORY_INIT_MODES:
            raise ValueError(f"unknown init_trajectory_mode {self.init_trajectory_mode!r}")
        if self.init_power_mode not in _POWER_INIT_MODES:
            raise ValueError(f"unknown init_power_mode {self.init_power_mode!r}")
        if self.inner_sca_steps < 1:
            raise ValueError(f"inner_sca_steps must be >= 1, got {self.inner_sca_steps}")


def fractional_increase(previous: float, current: float) -> float:
    return (current - previous) / max(abs(previous), 1e-12)


def initial_trajectory(s: Scenario, mode: str) -> Trajectory:
    if mode == "straight_line":
        return uniform_line_trajectory(s)
    if mode == "best_effort_ltp":
        from .baselines import build_ltp_trajectory
        return build_ltp_trajectory(s)
    raise ValueError(f"unknown trajectory init mode {mode!r}")


def initial_schedule(s: Scenario) -> PowerSchedule:
    return PowerSchedule(
        p_s=np.full(s.n_slots, s.p_s_avg),
        p_u=np.full(s.n_slots, s.p_u_avg),
    )


def _assert_feasible(s: Scenario, t: Trajectory, p: PowerSchedule, sweep: int):
    for verdict, label in ((check_trajectory(s, t), "trajectory"),
                           (check_schedule(s, p), "schedule")):
        if not verdict.feasible:
            worst = verdict.worst
            raise SolverError(
                f"sweep {sweep}: infeasible {label}: "
                f"{worst.constraint}[{worst.index}] exceeds by {worst.magnitude:.3e}"
            )


def assemble_solution(s: Scenario, t: Trajectory, p: PowerSchedule,
                      trace) -> Solution:
    lo, up = per_slot_bound_rates(s, t, p)
    return Solution(
        trajectory=t,
        schedule=p,
        objective=float(np.mean(lo - up)),
        per_slot_rates=np.column_stack([lo, up]),
        trace=tuple(trace),
    )


def bcd_optimize(s: Scenario, cfg: BcdConfig | None = None,
                 trace_hook=None) -> Solution:
    """Joint trajectory and power optimization via block coordinate descent.

    ``trace_hook``, when given, receives ``(iteration, objective,
    wall_time_seconds)`` after every sweep.  Raises :class:`SolverError`
    (with the sweep index) if a block update fails or produces an
    infeasible iterate.
    """
    if cfg is None:
        cfg = BcdConfig(epsilon=s.epsilon)
    trajectory = initial_trajectory(s, cfg.init_trajectory_mode)
    schedule = initial_schedule(s)
    _assert_feasible(s, trajectory, schedule, sweep=0)
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
            for _ in range(cfg.inner_sca_steps):
                trajectory = solve_p7(
                    s, p7_coefficients(s, trajectory, schedule), trajectory)
        except SolverError:
            raise
        except Exception as exc:
            raise SolverError(f"sweep {sweep}: block update failed: {exc}") from exc
        _assert_feasible(s, trajectory, schedule, sweep)
        current = surrogate_objective(s, trajectory, schedule, validate=False)
        trace.append(current)
        if trace_hook is not None:
            trace_hook(sweep, current, time.perf_counter() - started)
        if fractional_increase(previous, current) < cfg.epsilon:
            stopped = True
            break
        previous = current
    if not stopped:
        warnings.warn(
            f"BCD hit max_iters = {cfg.max_iters} before the epsilon rule fired",
            RuntimeWarning,
        )
    return assemble_solution(s, trajectory, schedule, trace)
