"""Shared fixtures and instance builders for the test suite."""

import numpy as np
import pytest

from skyjam.model import (PowerSchedule, Scenario, Trajectory, build_scenario,
                          default_scenario_path, read_config,
                          uniform_line_trajectory)
from skyjam.trajectory import project_steps

# Small, fast scenario used wherever the benchmark geometry is not required.
SMALL_CONFIG = {
    "ws": [0.0, 0.0],
    "wd": [220.0, 0.0],
    "we": [60.0, 90.0],
    "q0": [-30.0, 40.0],
    "qf": [150.0, 40.0],
    "H": 90.0,
    "V": 4.0,
    "T": 50.0,
    "dt_or_N": 1.0,
    "gamma0_db": 80.0,
    "pathloss_exp": 3.0,
    "ps_avg_dbm": 30.0,
    "ps_peak_dbm": 36.0,
    "pu_avg_dbm": 10.0,
    "pu_peak_dbm": 16.0,
    "epsilon": 1e-4,
}


def small_scenario(**overrides) -> Scenario:
    cfg = dict(SMALL_CONFIG)
    cfg.update(overrides)
    return build_scenario(cfg)


def benchmark_config() -> dict:
    return read_config(default_scenario_path())


def benchmark_scenario(**overrides) -> Scenario:
    cfg = benchmark_config()
    cfg.update(overrides)
    return build_scenario(cfg)


def random_trajectory(s: Scenario, rng: np.random.Generator,
                      jitter: float = 1.0) -> Trajectory:
    """Random feasible trajectory: jittered line pushed back onto the
    mobility set by the exact step-space projection."""
    base = uniform_line_trajectory(s).q.copy()
    base += rng.normal(scale=jitter * s.l_max, size=base.shape)
    steps = np.diff(np.vstack([s.q0[None, :], base]), axis=0)
    v, ok = project_steps(steps, s.qf - s.q0, s.l_max)
    assert ok, "projection of the jittered line failed to converge"
    q = s.q0[None, :] + np.cumsum(v, axis=0)
    q[-1] = s.qf
    return Trajectory(q)


def random_schedule(s: Scenario, rng: np.random.Generator) -> PowerSchedule:
    """Random schedule satisfying peak and average budgets."""

    def draw(avg: float, peak: float) -> np.ndarray:
        p = rng.uniform(0.0, peak, s.n_slots)
        mean = p.mean()
        if mean > avg:
            p *= (avg / mean) * rng.uniform(0.5, 1.0)
        return p

    return PowerSchedule(p_s=draw(s.p_s_avg, s.p_s_peak),
                         p_u=draw(s.p_u_avg, s.p_u_peak))


@pytest.fixture
def small():
    return small_scenario()


@pytest.fixture
def benchmark():
    return benchmark_scenario()
