"""Surrogate objective and Monte-Carlo secrecy-rate estimation."""

import json
import math

import numpy as np
import pytest
from scipy import special

from conftest import (benchmark_scenario, random_schedule, random_trajectory,
                      small_scenario)
from skyjam.channel import rate_lb_dest, rate_ub_eve
from skyjam.model import PowerSchedule, Trajectory, uniform_line_trajectory
from skyjam.objective import (mc_secrecy_rate, per_slot_bound_rates,
                              surrogate_objective)


def single_slot_scenario(**overrides):
    """One slot, jammer pinned: the q0 = qf = [0, 0] degenerate mission."""
    cfg = dict(q0=[0.0, 0.0], qf=[0.0, 0.0], T=1.0, dt_or_N=1)
    cfg.update(overrides)
    return small_scenario(**cfg)


def pinned_solution(s, p_s, p_u):
    t = Trajectory(np.array([s.qf]))
    return t, PowerSchedule(np.array([p_s]), np.array([p_u]))


class TestSurrogateObjective:
    def test_zero_source_power_gives_zero(self, small):
        t = uniform_line_trajectory(small)
        p = PowerSchedule(np.zeros(small.n_slots),
                          np.full(small.n_slots, small.p_u_avg))
        assert surrogate_objective(small, t, p) == 0.0

    def test_single_slot_composes_channel_bounds(self):
        s = single_slot_scenario()
        t, p = pinned_solution(s, 0.8, 0.003)
        expected = float(rate_lb_dest(s, s.qf, 0.8, 0.003)
                         - rate_ub_eve(s, s.qf, 0.8, 0.003))
        assert surrogate_objective(s, t, p) == pytest.approx(expected, rel=1e-14)

    def test_average_over_slots(self, small):
        rng = np.random.default_rng(3)
        t = random_trajectory(small, rng)
        p = random_schedule(small, rng)
        lo, up = per_slot_bound_rates(small, t, p)
        assert surrogate_objective(small, t, p) == pytest.approx(
            float(np.mean(lo - up)), rel=1e-14)

    def test_infeasible_inputs_rejected(self, small):
        t = uniform_line_trajectory(small)
        over_peak = PowerSchedule(
            np.full(small.n_slots, small.p_s_peak * 1.5),
            np.zeros(small.n_slots))
        with pytest.raises(ValueError, match="schedule"):
            surrogate_objective(small, t, over_peak)
        q = t.q.copy()
        q[3] += np.array([50.0, 0.0])
        good_p = PowerSchedule(np.full(small.n_slots, small.p_s_avg),
                               np.zeros(small.n_slots))
        with pytest.raises(ValueError, match="trajectory"):
            surrogate_objective(small, Trajectory(q), good_p)
        # the same call passes with validation off
        surrogate_objective(small, Trajectory(q), good_p, validate=False)

    def test_jamming_near_eve_helps_when_dest_is_far(self):
        # Jammer parked on the eavesdropper, destination far away: a small
        # amount of jamming power must increase the surrogate.
        s = single_slot_scenario(q0=[60.0, 90.0], qf=[60.0, 90.0],
                                 wd=[800.0, 0.0])
        t, p0 = pinned_solution(s, 1.0, 0.0)
        t, p1 = pinned_solution(s, 1.0, 1e-4)
        assert surrogate_objective(s, t, p1) > surrogate_objective(s, t, p0)


class TestMonteCarlo:
    def test_zero_power_slots_are_exact_zeros(self, small):
        t = uniform_line_trajectory(small)
        p = PowerSchedule(np.zeros(small.n_slots), np.zeros(small.n_slots))
        report = mc_secrecy_rate(small, t, p, samples=10, seed=1)
        assert report.mc_rate_expectation_form == 0.0
        assert report.mc_rate_realization_form == 0.0
        assert np.all(report.rate_d_mean == 0.0)
        assert np.all(report.rate_e_se == 0.0)

    def test_same_seed_bit_identical(self, small):
        rng = np.random.default_rng(11)
        t = random_trajectory(small, rng)
        p = random_schedule(small, rng)
        a = mc_secrecy_rate(small, t, p, samples=500, seed=42)
        b = mc_secrecy_rate(small, t, p, samples=500, seed=42)
        assert a.mc_rate_expectation_form == b.mc_rate_expectation_form
        assert a.mc_rate_realization_form == b.mc_rate_realization_form
        np.testing.assert_array_equal(a.rate_d_mean, b.rate_d_mean)
        np.testing.assert_array_equal(a.rate_e_se, b.rate_e_se)
        c = mc_secrecy_rate(small, t, p, samples=500, seed=43)
        assert np.any(c.rate_d_mean != a.rate_d_mean)

    def test_symmetric_terminals_have_zero_secrecy(self):
        # Destination and eavesdropper at the same spot, no jamming: the two
        # rates share one distribution, so the secrecy rate is zero up to
        # Monte-Carlo noise.
        s = single_slot_scenario(wd=[100.0, 0.0], we=[100.0, 0.0])
        t, p = pinned_solution(s, 1.0, 0.0)
        report = mc_secrecy_rate(s, t, p, samples=200_000, seed=5)
        se = math.hypot(report.rate_d_se[0], report.rate_e_se[0])
        assert abs(report.rate_d_mean[0] - report.rate_e_mean[0]) <= 3.0 * se
        assert report.mc_rate_expectation_form <= 3.0 * se

    def test_unit_snr_log_moment_closed_form(self):
        # E[log2(1 + xi)] for xi ~ Exp(1) equals e * E1(1) / ln 2.
        s = single_slot_scenario()
        p_s = 1.0 / (s.gamma0 * s.d_sd ** -s.pathloss_exp)
        t, p = pinned_solution(s, p_s, 0.0)
        report = mc_secrecy_rate(s, t, p, samples=1_000_000, seed=9)
        closed_form = math.e * float(special.exp1(1.0)) / math.log(2.0)
        assert closed_form == pytest.approx(0.8603473822708868, rel=1e-12)
        assert abs(report.rate_d_mean[0] - closed_form) \
            <= 3.0 * report.rate_d_se[0]

    def test_bounds_sandwich_the_estimates(self, small):
        rng = np.random.default_rng(21)
        t = random_trajectory(small, rng)
        p = random_schedule(small, rng)
        report = mc_secrecy_rate(small, t, p, samples=40_000, seed=2)
        lo, up = per_slot_bound_rates(small, t, p)
        assert np.all(lo <= report.rate_d_mean + 3.0 * report.rate_d_se)
        assert np.all(up >= report.rate_e_mean - 3.0 * report.rate_e_se)
        # aggregate form of the same statement
        agg_se = 3.0 * (report.std_errors["expectation_form"])
        if np.all(lo - up >= 0.0):
            assert report.surrogate_rate \
                <= report.mc_rate_expectation_form + agg_se

    def test_realization_form_dominates_expectation_form(self, small):
        # E[(x)^+] >= (E[x])^+ slot by slot, so the realization-form rate
        # can only exceed the expectation-form one (up to sampling noise).
        rng = np.random.default_rng(31)
        t = random_trajectory(small, rng)
        p = random_schedule(small, rng)
        report = mc_secrecy_rate(small, t, p, samples=20_000, seed=3)
        slack = 3.0 * (report.std_errors["expectation_form"]
                       + report.std_errors["realization_form"])
        assert report.mc_rate_realization_form \
            >= report.mc_rate_expectation_form - slack

    def test_standard_error_scaling(self, small):
        rng = np.random.default_rng(41)
        t = random_trajectory(small, rng)
        p = random_schedule(small, rng)
        coarse = mc_secrecy_rate(small, t, p, samples=4_000, seed=4)
        fine = mc_secrecy_rate(small, t, p, samples=16_000, seed=4)
        ratio = coarse.std_errors["expectation_form"] \
            / fine.std_errors["expectation_form"]
        assert 1.0 < ratio < 4.0   # ideal is 2 when samples quadruple

    def test_aggregates_recomputable_from_slot_arrays(self, small):
        rng = np.random.default_rng(51)
        t = random_trajectory(small, rng)
        p = random_schedule(small, rng)
        report = mc_secrecy_rate(small, t, p, samples=1_000, seed=6)
        rebuilt = float(np.mean(np.maximum(
            report.rate_d_mean - report.rate_e_mean, 0.0)))
        assert report.mc_rate_expectation_form == rebuilt

    def test_report_serializes_with_provenance(self, small):
        t = uniform_line_trajectory(small)
        p = PowerSchedule(np.full(small.n_slots, 0.5),
                          np.full(small.n_slots, 0.001))
        report = mc_secrecy_rate(small, t, p, samples=64, seed=77)
        payload = json.loads(report.to_json())
        assert payload["samples"] == 64
        assert payload["seed"] == 77
        assert set(payload["std_errors"]) == {"expectation_form",
                                              "realization_form"}
        assert len(payload["rate_d_mean"]) == small.n_slots
        assert list(payload) == sorted(payload)

    def test_bad_arguments_rejected(self, small):
        t = uniform_line_trajectory(small)
        p = PowerSchedule(np.ones(small.n_slots), np.zeros(small.n_slots))
        with pytest.raises(ValueError, match="samples"):
            mc_secrecy_rate(small, t, p, samples=0, seed=0)
        with pytest.raises(ValueError, match="seed"):
            mc_secrecy_rate(small, t, p, samples=10, seed=-1)
