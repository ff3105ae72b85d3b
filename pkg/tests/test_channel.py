"""Channel gains, per-slot rate bounds and the exponential log-moment."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import benchmark_scenario, small_scenario
from skyjam.channel import (EULER_GAMMA, expected_ln_exponential, rate_lb_dest,
                            rate_ub_eve, slot_gains, uav_gain)


class TestUavGain:
    def test_directly_above_eavesdropper(self, benchmark):
        # gamma0 / H^2 = 1e9 / 1e4 with the jammer on top of w_E.
        assert uav_gain(benchmark, np.array([200.0, 200.0]), benchmark.w_e) \
            == pytest.approx(1e5, rel=1e-12)

    def test_directly_above_destination(self, benchmark):
        assert uav_gain(benchmark, np.array([300.0, 0.0]), benchmark.w_d) \
            == pytest.approx(1e5, rel=1e-12)

    def test_overhead_point_is_the_maximum(self, benchmark):
        rng = np.random.default_rng(7)
        top = uav_gain(benchmark, benchmark.w_e, benchmark.w_e)
        assert top == pytest.approx(benchmark.gamma0 / benchmark.altitude_h ** 2)
        for _ in range(200):
            q = rng.uniform(-500, 500, 2)
            assert uav_gain(benchmark, q, benchmark.w_e) <= top

    def test_broadcasts_over_waypoints(self, benchmark):
        q = np.array([[200.0, 200.0], [300.0, 0.0], [0.0, 0.0]])
        gains = uav_gain(benchmark, q, benchmark.w_e)
        assert gains.shape == (3,)
        assert gains[0] == pytest.approx(1e5, rel=1e-12)


class TestRateBounds:
    def test_zero_source_power_gives_zero(self, benchmark):
        q = np.array([0.0, 0.0])
        assert rate_lb_dest(benchmark, q, 0.0, 0.01) == 0.0
        assert rate_ub_eve(benchmark, q, 0.0, 0.01) == 0.0

    def test_dest_bound_at_unit_mean_snr(self, benchmark):
        # p_s chosen so gamma0 * d_sd^-3 * p_s = 1 with no jamming: the
        # fading penalty alone remains, log2(1 + exp(-EULER_GAMMA)).
        p_s = 0.027
        value = rate_lb_dest(benchmark, np.array([0.0, 0.0]), p_s, 0.0)
        assert value == pytest.approx(0.6428951350866423, rel=1e-12)

    def test_eve_bound_round_numbers(self, benchmark):
        # At q = w_E with mean SNR numerator 10 and jamming interference 9
        # the bound collapses to log2(1 + 10/10) = 1 exactly.
        p_s = 10.0 / (benchmark.gamma0 * benchmark.d_se ** -3.0)
        p_u = 9.0 / (benchmark.gamma0 / benchmark.altitude_h ** 2)
        value = rate_ub_eve(benchmark, benchmark.w_e, p_s, p_u)
        assert value == pytest.approx(1.0, rel=1e-12)

    def test_eve_bound_exceeds_dest_bound_symmetric_setup(self):
        # Same geometry for both terminals: only exp(-EULER_GAMMA) differs.
        s = small_scenario(wd=[100.0, 0.0], we=[100.0, 0.0])
        q = np.array([40.0, 40.0])
        assert rate_ub_eve(s, q, 0.5, 0.001) > rate_lb_dest(s, q, 0.5, 0.001)

    @given(p_u=st.floats(min_value=0.0, max_value=10.0),
           bump=st.floats(min_value=1e-6, max_value=10.0))
    @settings(max_examples=50, deadline=None)
    def test_dest_bound_non_increasing_in_jamming(self, p_u, bump):
        s = small_scenario()
        q = np.array([50.0, 50.0])
        assert rate_lb_dest(s, q, 1.0, p_u + bump) \
            <= rate_lb_dest(s, q, 1.0, p_u) + 1e-12

    def test_eve_bound_vanishes_under_heavy_jamming(self, small):
        q = small.w_e
        values = [rate_ub_eve(small, q, 1.0, p) for p in (0.0, 1.0, 1e3, 1e9)]
        assert all(x > y for x, y in zip(values, values[1:]))
        assert values[-1] < 1e-6

    @given(p1=st.floats(min_value=0.0, max_value=3.0),
           p2=st.floats(min_value=0.0, max_value=3.0))
    @settings(max_examples=50, deadline=None)
    def test_dest_bound_concave_in_source_power(self, p1, p2):
        s = small_scenario()
        q = np.array([10.0, 80.0])
        mid = rate_lb_dest(s, q, 0.5 * (p1 + p2), 0.005)
        ends = 0.5 * (rate_lb_dest(s, q, p1, 0.005)
                      + rate_lb_dest(s, q, p2, 0.005))
        assert mid >= ends - 1e-12

    def test_translation_invariance(self):
        shift = [123.4, -56.7]
        base = small_scenario()
        moved = small_scenario(
            ws=list(np.array(base.w_s) + shift),
            wd=list(np.array(base.w_d) + shift),
            we=list(np.array(base.w_e) + shift),
            q0=list(np.array(base.q0) + shift),
            qf=list(np.array(base.qf) + shift),
        )
        q = np.array([33.0, 44.0])
        assert rate_lb_dest(base, q, 1.2, 0.004) == pytest.approx(
            rate_lb_dest(moved, q + shift, 1.2, 0.004), rel=1e-12)
        assert rate_ub_eve(base, q, 1.2, 0.004) == pytest.approx(
            rate_ub_eve(moved, q + shift, 1.2, 0.004), rel=1e-12)


class TestSlotGains:
    def test_fields_match_direct_formulas(self, benchmark):
        q = np.array([100.0, 50.0])
        gains = slot_gains(benchmark, q)
        assert gains.h_d_norm == pytest.approx(
            float(uav_gain(benchmark, q, benchmark.w_d)))
        assert gains.h_e_norm == pytest.approx(
            float(uav_gain(benchmark, q, benchmark.w_e)))
        assert gains.g_d_mean == pytest.approx(
            benchmark.gamma0 * benchmark.d_sd ** -3.0, rel=1e-12)
        assert gains.g_e_mean == pytest.approx(
            benchmark.gamma0 * benchmark.d_se ** -3.0, rel=1e-12)
        for value in (gains.h_d_norm, gains.h_e_norm,
                      gains.g_d_mean, gains.g_e_mean):
            assert value > 0.0 and math.isfinite(value)


class TestExpectedLnExponential:
    def test_unit_rate(self):
        assert expected_ln_exponential(1.0) == pytest.approx(
            -0.5772156649015329, abs=1e-15)
        assert EULER_GAMMA == pytest.approx(0.5772156649015329, abs=1e-15)

    def test_cancellation_point(self):
        assert expected_ln_exponential(math.exp(-EULER_GAMMA)) \
            == pytest.approx(0.0, abs=1e-15)

    def test_rate_two(self):
        assert expected_ln_exponential(2.0) == pytest.approx(
            -1.2703628454614782, abs=1e-14)

    def test_monte_carlo_agreement_rate_two(self):
        rng = np.random.default_rng(2024)
        draws = np.log(rng.exponential(scale=0.5, size=1_000_000))
        se = draws.std(ddof=1) / math.sqrt(draws.size)
        assert abs(draws.mean() - expected_ln_exponential(2.0)) <= 3.0 * se

    @pytest.mark.parametrize("bad", [0.0, -1.0, -1e-12])
    def test_non_positive_rate_rejected(self, bad):
        with pytest.raises(ValueError):
            expected_ln_exponential(bad)
