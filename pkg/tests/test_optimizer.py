import math
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fovguard.optimizer import (
    DurationPlan,
    InfeasibleError,
    NoObservationWarning,
    StreamClock,
    brute_force_plan,
    manual_plan,
    max_resources_rate,
    optimize_durations,
    rates_for_resources_rate,
)
from fovguard.privacy import PrivacySpec
from fovguard.resources import DEFAULT_RATES, Rates, VideoConfig, tile_bits

CLOCK = StreamClock(l0=3, T_seg=1.0, L=60)
VIDEO = VideoConfig()


class TestStreamClock:
    def test_budget(self):
        assert CLOCK.T_ps == 2.0
        assert list(CLOCK.segments)[:2] == [3, 4]
        assert StreamClock(3, 1.0, 10, 0.5).T_ps == 0.5

    def test_validation(self):
        with pytest.raises(ValueError):
            StreamClock(l0=1)
        with pytest.raises(ValueError):
            StreamClock(l0=5, L=4)
        with pytest.raises(ValueError):
            StreamClock(T_seg=0)


class TestOptimize:
    def test_full_privacy(self):
        plan = optimize_durations(CLOCK, 0.2, PrivacySpec(1.0), VIDEO, DEFAULT_RATES)
        assert plan.n_p == 200
        assert plan.t_com == pytest.approx(0.4347, abs=1e-4)
        assert plan.t_cpt == pytest.approx(1.357, abs=1e-3)
        assert plan.t_cc == pytest.approx(1.792, abs=1e-3)
        assert plan.n_obw_samples == 1
        assert plan.t_obw == pytest.approx(0.2)

    def test_no_privacy(self):
        plan = optimize_durations(CLOCK, 0.2, PrivacySpec(0.0), VIDEO, DEFAULT_RATES)
        assert plan.n_p == 33
        assert plan.t_cc == pytest.approx(0.296, abs=1e-3)
        assert plan.n_obw_samples == 8

    def test_hand_formula(self):
        s_com, s_cpt = tile_bits(VIDEO)
        plan = optimize_durations(CLOCK, 0.2, PrivacySpec(0.5), VIDEO, DEFAULT_RATES)
        n_p = 33 + math.ceil(0.5 * 167)
        assert plan.t_com == s_com * n_p / 2.85e9
        assert plan.t_cpt == s_cpt * n_p / 2.2e9
        assert plan.n_obw_samples == math.floor((2.0 - plan.t_cc) / 0.2)

    def test_unbounded_rates(self):
        plan = optimize_durations(CLOCK, 0.2, PrivacySpec(1.0), VIDEO, Rates(1e30, 1e30))
        assert plan.t_cc < 1e-15
        assert plan.n_obw_samples == 10

    def test_infeasible(self):
        with pytest.raises(InfeasibleError):
            optimize_durations(StreamClock(3, 1.0, 60, 0.1), 0.2, PrivacySpec(0.0), VIDEO, DEFAULT_RATES)

    def test_no_observation_warns(self):
        tight = StreamClock(3, 1.0, 60, 1.9)
        with pytest.warns(NoObservationWarning):
            plan = optimize_durations(tight, 0.2, PrivacySpec(1.0), VIDEO, DEFAULT_RATES)
        assert plan.n_obw_samples == 0
        assert not plan.observable

    def test_sum_invariant(self):
        plan = optimize_durations(CLOCK, 0.15, PrivacySpec(0.37), VIDEO, DEFAULT_RATES)
        assert plan.t_obw + plan.slack + plan.t_com + plan.t_cpt == pytest.approx(2.0, abs=1e-12)

    def test_plan_validation(self):
        with pytest.raises(ValueError):
            DurationPlan(0.4, 0.5, 0.5, 2.0, 0.2, 2)
        with pytest.raises(ValueError):
            DurationPlan(0.5, 0.5, 1.0, 2.0, 0.2, 2)

    @settings(max_examples=50)
    @given(st.floats(0, 1), st.floats(0, 1))
    def test_monotone_in_sdop(self, a, b):
        a, b = sorted((a, b))
        pa = optimize_durations(CLOCK, 0.2, PrivacySpec(a), VIDEO, DEFAULT_RATES)
        pb = optimize_durations(CLOCK, 0.2, PrivacySpec(b), VIDEO, DEFAULT_RATES)
        assert pa.t_cc <= pb.t_cc
        assert pa.n_obw_samples >= pb.n_obw_samples


class TestManualPlan:
    def test_keeps_durations(self):
        plan = manual_plan(CLOCK, 0.2, 0.3, 0.4)
        assert (plan.t_com, plan.t_cpt, plan.n_obw_samples) == (0.3, 0.4, 6)

    def test_infeasible(self):
        with pytest.raises(InfeasibleError):
            manual_plan(CLOCK, 0.2, 1.5, 0.6)


class TestResourcesRate:
    def test_reference_value(self):
        assert max_resources_rate(VIDEO, DEFAULT_RATES) == pytest.approx(0.558, abs=5e-4)

    def test_unit_terms(self):
        s_com, s_cpt = tile_bits(VIDEO)
        assert max_resources_rate(VIDEO, Rates(s_com * 200, s_cpt * 200)) == pytest.approx(0.5)

    def test_homogeneous(self):
        assert max_resources_rate(VIDEO, DEFAULT_RATES.scaled(2)) == pytest.approx(
            2 * max_resources_rate(VIDEO, DEFAULT_RATES)
        )

    @given(st.floats(0.05, 5))
    def test_rescaling_hits_target(self, target):
        rates = rates_for_resources_rate(VIDEO, DEFAULT_RATES, target)
        assert max_resources_rate(VIDEO, rates) == pytest.approx(target)
        assert rates.C_com / rates.C_cpt == pytest.approx(DEFAULT_RATES.C_com / DEFAULT_RATES.C_cpt)


class TestBruteForce:
    @pytest.mark.parametrize("rho", [0.0, 0.25, 0.5, 1.0])
    def test_matches_closed_form(self, rho):
        spec = PrivacySpec(rho)
        plan = optimize_durations(CLOCK, 0.2, spec, VIDEO, DEFAULT_RATES)
        oracle = brute_force_plan(CLOCK, 0.2, spec, VIDEO, DEFAULT_RATES, 0.02)
        assert abs(plan.observation_budget - oracle.observation_budget) <= 0.02
        assert oracle.t_cpt == pytest.approx(plan.t_cpt, abs=1e-9)

    def test_ordering(self):
        lo = brute_force_plan(CLOCK, 0.2, PrivacySpec(0.0), VIDEO, DEFAULT_RATES, 0.02)
        hi = brute_force_plan(CLOCK, 0.2, PrivacySpec(1.0), VIDEO, DEFAULT_RATES, 0.02)
        assert lo.t_cc < hi.t_cc

    def test_infeasible_agrees(self):
        tiny = StreamClock(3, 1.0, 60, 0.1)
        with pytest.raises(InfeasibleError):
            brute_force_plan(tiny, 0.2, PrivacySpec(0.0), VIDEO, DEFAULT_RATES, 0.01)

    def test_bad_step(self):
        with pytest.raises(ValueError):
            brute_force_plan(CLOCK, 0.2, PrivacySpec(0.0), VIDEO, DEFAULT_RATES, 0.0)
