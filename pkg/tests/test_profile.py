"""Power profiles, peaks, stacked heights, certified envelopes."""

import numpy as np
import pytest

from powerstrip import (
    Algorithm,
    Assignment,
    Case,
    DemandSet,
    InfeasiblePolicyError,
    ParameterError,
    Policy,
    SlotPlan,
    StepFunction,
    SystemParams,
    UnsupportedPolicyError,
    certify,
    peak_power,
    power_profile,
    schedule_ideal_stack,
    schedule_psp,
    stacked_height,
    theoretical_bounds,
)

from _support import draw_instance

_PLAN = SlotPlan(Case.NEAR_IDEAL, 2, 0.5, 1.0)


def _policy(assignments, plan=_PLAN, algorithm=Algorithm.PSP_FILL):
    return Policy.from_assignments(assignments, plan=plan, algorithm=algorithm)


class TestStepFunction:
    def test_requires_unit_domain(self):
        with pytest.raises(ParameterError):
            StepFunction([0.0, 0.5], [1.0])
        with pytest.raises(ParameterError):
            StepFunction([0.1, 1.0], [1.0])

    def test_requires_increasing_breakpoints(self):
        with pytest.raises(ParameterError):
            StepFunction([0.0, 0.5, 0.5, 1.0], [1.0, 2.0, 1.0])

    def test_rejects_negative_levels(self):
        with pytest.raises(ParameterError):
            StepFunction([0.0, 1.0], [-0.5])

    def test_integral_and_lookup(self):
        f = StepFunction([0.0, 0.25, 1.0], [4.0, 1.0])
        assert f.integral() == pytest.approx(0.25 * 4 + 0.75 * 1)
        assert f.value_at(0.0) == 4.0
        assert f.value_at(0.25) == 1.0
        assert f.value_at(1.0) == 1.0


class TestPowerProfile:
    def test_two_overlapping_rectangles(self):
        f = power_profile(
            _policy(
                [
                    Assignment(0, 0.0, 0.5, 2.0, 0),
                    Assignment(1, 0.25, 0.5, 2.0, 1),
                ]
            )
        )
        np.testing.assert_allclose(f.times, [0.0, 0.25, 0.5, 0.75, 1.0])
        np.testing.assert_allclose(f.values, [2.0, 4.0, 2.0, 0.0])
        assert peak_power(f) == 4.0

    def test_single_full_width(self):
        f = power_profile(_policy([Assignment(0, 0.0, 1.0, 3.0, 0)]))
        np.testing.assert_allclose(f.times, [0.0, 1.0])
        np.testing.assert_allclose(f.values, [3.0])
        assert peak_power(f) == 3.0

    def test_empty_policy_is_zero(self):
        f = power_profile(_policy([]))
        np.testing.assert_allclose(f.times, [0.0, 1.0])
        np.testing.assert_allclose(f.values, [0.0])
        assert peak_power(f) == 0.0

    def test_half_open_adjacency_does_not_double_count(self):
        f = power_profile(
            _policy(
                [
                    Assignment(0, 0.0, 0.5, 2.0, 0),
                    Assignment(1, 0.5, 0.5, 2.0, 1),
                ]
            )
        )
        assert peak_power(f) == 2.0

    def test_merges_breakpoints_within_noise(self):
        f = power_profile(
            _policy(
                [
                    Assignment(0, 0.0, 0.5, 1.0, 0),
                    Assignment(1, 0.5 + 1e-13, 0.4, 1.0, 1),
                ]
            )
        )
        # The end at 0.5 and start at 0.5+1e-13 collapse into one breakpoint:
        # no sliver segment and no spurious level-2 spike.
        np.testing.assert_allclose(f.times, [0.0, 0.5, 0.9, 1.0], atol=1e-12)
        np.testing.assert_allclose(f.values, [1.0, 1.0, 0.0])

    def test_rejects_window_escape(self):
        with pytest.raises(InfeasiblePolicyError):
            power_profile(_policy([Assignment(0, 0.7, 0.5, 1.0, 0)]))

    def test_rejects_non_positive_duration(self):
        with pytest.raises(InfeasiblePolicyError):
            power_profile(_policy([Assignment(0, 0.0, 0.0, 1.0, 0)]))

    def test_conservation(self):
        rng = np.random.default_rng(31)
        from powerstrip import schedule_greedy, schedule_psp

        for _ in range(100):
            params, demands = draw_instance(rng, max_n=30)
            for build in (schedule_psp, schedule_greedy):
                f = power_profile(build(demands, params))
                assert f.integral() == pytest.approx(demands.total, rel=1e-9)


class TestStackedHeight:
    def test_slot_filling_example(self):
        policy = schedule_psp(DemandSet.from_energies([1.0, 1.0, 1.0]), SystemParams(0.4, 0.5))
        assert stacked_height(policy) == pytest.approx(4.0)
        assert stacked_height(policy) == pytest.approx(peak_power(power_profile(policy)))

    def test_full_stack_is_total_energy(self):
        policy = schedule_ideal_stack(
            DemandSet.from_energies([2.0, 3.0, 5.0]), SystemParams(0.5, 1.0)
        )
        assert stacked_height(policy) == 10.0

    def test_single_demand(self):
        policy = schedule_psp(DemandSet.from_energies([1.0]), SystemParams(0.3571, 0.43103))
        assert stacked_height(policy) == pytest.approx(1.0 / 0.43103)

    def test_rejects_policies_without_slots(self):
        policy = _policy([Assignment(0, 0.0, 0.5, 2.0, None)])
        with pytest.raises(UnsupportedPolicyError):
            stacked_height(policy)

    def test_dominates_peak(self):
        rng = np.random.default_rng(23)
        from powerstrip import schedule_greedy, schedule_psp

        for _ in range(100):
            params, demands = draw_instance(rng, max_n=25)
            for build in (schedule_psp, schedule_greedy):
                policy = build(demands, params)
                h = stacked_height(policy)
                p = peak_power(power_profile(policy))
                assert h >= p - 1e-9
                if policy.algorithm in (Algorithm.PSP_FILL, Algorithm.GREEDY):
                    assert h == pytest.approx(p, abs=1e-9)


class TestTheoreticalBounds:
    def test_non_ideal_showcase(self):
        demands = DemandSet.from_energies([1.0, 1.0, 1.0])
        cert = theoretical_bounds(demands, SystemParams(0.3571, 0.43103))
        z_star = 2 * 0.43103
        assert cert.a_bar == pytest.approx(3.0 / z_star, rel=1e-12)
        assert cert.upper == pytest.approx(3.0 / z_star + 1.0 / 0.3571, rel=1e-12)
        assert cert.a_bar == pytest.approx(3.4800, abs=1e-3)
        assert cert.upper == pytest.approx(6.2804, abs=1e-3)

    def test_good_region_floor_is_total(self):
        demands = DemandSet.from_energies([1.0, 1.0, 1.0])
        cert = theoretical_bounds(demands, SystemParams(0.4, 0.5))
        assert cert.a_bar == 3.0
        assert cert.upper == pytest.approx(5.5)

    def test_degenerate_single_demand(self):
        cert = theoretical_bounds(DemandSet.from_energies([1.0]), SystemParams(1.0, 1.0))
        assert cert.a_bar == 1.0
        assert cert.upper == 2.0

    def test_adding_a_demand_never_lowers_the_floor(self):
        rng = np.random.default_rng(41)
        for _ in range(100):
            params, demands = draw_instance(rng, max_n=10)
            grown = DemandSet.from_energies(
                list(demands.energies) + [float(rng.uniform(0.01, 2.0))]
            )
            assert theoretical_bounds(grown, params).a_bar >= (
                theoretical_bounds(demands, params).a_bar - 1e-12
            )


class TestCertify:
    def test_slot_filling_within_envelope(self):
        demands = DemandSet.from_energies([1.0, 1.0, 1.0])
        params = SystemParams(0.3571, 0.43103)
        cert = certify(schedule_psp(demands, params), demands, params)
        assert cert.within is True
        assert cert.achieved_peak <= cert.upper + 1e-9

    def test_full_stack_peak_equals_floor(self):
        demands = DemandSet.from_energies([2.0, 3.0])
        params = SystemParams(0.5, 1.0)
        cert = certify(schedule_ideal_stack(demands, params), demands, params)
        assert cert.achieved_peak == pytest.approx(cert.a_bar, rel=1e-12)
        assert cert.within is True

    def test_adversarial_stack_is_flagged(self):
        # Everything piled at t=0 with the shortest duration: peak A/ell
        # exceeds A + A_max/ell whenever A(1 - ell) > A_max.
        demands = DemandSet.from_energies([1.0, 1.0, 1.0, 1.0])
        params = SystemParams(0.25, 1.0)
        policy = Policy.from_assignments(
            [Assignment(i, 0.0, 0.25, 4.0, 0) for i in range(4)],
            plan=SlotPlan(Case.IDEAL, 1, 1.0, 1.0),
            algorithm=Algorithm.PSP_FILL,
        )
        cert = certify(policy, demands, params)
        assert cert.achieved_peak == pytest.approx(16.0)
        assert cert.within is False
