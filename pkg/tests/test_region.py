"""Achievability predicates, classification and decomposition."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from powerstrip import (
    AchievabilityError,
    Case,
    DemandSet,
    ParameterError,
    SystemParams,
    classify,
    decompose,
    good_region,
    is_achievable,
    largest_achievable,
)
from powerstrip.oracle import achievable_by_search

NEAR_IDEAL = SystemParams(0.35714, 0.75758)
NON_IDEAL = SystemParams(0.3571, 0.43103)


class TestSystemParams:
    def test_rejects_zero_ell(self):
        with pytest.raises(ParameterError):
            SystemParams(0.0, 0.5)

    def test_rejects_negative_ell(self):
        with pytest.raises(ParameterError):
            SystemParams(-0.1, 0.5)

    def test_rejects_r_below_ell(self):
        with pytest.raises(ParameterError):
            SystemParams(0.5, 0.4)

    def test_rejects_ell_above_horizon(self):
        with pytest.raises(ParameterError):
            SystemParams(1.2, 1.5)

    def test_r_above_one_is_recorded_but_clamped(self):
        p = SystemParams(0.5, 1.5)
        assert p.r == 1.5
        assert p.r_eff == 1.0

    def test_rejects_nan(self):
        with pytest.raises(ParameterError):
            SystemParams(float("nan"), 0.5)


class TestIsAchievable:
    def test_near_ideal_horizon(self):
        assert is_achievable(1.0, NEAR_IDEAL)

    def test_degenerate_single_piece(self):
        assert is_achievable(0.37, SystemParams(0.37, 0.37))

    def test_non_ideal_horizon(self):
        assert not is_achievable(1.0, NON_IDEAL)

    def test_rejects_non_positive_w(self):
        with pytest.raises(ParameterError):
            is_achievable(0.0, NEAR_IDEAL)
        with pytest.raises(ParameterError):
            is_achievable(-1.0, NEAR_IDEAL)

    def test_snap_keeps_exact_rationals_inside(self):
        # 1/0.2 and 1/(1/3) are not exact in binary; the snap rule must
        # classify these the way exact arithmetic would.
        assert is_achievable(1.0, SystemParams(0.2, 0.2))
        third = 1.0 / 3.0
        assert is_achievable(1.0, SystemParams(third, third))
        assert is_achievable(1.0, SystemParams(0.25, 0.25))

    def test_agrees_with_enumeration_on_grid(self):
        rng = np.random.default_rng(2024)
        for _ in range(2000):
            ell = rng.uniform(0.02, 1.0)
            r = rng.uniform(ell, 1.2)
            w = rng.uniform(0.01, 1.5)
            p = SystemParams(ell, r)
            assert is_achievable(w, p) == achievable_by_search(w, p)

    def test_agrees_with_enumeration_on_exact_rationals(self):
        for denom_l in range(1, 15):
            for denom_r in range(1, denom_l + 1):
                p = SystemParams(1.0 / denom_l, 1.0 / denom_r)
                for num in range(1, 12):
                    w = num / 10.0
                    assert is_achievable(w, p) == achievable_by_search(w, p)


class TestLargestAchievable:
    def test_non_ideal_horizon(self):
        v = largest_achievable(1.0, NON_IDEAL)
        assert v == pytest.approx(2 * 0.43103, abs=1e-12)
        assert v == pytest.approx(0.86206, abs=1e-9)

    def test_achievable_width_is_its_own_answer(self):
        assert largest_achievable(1.0, NEAR_IDEAL) == 1.0
        assert largest_achievable(0.4, SystemParams(0.4, 0.5)) == 0.4

    def test_single_slot_regime(self):
        assert largest_achievable(1.0, SystemParams(0.6, 0.7)) == pytest.approx(0.7)

    def test_below_ell_gives_zero(self):
        assert largest_achievable(0.2, SystemParams(0.4, 0.5)) == 0.0

    def test_result_is_achievable_or_zero_and_maximal(self):
        rng = np.random.default_rng(11)
        checked = 0
        for _ in range(400):
            ell = rng.uniform(0.05, 0.9)
            r = rng.uniform(ell, 1.0)
            w = rng.uniform(0.05, 1.2)
            p = SystemParams(ell, r)
            v = largest_achievable(w, p)
            assert v <= w + 1e-12
            if v == w:
                continue
            checked += 1
            assert v == 0.0 or achievable_by_search(v, p)
            # No achievable point on a 1e-3 grid strictly between v and w.
            for u in np.arange(v + 1e-3, w, 1e-3):
                assert not achievable_by_search(float(u), p)
        assert checked > 50


class TestGoodRegion:
    def test_near_ideal_pair(self):
        assert good_region(NEAR_IDEAL)

    def test_two_exact_halves(self):
        assert good_region(SystemParams(0.5, 0.5))

    def test_non_ideal_pair(self):
        assert not good_region(NON_IDEAL)


class TestClassify:
    def test_r_at_least_one_is_ideal(self):
        plan = classify(SystemParams(0.5, 1.0), DemandSet.from_energies([1.0, 2.0]))
        assert plan.case is Case.IDEAL
        assert (plan.k0, plan.s0, plan.z_star) == (1, 1.0, 1.0)

    def test_proportional_fit_is_ideal(self):
        demands = DemandSet.from_energies([3.0, 3.0, 4.0])
        plan = classify(SystemParams(0.2, 0.5), demands)
        assert plan.case is Case.IDEAL

    def test_near_ideal_layout(self):
        plan = classify(NEAR_IDEAL, DemandSet.from_energies([0.1, 0.2]))
        assert plan.case is Case.NEAR_IDEAL
        assert plan.k0 == 2
        assert plan.s0 == pytest.approx(0.5)
        assert plan.z_star == 1.0

    def test_non_ideal_layout(self):
        plan = classify(NON_IDEAL, DemandSet.from_energies([0.1, 0.2]))
        assert plan.case is Case.NON_IDEAL
        assert plan.k0 == 2
        assert plan.s0 == pytest.approx(0.43103)
        assert plan.z_star == pytest.approx(0.86206)

    def test_slot_plan_consistency(self):
        rng = np.random.default_rng(5)
        for _ in range(300):
            ell = rng.uniform(0.05, 1.0)
            r = rng.uniform(ell, 1.3)
            plan = classify(SystemParams(ell, r))
            assert plan.k0 >= 1
            assert plan.k0 * plan.s0 == pytest.approx(plan.z_star, abs=1e-9)
            if plan.case is Case.NEAR_IDEAL:
                assert ell - 1e-12 <= plan.s0 <= min(r, 1.0) + 1e-12

    def test_without_demands_skips_proportional_branch(self):
        assert classify(SystemParams(0.2, 0.5)).case is Case.NEAR_IDEAL

    def test_pure_function(self):
        demands = DemandSet.from_energies([1.0, 1.0])
        assert classify(NON_IDEAL, demands) == classify(NON_IDEAL, demands)


class TestDecompose:
    def test_two_halves(self):
        assert decompose(1.0, SystemParams(0.4, 0.5)) == [0.5, 0.5]

    def test_single_piece(self):
        assert decompose(0.45, SystemParams(0.45, 0.45)) == [0.45]

    def test_three_thirds(self):
        pieces = decompose(1.0, SystemParams(0.3, 0.4))
        assert len(pieces) == 3
        assert pieces[0] == pytest.approx(1.0 / 3.0, abs=1e-15)

    def test_unachievable_raises(self):
        with pytest.raises(AchievabilityError):
            decompose(1.0, NON_IDEAL)

    @given(st.data())
    @settings(max_examples=200, deadline=None)
    def test_round_trip(self, data):
        ell = data.draw(st.floats(0.05, 0.9))
        r = data.draw(st.floats(ell, 1.0))
        q = data.draw(st.integers(1, 8))
        piece = data.draw(st.floats(ell, r))
        w = q * piece
        params = SystemParams(ell, r)
        pieces = decompose(w, params)
        assert math.fsum(pieces) == pytest.approx(w, abs=1e-9)
        for s in pieces:
            assert ell - 1e-9 <= s <= params.r_eff + 1e-9
