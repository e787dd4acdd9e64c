"""Brute-force reference: logic filters, enumeration, distance certification."""

import dataclasses

import numpy as np
import pytest

from conftest import build_for
from sps import fixtures, oracle


class TestDeltaPatterns:
    def test_no_min_on_time_keeps_everything(self):
        assert len(oracle._delta_patterns(3, 1, False)) == 8

    def test_min_on_time_two_from_off(self):
        pats = oracle._delta_patterns(3, 2, False)
        # a start at t must stay on at t+1 (horizon-clipped at the end)
        assert (1, 0, 1) not in pats
        assert (1, 1, 0) in pats
        assert (0, 1, 0) not in pats
        assert (0, 0, 1) in pats  # clipped final start is legal
        assert (1, 1, 1) in pats

    def test_initially_on_unit_may_stay_on_freely(self):
        pats = oracle._delta_patterns(3, 2, True)
        # no fresh start -> no dwell obligation
        assert (1, 0, 0) in pats
        assert (1, 1, 0) in pats
        # off-and-restart still triggers the dwell
        assert (0, 1, 0) not in pats

    def test_count_against_direct_recursion(self):
        # [DERIVED] independent dynamic program over (state, dwell remaining)
        def count(T, m, init_on):
            def rec(t, on, held):
                if t == T:
                    return 1
                total = 0
                if on and held < m:  # must stay on
                    return rec(t + 1, True, held + 1)
                total += rec(t + 1, False, 0)  # off
                total += rec(t + 1, True, 1 if not on else m)  # on (start or keep)
                return total

            return rec(0, init_on, m if init_on else 0)

        for T in (2, 3, 4, 5):
            for m in (1, 2, 3):
                for init in (False, True):
                    assert len(oracle._delta_patterns(T, m, init)) == count(T, m, init), (T, m, init)


class TestSwitchPatterns:
    def test_dwell_one_is_unconstrained(self):
        assert len(oracle._switch_patterns(4, 1, 1)) == 16

    def test_dwell_two_filters_chatter(self):
        pats = oracle._switch_patterns(3, 2, 1)
        assert (0, 1, 0) not in pats  # S_P closes for one interval only
        assert (1, 0, 0) in pats  # S_S closes and stays closed
        assert (1, 0, 1) not in pats  # S_S closes for one interval only


class TestEnumeration:
    def test_limit_guard(self):
        _, inst = build_for(fixtures.case1_scenario())
        with pytest.raises(oracle.TooLarge):
            oracle.enumerate_solve(inst, limit=20)

    def test_matches_by_construction_optimum(self):
        # distance 0, flat vital load, one cheap and one expensive unit:
        # optimum commits the cheap unit only (its fixed cost dominates)
        sc = fixtures.random_small_scenario(0, mode="Normal")
        part, inst = build_for(sc)
        sched, obj = oracle.enumerate_solve(inst)
        # exhaustive double-check of the reported objective
        xc, xb = inst.pack(sched)
        assert inst.objective_value(xc, xb) == pytest.approx(obj, abs=1e-8)
        assert max(inst.check(xc, xb).values()) <= 1e-6

    def test_deterministic(self):
        sc = fixtures.random_small_scenario(5)
        part, inst = build_for(sc)
        s1, o1 = oracle.enumerate_solve(inst)
        s2, o2 = oracle.enumerate_solve(inst)
        assert o1 == o2
        np.testing.assert_array_equal(s1.delta_g, s2.delta_g)


class TestDistanceCertification:
    def test_reachable_target_is_certified(self):
        sc = fixtures.random_small_scenario(3, distance_factor=0.2)
        part, _ = build_for(sc)
        assert oracle.certify_p3_feasible(sc, part)

    def test_unreachable_target_is_rejected(self):
        sc = fixtures.random_small_scenario(3, distance_factor=5.0)
        part, _ = build_for(sc)
        assert not oracle.certify_p3_feasible(sc, part)

    def test_bisection_brackets_the_frontier(self):
        sc = fixtures.random_small_scenario(3)
        part, _ = build_for(sc)
        d_max = oracle.max_distance_bisection(sc, part, tol_nm=0.1)
        sc_in = dataclasses.replace(
            sc, voyage=dataclasses.replace(sc.voyage, distance=max(0.0, d_max - 0.2))
        )
        assert oracle.certify_p3_feasible(sc_in, part)
        sc_out = dataclasses.replace(
            sc, voyage=dataclasses.replace(sc.voyage, distance=d_max + 0.2)
        )
        assert not oracle.certify_p3_feasible(sc_out, part)
