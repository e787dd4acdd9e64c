"""Independent schedule checking: planted violations, cost accounting."""

import copy
import dataclasses

import numpy as np
import pytest

from conftest import build_for
from sps import fixtures, oracle
from sps.verifier import cost_breakdown, eeoi_profile, verify


@pytest.fixture(scope="module")
def solved():
    sc = fixtures.random_small_scenario(2)
    part, inst = build_for(sc)
    sched, obj = oracle.enumerate_solve(inst)
    return sc, part, inst, sched, obj


def _clone(sched):
    return copy.deepcopy(sched)


def test_optimal_schedule_verifies(solved):
    sc, part, inst, sched, _ = solved
    rep = verify(sc, part, sched)
    assert rep.passed
    assert rep.worst()[1] <= 1e-6


class TestPlantedViolations:
    def test_power_bound(self, solved):
        sc, part, _, sched, _ = solved
        bad = _clone(sched)
        bad.p_g[0, 0] = sc.generators[0].p_max + 1.0
        rep = verify(sc, part, bad)
        assert not rep.passed
        assert rep.violations["gen-power-bounds"] > 0.9

    def test_offline_unit_producing(self, solved):
        sc, part, _, sched, _ = solved
        bad = _clone(sched)
        bad.delta_g[0, 0] = 0.0
        bad.y_g[0, :] = 0.0
        rep = verify(sc, part, bad)
        assert not rep.passed

    def test_energy_recursion(self, solved):
        sc, part, _, sched, _ = solved
        if not sc.esms:
            pytest.skip("draw has no storage")
        bad = _clone(sched)
        bad.e_e[0, -1] += 0.05
        rep = verify(sc, part, bad)
        assert rep.violations.get("esm-energy-recursion", 0.0) > 1e-3

    def test_fractional_commitment(self, solved):
        sc, part, _, sched, _ = solved
        bad = _clone(sched)
        bad.delta_g[0, 0] = 0.5
        rep = verify(sc, part, bad)
        assert rep.violations.get("binary-integrality", 0.0) > 0.1

    def test_shed_fraction_range(self, solved):
        sc, part, _, sched, _ = solved
        bad = _clone(sched)
        bad.rho[0, 0] = 1.4
        rep = verify(sc, part, bad)
        assert rep.violations.get("shed-fraction-range", 0.0) > 0.3

    def test_both_switches_closed(self):
        sc = fixtures.case1_scenario()
        part, inst = build_for(sc)
        from sps import lnbd

        sched, _ = lnbd.run(inst)
        bad = _clone(sched)
        z = part.coupled_zones[0] - 1
        bad.s_p[z, 0] = bad.s_s[z, 0] = 1.0
        rep = verify(sc, part, bad)
        assert rep.violations.get("switch-exclusivity", 0.0) > 0.9

    def test_negative_distance_slack(self, solved):
        sc, part, _, sched, _ = solved
        bad = _clone(sched)
        bad.d_d = -0.1
        rep = verify(sc, part, bad)
        assert rep.violations.get("distance-slack-range", 0.0) > 0.05

    def test_failed_generator_must_stay_off(self):
        sc = fixtures.random_small_scenario(1, mode="NonIsland")
        part, inst = build_for(sc)
        sched, _ = oracle.enumerate_solve(inst)
        bad = _clone(sched)
        gi = [g.id for g in sc.generators].index("g2")
        bad.delta_g[gi, 0] = 1.0
        bad.p_g[gi, 0] = 1.0
        rep = verify(sc, part, bad)
        assert rep.violations.get("failed-generator-off", 0.0) > 0.9


class TestAccounting:
    def test_breakdown_sums_to_total(self, solved):
        sc, part, inst, sched, obj = solved
        br = cost_breakdown(sc, part, sched)
        assert br["total"] == pytest.approx(
            br["fuel"] + br["esm"] + br["shed"] + br["distance"]
        )
        # and matches the instance objective at the packed point
        assert br["total"] == pytest.approx(obj, abs=1e-6)

    def test_distance_penalty_linear_in_slack(self, solved):
        sc, part, _, sched, _ = solved
        pen = sc.resolved_penalties()
        more = _clone(sched)
        more.d_d = sched.d_d + 1.0
        br0 = cost_breakdown(sc, part, sched)
        br1 = cost_breakdown(sc, part, more)
        assert br1["total"] - br0["total"] == pytest.approx(pen.h, rel=1e-9)

    def test_emission_intensity_profile(self, solved):
        sc, part, _, sched, _ = solved
        prof = eeoi_profile(sc, sched)
        assert len(prof) == sc.horizon
        for val in prof:
            if val is not None:
                assert val <= sc.voyage.eeoi_max * (1 + 1e-6)

    def test_distance_tight_flag(self, solved):
        sc, part, _, sched, _ = solved
        rep = verify(sc, part, sched)
        if sched.d_d <= 1e-6:
            assert rep.distance_tight
