"""Scenario schema, validation rules, and the penalty-coordination bounds."""

import dataclasses
import math

import numpy as np
import pytest

from sps import fixtures
from sps.model import (
    SCHEMA_VERSION,
    ConfigurationError,
    FaultSet,
    PenaltyConfig,
    PropulsionSpec,
    Schedule,
    derive_h_bound,
    derive_xi_l_bound,
    load_scenario,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
    validate_scenario,
)


# ---------------------------------------------------------------------------
# penalty bounds


class TestPenaltyBounds:
    def test_shed_bound_six_zone_data(self):
        # [DERIVED] max(2*13.5*8 + 10, 2*6*4 + 30, 2*1*1*0.5) = 226.0
        sc = fixtures.case1_scenario()
        assert derive_xi_l_bound(sc) == pytest.approx(226.0, rel=5e-3)

    def test_shed_bound_is_exact(self):
        sc = fixtures.case1_scenario()
        assert derive_xi_l_bound(sc) == 226.0

    def test_distance_bound_six_zone_data(self):
        # [DERIVED] 3 * (2.2e-3)^(1/3) * 265 * (2.2e-3 * 17^3)^(2/3)
        sc = fixtures.case1_scenario()
        assert derive_h_bound(sc, xi_l=265.0) == pytest.approx(505.4, rel=5e-3)

    def test_distance_bound_closed_form(self):
        sc = fixtures.case1_scenario()
        pr = sc.propulsion
        expected = (
            pr.beta
            * pr.alpha ** (1.0 / pr.beta)
            * 265.0
            * pr.p_max ** (1.0 - 1.0 / pr.beta)
        )
        assert derive_h_bound(sc, 265.0) == pytest.approx(expected, rel=1e-12)

    def test_shed_bound_dominated_by_esm(self):
        # crank the storage life-cycle slope until it dominates the generators
        sc = fixtures.case1_scenario()
        esms = tuple(dataclasses.replace(e, lc_a=500.0) for e in sc.esms)
        sc2 = dataclasses.replace(sc, esms=esms)
        # [TRIVIAL] 2 * xi_e * 500 * 0.5 = 500 > 226
        assert derive_xi_l_bound(sc2) == 500.0

    def test_distance_bound_linear_propulsion(self):
        # beta = 1: the power term drops out and the bound is alpha * xi_l
        sc = fixtures.case1_scenario()
        pr = PropulsionSpec(zone=2, alpha=0.4, beta=1.0, v_min=0.0, v_max=10.0)
        sc2 = dataclasses.replace(sc, propulsion=pr)
        assert derive_h_bound(sc2, 100.0) == pytest.approx(40.0, rel=1e-12)

    def test_distance_bound_rejects_nonpositive_xi_l(self):
        sc = fixtures.case1_scenario()
        with pytest.raises(ConfigurationError):
            derive_h_bound(sc, 0.0)

    def test_auto_derive_applies_margin(self):
        sc = fixtures.random_small_scenario(0)
        pen = sc.resolved_penalties()
        assert pen.xi_l == pytest.approx(1.1 * derive_xi_l_bound(sc), rel=1e-12)
        assert pen.h == pytest.approx(1.1 * derive_h_bound(sc, pen.xi_l), rel=1e-12)

    def test_configured_values_validate(self):
        # xi_l = 265 and h = 1.15e3 sit above the bounds for the six-zone data
        sc = fixtures.case1_scenario()
        assert sc.penalties.xi_l == 265.0
        assert sc.penalties.h == 1150.0
        assert validate_scenario(sc) == []

    def test_below_bound_penalties_rejected(self):
        sc = fixtures.case1_scenario()
        sc2 = dataclasses.replace(
            sc, penalties=PenaltyConfig(xi_e=1.0, xi_l=200.0, h=1150.0)
        )
        assert any("xi_l" in p for p in validate_scenario(sc2))
        sc3 = dataclasses.replace(
            sc, penalties=PenaltyConfig(xi_e=1.0, xi_l=265.0, h=100.0)
        )
        assert any("penalties.h" in p for p in validate_scenario(sc3))


# ---------------------------------------------------------------------------
# validation


@pytest.mark.parametrize("name", sorted(fixtures.NAMED_FIXTURES))
def test_named_fixtures_valid(name):
    assert validate_scenario(fixtures.NAMED_FIXTURES[name]()) == []


def test_random_fixtures_valid():
    for seed in range(10):
        assert validate_scenario(fixtures.random_small_scenario(seed)) == []


def test_validation_catches_bad_generator():
    sc = fixtures.case1_scenario()
    gens = (dataclasses.replace(sc.generators[0], p_min=9.0),) + sc.generators[1:]
    problems = validate_scenario(dataclasses.replace(sc, generators=gens))
    assert any("p_min <= p_max" in p for p in problems)


def test_validation_catches_bad_esm_energy_ordering():
    sc = fixtures.case1_scenario()
    esms = (dataclasses.replace(sc.esms[0], e_initial=5.0),) + sc.esms[1:]
    problems = validate_scenario(dataclasses.replace(sc, esms=esms))
    assert any("energy bound ordering" in p for p in problems)


def test_validation_catches_unknown_fault_target():
    sc = fixtures.case1_scenario()
    bad = dataclasses.replace(sc, faults=FaultSet(failed_generators=("nope",)))
    assert any("unknown generator" in p for p in validate_scenario(bad))
    bad2 = dataclasses.replace(sc, faults=FaultSet(failed_pb_segments=(9,)))
    assert any("not in topology" in p for p in validate_scenario(bad2))


def test_validation_catches_double_closed_switch():
    sc = fixtures.case1_scenario()
    sw = ((1, 1),) + sc.topology.switch_initial[1:]
    bad = dataclasses.replace(
        sc, topology=dataclasses.replace(sc.topology, switch_initial=sw)
    )
    assert any("redundant switches" in p for p in validate_scenario(bad))


# ---------------------------------------------------------------------------
# serialization


def test_scenario_round_trip(tmp_path):
    sc = fixtures.case1_scenario()
    path = tmp_path / "case1.json"
    save_scenario(sc, str(path))
    back = load_scenario(str(path))
    assert back == sc


def test_scenario_dict_schema_tag():
    d = scenario_to_dict(fixtures.island_scenario())
    assert d["schema"] == SCHEMA_VERSION == "sps-scenario/1"
    assert scenario_from_dict(d) == fixtures.island_scenario()


def test_scenario_from_dict_rejects_wrong_schema():
    d = scenario_to_dict(fixtures.case1_scenario())
    d["schema"] = "sps-scenario/99"
    with pytest.raises(ConfigurationError):
        scenario_from_dict(d)


def test_schedule_round_trip():
    T = 3
    sched = Schedule(
        delta_g=np.ones((2, T)),
        y_g=np.zeros((2, T)),
        p_g=np.full((2, T), 1.5),
        p_e=np.zeros((1, T)),
        e_e=np.full((1, T), 1.1),
        p_pr=np.full((1, T), 2.0),
        rho=np.zeros((1, T)),
        s_p=np.ones((4, T)),
        s_s=np.zeros((4, T)),
        d_d=0.25,
    )
    back = Schedule.from_dict(sched.to_dict())
    assert back.d_d == 0.25
    np.testing.assert_array_equal(back.p_g, sched.p_g)
    np.testing.assert_array_equal(back.s_s, sched.s_s)


def test_propulsion_power_cap_matches_speed_cap():
    pr = fixtures.case1_scenario().propulsion
    # [TRIVIAL] p_max = alpha * v_max^beta = 2.2e-3 * 17^3
    assert pr.p_max == pytest.approx(2.2e-3 * 17.0**3, rel=1e-12)
    assert pr.p_max == pytest.approx(10.8086, abs=5e-4)
