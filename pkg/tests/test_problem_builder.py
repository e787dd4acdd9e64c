"""Instance construction: variable layout, binary counts, constraint tags."""

import numpy as np
import pytest

from conftest import build_for
from sps import fixtures
from sps.model import PropulsionSpec
from sps.problem_builder import (
    EQ,
    LE,
    SCOPE_BIN,
    SCOPE_CONT,
    uniform_propulsion_power,
)


class TestBinaryCounts:
    # [PAPER] binary-variable counts for the six-zone studies

    def test_semi_island_one_coupled_zone(self):
        _, inst = build_for(fixtures.case1_scenario())
        # (2M + 2X) * T = (4 + 2) * 10
        assert inst.n_bin == 60

    def test_semi_island_three_coupled_zones(self):
        _, inst = build_for(fixtures.case1_wide_coupling_scenario())
        # (4 + 6) * 10
        assert inst.n_bin == 100

    def test_island_no_coupling(self):
        _, inst = build_for(fixtures.island_scenario())
        # 2M * T = 6 * 12
        assert inst.n_bin == 72

    def test_switch_dwell_binaries_appear_only_when_needed(self):
        import dataclasses

        sc = fixtures.case1_scenario()
        slow = dataclasses.replace(
            sc, topology=dataclasses.replace(sc.topology, t_min_switch=3)
        )
        _, inst = build_for(slow)
        # start-detection binaries for both switches of the coupled zone
        assert inst.n_bin == 60 + 2 * 10
        assert any(n.startswith("ysw") for n in inst.bin_names)


class TestLayout:
    def test_pack_unpack_round_trip(self, rng):
        sc = fixtures.case1_scenario()
        _, inst = build_for(sc)
        lo = np.maximum(inst.lb_c, -2.0)
        hi = np.minimum(inst.ub_c, 2.0)
        xc = rng.uniform(lo, hi)
        xb = rng.integers(0, 2, inst.n_bin).astype(float)
        sched = inst.unpack(xc, xb)
        xc2, xb2 = inst.pack(sched)
        np.testing.assert_allclose(xc2, xc, atol=1e-12)
        np.testing.assert_allclose(xb2, xb, atol=1e-12)

    def test_failed_generator_has_no_variables(self):
        _, inst = build_for(fixtures.non_island_scenario())
        assert all(g.id != "atg6" for g in inst.active_gens)
        assert all("atg6" not in n for n in inst.bin_names)

    def test_binary_rows_touch_only_binaries(self):
        _, inst = build_for(fixtures.case1_scenario())
        for r in inst.rows:
            if r.scope == SCOPE_BIN:
                assert not r.coeffs_c

    def test_expected_tags_present(self):
        _, inst = build_for(fixtures.case1_scenario())
        tags = {r.tag for r in inst.rows} | {s.tag for s in inst.smooth}
        for tag in (
            "gen-power-bounds",
            "gen-ramp",
            "gen-start-detect",
            "gen-min-on-time",
            "esm-energy-recursion",
            "switch-exclusivity",
            "power-balance",
            "propulsion-power-range",
            "capacity-coverage",
            "eeoi-limit",
            "distance-relaxed",
        ):
            assert tag in tags, tag

    def test_linear_propulsion_builds_without_smooth_distance(self):
        import dataclasses

        sc = fixtures.random_small_scenario(3)
        lin = dataclasses.replace(
            sc, propulsion=PropulsionSpec(zone=2, alpha=0.5, beta=1.0, v_min=0.0, v_max=6.0)
        )
        _, inst = build_for(lin)
        assert all(s.tag != "distance-interval" for s in inst.smooth)
        assert any(r.tag == "distance-relaxed" for r in inst.rows) or any(
            s.tag == "distance-relaxed" for s in inst.smooth
        )


class TestAgainstVerifier:
    """The instance's own feasibility check and the independent verifier
    must agree on solved schedules and on planted violations."""

    def test_solved_schedule_passes_both(self):
        from sps import oracle
        from sps.verifier import verify

        sc = fixtures.random_small_scenario(2)
        part, inst = build_for(sc)
        sched, _ = oracle.enumerate_solve(inst)
        xc, xb = inst.pack(sched)
        assert max(inst.check(xc, xb).values()) <= 1e-6
        assert verify(sc, part, sched).passed

    def test_planted_violation_caught_by_both(self):
        from sps import oracle
        from sps.verifier import verify

        sc = fixtures.random_small_scenario(2)
        part, inst = build_for(sc)
        sched, _ = oracle.enumerate_solve(inst)
        sched.p_g[0, 0] += 0.5  # break the balance/bounds at t=1
        xc, xb = inst.pack(sched)
        assert max(inst.check(xc, xb).values()) > 1e-3
        assert not verify(sc, part, sched).passed


def test_uniform_propulsion_power_matches_speed_law():
    sc = fixtures.case1_scenario()
    p_bar = uniform_propulsion_power(sc.voyage, sc.propulsion)
    v_bar = sc.voyage.distance / (sc.horizon * sc.dt)
    assert p_bar == pytest.approx(sc.propulsion.alpha * v_bar**sc.propulsion.beta)
    # sailing at that constant power covers the target exactly
    sailed = (p_bar / sc.propulsion.alpha) ** (1 / sc.propulsion.beta) * sc.horizon * sc.dt
    assert sailed == pytest.approx(sc.voyage.distance, rel=1e-12)
