"""Acceptance gate.

Eight criteria, each its own test class/function:

1. Penalty-coordination bound values on the six-zone data (fast).
2. Exact solver matches the brute-force oracle on 25 randomized instances.
3. Shedding activates only below the coordination bound (both directions).
4. Distance slack is exact: zero iff the target is certifiably reachable,
   and the residual matches the bisected reachability frontier.
5. The time-decoupled variant stays within 15% at <= 10 outer iterations.
6. Distance-sweep trend on the six-zone semi-island study (slow).
7. Emission-intensity compliance on every accepted schedule.
8. Solver health: audited KKT residuals and monotone bound traces.
"""

import dataclasses
import time

import numpy as np
import pytest

from conftest import build_for
from sps import benders, fixtures, lnbd, oracle
from sps.model import validate_scenario
from sps.verifier import cost_breakdown, eeoi_profile, verify

N_SUITE = 25


@pytest.fixture(scope="module")
def suite():
    """Shared randomized-instance results: benders, oracle, and the fast
    variant on the same 25 draws (all four fault modes, <= 12 binaries)."""
    t0 = time.perf_counter()
    out = []
    for seed in range(N_SUITE):
        sc = fixtures.random_small_scenario(seed)
        part, inst = build_for(sc)
        assert inst.n_bin <= 12
        sched_b, rep_b = benders.run(inst)
        sched_o, obj_o = oracle.enumerate_solve(inst)
        sched_l, rep_l = lnbd.run(inst)
        out.append(
            dict(
                seed=seed,
                sc=sc,
                part=part,
                inst=inst,
                sched_b=sched_b,
                rep_b=rep_b,
                sched_o=sched_o,
                obj_o=obj_o,
                sched_l=sched_l,
                rep_l=rep_l,
            )
        )
    elapsed = time.perf_counter() - t0
    assert elapsed < 600.0, f"suite exceeded the 10-minute budget ({elapsed:.0f}s)"
    return out


def _shed_energy(case, sched):
    return cost_breakdown(case["sc"], case["part"], sched)["p_ls_total"]


# ---------------------------------------------------------------------------
# criterion 1


def test_penalty_bound_values_fast():
    from sps.model import derive_h_bound, derive_xi_l_bound

    t0 = time.perf_counter()
    sc = fixtures.case1_scenario()
    assert derive_xi_l_bound(sc) == pytest.approx(226.0, rel=5e-3)
    assert derive_h_bound(sc, 265.0) == pytest.approx(505.4, rel=5e-3)
    # the configured prices (265, 1.15e3) clear validation on the same data
    assert validate_scenario(sc) == []
    assert sc.penalties.xi_l == 265.0 and sc.penalties.h == 1150.0
    assert time.perf_counter() - t0 < 1.0


# ---------------------------------------------------------------------------
# criterion 2


def test_oracle_equivalence(suite):
    for case in suite:
        rel = abs(case["rep_b"].total_cost - case["obj_o"]) / max(1.0, abs(case["obj_o"]))
        assert rel <= 1e-3, (case["seed"], rel)
        assert verify(case["sc"], case["part"], case["sched_b"], tol=1e-6).passed, case["seed"]
        assert verify(case["sc"], case["part"], case["sched_o"], tol=1e-6).passed, case["seed"]


# ---------------------------------------------------------------------------
# criterion 3


def test_no_shedding_above_the_bound(suite):
    from sps.model import derive_xi_l_bound

    qualifying = 0
    for case in suite:
        pen = case["sc"].resolved_penalties()
        assert pen.xi_l > derive_xi_l_bound(case["sc"])
        if _shed_energy(case, case["sched_o"]) <= 1e-6:  # zero-shed optimum certified
            qualifying += 1
            rho_total = float(np.asarray(case["sched_b"].rho).sum())
            assert rho_total <= 1e-6, case["seed"]
    assert qualifying >= N_SUITE  # every draw is servable without shedding


def test_shedding_appears_below_the_bound():
    from sps.model import derive_xi_l_bound

    found = 0
    for seed in (2, 5, 7, 10, 13):
        sc_ref = fixtures.random_small_scenario(seed)
        low = 0.05 * derive_xi_l_bound(sc_ref)
        sc = fixtures.random_small_scenario(seed, xi_l=low)
        part, inst = build_for(sc)
        sched, _ = oracle.enumerate_solve(inst)
        if cost_breakdown(sc, part, sched)["p_ls_total"] > 1e-4:
            # shedding despite the same loads being servable at the proper price
            ref_part, ref_inst = build_for(sc_ref)
            ref_sched, _ = oracle.enumerate_solve(ref_inst)
            assert cost_breakdown(sc_ref, ref_part, ref_sched)["p_ls_total"] <= 1e-6
            found += 1
    assert found >= 3


# ---------------------------------------------------------------------------
# criterion 4


def _sailed(sc, sched):
    pr = sc.propulsion
    total = np.clip(np.asarray(sched.p_pr).sum(axis=0), 0.0, None)
    return float(((total / pr.alpha) ** (1.0 / pr.beta)).sum() * sc.dt)


def test_distance_slack_exactness(suite):
    checked = 0
    for case in suite[:6]:
        sc, part = case["sc"], case["part"]
        sched = case["sched_b"]
        if oracle.certify_p3_feasible(sc, part):
            assert sched.d_d <= 1e-6, case["seed"]
            # the relaxed distance inequality is tight
            gap = abs(sc.voyage.distance - _sailed(sc, sched))
            assert gap <= 1e-4 * sc.voyage.distance, case["seed"]
            checked += 1

    # unreachable targets: the conceded distance matches the frontier.
    # The distance price must dominate not only marginal sailing cost (the
    # coordination bound) but also the fixed cost of committing an extra
    # unit for capacity, so use a deliberately high h (the six-zone study
    # does the same: 1150 vs. a bound of 505).
    from sps.model import derive_xi_l_bound

    for seed in range(6):
        ref = fixtures.random_small_scenario(seed)
        sc = fixtures.random_small_scenario(
            seed, distance_factor=1.4, xi_l=1.1 * derive_xi_l_bound(ref)
        )
        part, inst = build_for(sc)
        assert not oracle.certify_p3_feasible(sc, part)
        sched, rep = benders.run(inst)
        assert sched.d_d > 1e-6
        d_max = oracle.max_distance_bisection(sc, part, tol_nm=0.05)
        assert abs((sc.voyage.distance - sched.d_d) - d_max) <= 0.1, seed
        checked += 1
    assert checked >= 10


# ---------------------------------------------------------------------------
# criterion 5


def test_fast_variant_quality(suite):
    for case in suite:
        rep_l = case["rep_l"]
        gap = (rep_l.total_cost - case["rep_b"].total_cost) / max(
            1.0, abs(case["rep_b"].total_cost)
        )
        assert gap <= 0.15, (case["seed"], gap)
        assert rep_l.iterations <= 10, case["seed"]
        assert verify(case["sc"], case["part"], case["sched_l"], tol=1e-6).passed, case["seed"]


# ---------------------------------------------------------------------------
# criterion 6


@pytest.mark.slow
def test_distance_sweep_trend():
    t0 = time.perf_counter()
    rows = []
    for d in (100.0, 120.0, 140.0, 160.0, 180.0):
        sc = fixtures.case1_scenario(d)
        part, inst = build_for(sc)
        sched, rep = benders.run(inst)
        assert verify(sc, part, sched, tol=1e-6).passed, d
        assert rep.max_kkt <= 1e-6, d
        rows.append((d, rep.p_ls_total, rep.d_d))
    shed = [r[1] for r in rows]
    slack = [r[2] for r in rows]
    assert all(b >= a - 1e-6 for a, b in zip(shed, shed[1:])), shed
    assert all(b >= a - 1e-6 for a, b in zip(slack, slack[1:])), slack
    assert slack[0] <= 1e-6  # 100 nm is reachable
    assert slack[-1] > 1e-6  # 180 nm is not
    assert time.perf_counter() - t0 < 1800.0


# ---------------------------------------------------------------------------
# criterion 7


def test_emission_intensity_compliance(suite):
    for case in suite:
        sc = case["sc"]
        for sched in (case["sched_b"], case["sched_o"], case["sched_l"]):
            for val in eeoi_profile(sc, sched):
                if val is not None:
                    assert val <= sc.voyage.eeoi_max * (1.0 + 1e-6), case["seed"]


# ---------------------------------------------------------------------------
# criterion 8


def test_solver_health(suite):
    for case in suite:
        for rep in (case["rep_b"], case["rep_l"]):
            assert rep.max_kkt <= 1e-6, (case["seed"], rep.max_kkt)
            # no commitment needed the degenerate-duals escape hatch
            assert not any("degenerate" in n for n in rep.notes), case["seed"]
            lows, ups = rep.lower_bounds, rep.upper_bounds
            assert all(b >= a - 1e-9 for a, b in zip(lows, lows[1:])), case["seed"]
            assert all(b <= a + 1e-9 for a, b in zip(ups, ups[1:])), case["seed"]
        assert case["rep_b"].converged, case["seed"]
