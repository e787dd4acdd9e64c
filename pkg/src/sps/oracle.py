"""Brute-force reference solver: enumerate commitments, polish, certify.

The integer logic (start indicators, minimum running times, switch
exclusivity and dwell) is re-derived here directly from the scenario rules
— deliberately not from the builder's rows — so agreement between this
module and the decomposition solvers is evidence, not tautology.
"""

from __future__ import annotations

import itertools
from dataclasses import replace

import numpy as np

from .convex_solver import OPTIMAL, CvxSubproblem
from .fault_analysis import IslandPartition, partition as compute_partition
from .model import ShipScenario
from .problem_builder import ProblemInstance, build


class TooLarge(Exception):
    """Instance exceeds the enumeration limit."""


# ---------------------------------------------------------------------------
# pattern generation with direct logic checks


def _delta_patterns(T: int, t_min_on: int, initial_on: bool):
    """All on/off sequences obeying the min running time (horizon-clipped)."""
    out = []
    for bits in itertools.product((0, 1), repeat=T):
        ok = True
        prev = 1 if initial_on else 0
        for t in range(T):
            if bits[t] == 1 and prev == 0:  # a start
                for tau in range(t, min(t + t_min_on, T)):
                    if bits[tau] == 0:
                        ok = False
                        break
            if not ok:
                break
            prev = bits[t]
        if ok:
            out.append(bits)
    return out


def _switch_patterns(T: int, t_min_switch: int, initial_sp: int):
    """All S_P sequences (S_S = 1 - S_P) obeying the dwell time."""
    if t_min_switch <= 1:
        return list(itertools.product((0, 1), repeat=T))
    out = []
    for bits in itertools.product((0, 1), repeat=T):
        ok = True
        for series, init in ((bits, initial_sp), (tuple(1 - b for b in bits), 1 - initial_sp)):
            prev = init
            for t in range(T):
                if series[t] == 1 and prev == 0:
                    for tau in range(t, min(t + t_min_switch, T)):
                        if series[tau] == 0:
                            ok = False
                            break
                if not ok:
                    break
                prev = series[t]
            if not ok:
                break
        if ok:
            out.append(bits)
    return out


def _assignments(instance: ProblemInstance):
    """Yield complete binary vectors in lexicographic order."""
    sc = instance.scenario
    T = instance.horizon
    gen_patterns = [
        _delta_patterns(T, g.t_min_on, g.initial_on) for g in instance.active_gens
    ]
    sw_patterns = [
        _switch_patterns(T, sc.topology.t_min_switch, sc.topology.switch_initial[z - 1][0])
        for z in instance.coupled_zones
    ]
    for combo in itertools.product(*gen_patterns, *sw_patterns):
        deltas = combo[: len(gen_patterns)]
        sws = combo[len(gen_patterns):]
        xb = np.zeros(instance.n_bin)
        for g, bits in zip(instance.active_gens, deltas):
            prev = 1 if g.initial_on else 0
            for t in range(T):
                xb[instance.idx_delta[(g.id, t)]] = bits[t]
                xb[instance.idx_y[(g.id, t)]] = max(0, bits[t] - prev)
                prev = bits[t]
        for z, bits in zip(instance.coupled_zones, sws):
            sp0, ss0 = sc.topology.switch_initial[z - 1]
            prev_p, prev_s = sp0, ss0
            for t in range(T):
                b = bits[t]
                xb[instance.idx_sp[(z, t)]] = b
                xb[instance.idx_ss[(z, t)]] = 1 - b
                if (z, t) in instance.idx_ysw_p:
                    xb[instance.idx_ysw_p[(z, t)]] = max(0, b - prev_p)
                    xb[instance.idx_ysw_s[(z, t)]] = max(0, (1 - b) - prev_s)
                prev_p, prev_s = b, 1 - b
        yield xb


def enumerate_solve(instance: ProblemInstance, limit: int = 20):
    """Global optimum by exhaustive commitment enumeration + convex polish."""
    if instance.n_bin > limit:
        raise TooLarge(f"{instance.n_bin} binaries exceed the limit {limit}")
    sub = CvxSubproblem(instance)
    best = None  # (objective, key, xb, xc)
    for xb in _assignments(instance):
        res = sub.solve(xb)
        if res.status != OPTIMAL:
            continue
        obj = float(instance.obj_lin_b @ xb) + res.objective
        key = tuple(xb)
        if best is None or obj < best[0] - 1e-9 or (abs(obj - best[0]) <= 1e-9 and key < best[1]):
            best = (obj, key, xb.copy(), res.xc.copy())
    if best is None:
        raise RuntimeError("no feasible commitment exists for this instance")
    obj, _, xb, xc = best
    return instance.unpack(xc, xb), obj


# ---------------------------------------------------------------------------
# feasibility certification and maximum reachable distance


def _feasible_with_zero_slack(instance: ProblemInstance, limit: int) -> bool:
    if instance.n_bin > limit:
        raise TooLarge(f"{instance.n_bin} binaries exceed the limit {limit}")
    pinned = replace(instance, ub_c=instance.ub_c.copy())
    pinned.ub_c[pinned.idx_dd] = 0.0
    sub = CvxSubproblem(pinned)
    for xb in _assignments(pinned):
        res = sub.feasibility_cut(xb)
        if res.infeasibility <= 1e-7:
            return True
    return False


def certify_p3_feasible(
    scenario: ShipScenario, part_result: IslandPartition, limit: int = 20
) -> bool:
    """True iff some commitment meets the full distance with zero slack."""
    inst = build(scenario, part_result)
    return _feasible_with_zero_slack(inst, limit)


def max_distance_bisection(
    scenario: ShipScenario,
    part_result: IslandPartition,
    tol_nm: float = 0.1,
    limit: int = 20,
) -> float:
    """Largest reachable voyage distance, by bisection on the target."""
    sc = scenario

    def feasible(d: float) -> bool:
        sc2 = replace(sc, voyage=replace(sc.voyage, distance=d))
        return certify_p3_feasible(sc2, part_result, limit=limit)

    hi = sc.voyage.horizon * sc.voyage.dt * sc.propulsion.v_max
    if feasible(hi):
        return hi
    lo = 0.0
    if not feasible(lo):
        return 0.0
    while hi - lo > tol_nm:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo


def oracle_run(scenario: ShipScenario, limit: int = 20):
    """Convenience wrapper: partition, build, enumerate."""
    part = compute_partition(scenario.topology, scenario.faults, scenario)
    inst = build(scenario, part)
    sched, obj = enumerate_solve(inst, limit=limit)
    return sched, obj, inst, part
