"""Independent post-hoc schedule checking and accounting.

Everything here is recomputed from the scenario description alone — no
constraint rows or solver state are consulted — so this module acts as a
second, independent implementation of the feasibility semantics.  Checks
are keyed by semantic tags; the same tags appear on builder rows, which
lets tests assert that the two implementations agree.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fault_analysis import FaultMode, IslandPartition
from .model import Schedule, ShipScenario


@dataclass
class ConstraintReport:
    violations: dict  # tag -> max violation
    passed: bool
    tol: float
    distance_slack: float = 0.0  # D - sum V dt - d_d (negative = over-sailed)
    distance_tight: bool = True  # relaxed distance inequality tight when d_d = 0
    notes: list = field(default_factory=list)

    def worst(self):
        if not self.violations:
            return None, 0.0
        tag = max(self.violations, key=lambda t: self.violations[t])
        return tag, self.violations[tag]


def _speeds(scenario: ShipScenario, schedule: Schedule) -> np.ndarray:
    pr = scenario.propulsion
    total = np.clip(np.asarray(schedule.p_pr).sum(axis=0), 0.0, None)
    return (total / pr.alpha) ** (1.0 / pr.beta)


def verify(
    scenario: ShipScenario,
    part_result: IslandPartition,
    schedule: Schedule,
    tol: float = 1e-6,
) -> ConstraintReport:
    """Check a schedule against every model constraint; pure recomputation."""
    sc = scenario
    T = sc.horizon
    dt = sc.dt
    zeta = sc.topology.converter_efficiency
    vs = sc.loads.vs_array()
    v: dict = {}

    def hit(tag, amount):
        v[tag] = max(v.get(tag, 0.0), float(amount))

    M = len(sc.generators)
    N = len(sc.esms)
    if np.asarray(schedule.p_g).shape != (M, T) or np.asarray(schedule.p_e).shape != (N, T):
        raise ValueError("schedule dimensions do not match the scenario")
    if np.asarray(schedule.rho).shape[0] != part_result.n_parts:
        raise ValueError("schedule shedding rows do not match the partition")

    # generators ---------------------------------------------------------
    for gi, g in enumerate(sc.generators):
        failed = g.id in part_result.failed_generators
        for t in range(T):
            d = schedule.delta_g[gi, t]
            y = schedule.y_g[gi, t]
            p = schedule.p_g[gi, t]
            hit("binary-integrality", min(abs(d), abs(d - 1)))
            hit("binary-integrality", min(abs(y), abs(y - 1)))
            if failed:
                hit("failed-generator-off", abs(d) + abs(p))
            hit("gen-power-bounds", p - d * g.p_max)
            hit("gen-power-bounds", d * g.p_min - p)
            prev_p = g.initial_power if t == 0 else schedule.p_g[gi, t - 1]
            hit("gen-ramp", abs(p - prev_p) - g.ramp_max)
            prev_d = float(g.initial_on) if t == 0 else schedule.delta_g[gi, t - 1]
            hit("gen-start-detect", (d - prev_d) - y)
            if round(y) == 1:
                for tau in range(t, min(t + g.t_min_on, T)):
                    hit("gen-min-on-time", 1.0 - schedule.delta_g[gi, tau])

    # energy storage -----------------------------------------------------
    for ei, e in enumerate(sc.esms):
        for t in range(T):
            p = schedule.p_e[ei, t]
            en = schedule.e_e[ei, t]
            hit("esm-power-bounds", p - e.p_max)
            hit("esm-power-bounds", e.p_min - p)
            hit("esm-energy-bounds", en - e.e_max)
            hit("esm-energy-bounds", e.e_min - en)
            prev = e.e_initial if t == 0 else schedule.e_e[ei, t - 1]
            hit("esm-energy-recursion", abs(en - (prev - p * dt)))

    # shedding fractions -------------------------------------------------
    rho = np.asarray(schedule.rho)
    hit("shed-fraction-range", float(np.max(-rho, initial=0.0)))
    hit("shed-fraction-range", float(np.max(rho - 1.0, initial=0.0)))

    # switches -----------------------------------------------------------
    sp = np.asarray(schedule.s_p)
    ss = np.asarray(schedule.s_s)
    ts_min = sc.topology.t_min_switch
    for z in range(1, sc.topology.zone_count + 1):
        coupled = z in part_result.coupled_zones
        for t in range(T):
            a, b = sp[z - 1, t], ss[z - 1, t]
            hit("binary-integrality", min(abs(a), abs(a - 1)))
            hit("binary-integrality", min(abs(b), abs(b - 1)))
            hit("switch-exclusivity", abs(a + b - 1.0))
        if not coupled:
            if z in part_result.fixed_switches:
                want = part_result.fixed_switches[z]
            else:
                want = sc.topology.switch_initial[z - 1]
            for t in range(T):
                hit("switch-fixed-state", abs(sp[z - 1, t] - want[0]))
                hit("switch-fixed-state", abs(ss[z - 1, t] - want[1]))
        elif ts_min > 1:
            for series, init in ((sp[z - 1], sc.topology.switch_initial[z - 1][0]),
                                 (ss[z - 1], sc.topology.switch_initial[z - 1][1])):
                for t in range(T):
                    prev = init if t == 0 else series[t - 1]
                    if round(series[t]) == 1 and round(prev) == 0:
                        for tau in range(t, min(t + ts_min, T)):
                            hit("switch-min-dwell", 1.0 - series[tau])

    # per-part power balance --------------------------------------------
    gens = {g.id: gi for gi, g in enumerate(sc.generators)}
    esms = {e.id: ei for ei, e in enumerate(sc.esms)}
    for p in part_result.parts:
        w = p.index
        p_no = np.zeros(T)
        for bi in p.nonvital_blocks:
            p_no += np.asarray(sc.loads.no_blocks[bi].series)
        for t in range(T):
            supply = zeta * sum(schedule.p_g[gens[g], t] for g in p.generators)
            supply += sum(schedule.p_e[esms[e], t] for e in p.esms)
            demand = sum(vs[z - 1, t] for z in p.zones)
            demand += (1.0 - rho[w, t]) * p_no[t]
            demand += sum(schedule.p_pr[r, t] for r in p.propulsion_modules)
            demand += sum(sp[z - 1, t] * vs[z - 1, t] for z in p.omega_pb)
            demand += sum(ss[z - 1, t] * vs[z - 1, t] for z in p.omega_sb)
            hit("power-balance", abs(supply - demand))

    # propulsion ---------------------------------------------------------
    pr = sc.propulsion
    p_pr_tot = np.asarray(schedule.p_pr).sum(axis=0)
    hit("propulsion-power-range", float(np.max(p_pr_tot - pr.p_max, initial=0.0)))
    hit("propulsion-power-range", float(np.max(pr.p_min - p_pr_tot, initial=0.0)))
    hit("propulsion-power-range", float(np.max(-np.asarray(schedule.p_pr), initial=0.0)))

    # emission intensity (transformed form, no division) -----------------
    speeds = _speeds(sc, schedule)
    k_eeoi = sc.voyage.eeoi_max * sc.voyage.f_sl * dt
    for t in range(T):
        co2 = 0.0
        for gi, g in enumerate(sc.generators):
            pgt = schedule.p_g[gi, t]
            co2 += (g.co2_a * pgt**2 + g.co2_b * pgt + g.co2_c * schedule.delta_g[gi, t]) * dt
        lhs = co2 - k_eeoi * speeds[t]
        hit("eeoi-limit", lhs / max(1.0, k_eeoi * max(speeds[t], 1.0)))

    # voyage distance ----------------------------------------------------
    sailed = float(speeds.sum() * dt)
    d = sc.voyage.distance
    slack = d - sailed - schedule.d_d
    hit("distance-relaxed", slack / max(1.0, d))
    hit("distance-slack-range", -schedule.d_d)
    tight = True
    if schedule.d_d <= tol and d > 0:
        tight = abs(d - sailed) <= 1e-4 * d

    passed = all(val <= tol for val in v.values())
    return ConstraintReport(
        violations=v,
        passed=passed,
        tol=tol,
        distance_slack=slack,
        distance_tight=tight,
    )


def cost_breakdown(
    scenario: ShipScenario,
    part_result: IslandPartition,
    schedule: Schedule,
    penalties=None,
) -> dict:
    """Objective components recomputed from the raw cost functions."""
    sc = scenario
    T = sc.horizon
    dt = sc.dt
    pen = penalties or sc.resolved_penalties()

    fuel = 0.0
    for gi, g in enumerate(sc.generators):
        for t in range(T):
            p = schedule.p_g[gi, t]
            fuel += (g.cost_a * p**2 + g.cost_b * p + g.cost_c * schedule.delta_g[gi, t]) * dt
    esm = 0.0
    for ei, e in enumerate(sc.esms):
        for t in range(T):
            p = schedule.p_e[ei, t]
            esm += pen.xi_e * (e.lc_a * p**2 + e.lc_c) * dt
    shed = 0.0
    p_ls_total = 0.0
    for p in part_result.parts:
        p_no = np.zeros(T)
        for bi in p.nonvital_blocks:
            p_no += np.asarray(sc.loads.no_blocks[bi].series)
        for t in range(T):
            amount = schedule.rho[p.index, t] * p_no[t] * dt
            p_ls_total += amount
            shed += pen.xi_l * amount
    distance = pen.h * schedule.d_d
    return {
        "fuel": fuel,
        "esm": esm,
        "shed": shed,
        "distance": distance,
        "total": fuel + esm + shed + distance,
        "p_ls_total": p_ls_total,
    }


def eeoi_profile(scenario: ShipScenario, schedule: Schedule) -> list:
    """Per-interval emission intensity; None where speed is zero
    (the fractional form is undefined there; the transformed constraint
    is what `verify` checks instead)."""
    sc = scenario
    dt = sc.dt
    speeds = _speeds(sc, schedule)
    out: list = []
    for t in range(sc.horizon):
        if speeds[t] <= 1e-12:
            out.append(None)
            continue
        co2 = 0.0
        for gi, g in enumerate(sc.generators):
            p = schedule.p_g[gi, t]
            co2 += (g.co2_a * p**2 + g.co2_b * p + g.co2_c * schedule.delta_g[gi, t]) * dt
        out.append(co2 / (sc.voyage.f_sl * speeds[t] * dt))
    return out
