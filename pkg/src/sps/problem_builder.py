"""Construction of the relaxed mixed-integer scheduling problem.

For a scenario plus island partition this module emits a fully indexed
optimization problem: quadratic objective, linear constraint rows, and the
two smooth convex constraint families (per-interval emission intensity and
the slack-relaxed voyage distance).  The ship speed never appears as a
variable; it enters only through the propulsion power as
``(P_pr / alpha) ** (1 / beta)``, which keeps both nonlinear families
convex for beta >= 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fault_analysis import FaultMode, IslandPartition
from .model import PropulsionSpec, Schedule, ShipScenario, VoyageSpec

SCOPE_CONT = "continuous"
SCOPE_BIN = "binary"

LE = "<="
EQ = "=="


@dataclass
class LinearRow:
    coeffs_c: dict
    coeffs_b: dict
    rhs: float
    sense: str
    tag: str
    scope: str

    def value(self, xc: np.ndarray, xb: np.ndarray) -> float:
        s = sum(c * xc[i] for i, c in self.coeffs_c.items())
        s += sum(c * xb[i] for i, c in self.coeffs_b.items())
        return s

    def violation(self, xc: np.ndarray, xb: np.ndarray) -> float:
        v = self.value(xc, xb) - self.rhs
        return abs(v) if self.sense == EQ else max(0.0, v)


@dataclass
class SmoothConstraint:
    """g(x) = sum quad*x^2 + linear + const + sum coef*(sum(idxs)/alpha)^(1/beta) <= 0."""

    quad: dict
    lin_c: dict
    lin_b: dict
    const: float
    power_terms: list  # (coef, [cont idx], alpha, beta); coef < 0 keeps g convex
    tag: str

    def value(self, xc: np.ndarray, xb: np.ndarray) -> float:
        g = self.const
        g += sum(c * xc[i] ** 2 for i, c in self.quad.items())
        g += sum(c * xc[i] for i, c in self.lin_c.items())
        g += sum(c * xb[i] for i, c in self.lin_b.items())
        for coef, idxs, alpha, beta in self.power_terms:
            total = max(0.0, sum(xc[i] for i in idxs))
            g += coef * (total / alpha) ** (1.0 / beta)
        return g

    def violation(self, xc: np.ndarray, xb: np.ndarray) -> float:
        return max(0.0, self.value(xc, xb))

    def gradient_c(self, xc: np.ndarray) -> dict:
        """Gradient with respect to the continuous variables."""
        grad: dict = {}
        for i, c in self.quad.items():
            grad[i] = grad.get(i, 0.0) + 2.0 * c * xc[i]
        for i, c in self.lin_c.items():
            grad[i] = grad.get(i, 0.0) + c
        for coef, idxs, alpha, beta in self.power_terms:
            total = max(1e-12, sum(xc[i] for i in idxs))
            d = coef * (1.0 / beta) * (total / alpha) ** (1.0 / beta - 1.0) / alpha
            for i in idxs:
                grad[i] = grad.get(i, 0.0) + d
        return grad


@dataclass
class ProblemInstance:
    scenario: ShipScenario
    partition: IslandPartition
    mode: str

    # variable bookkeeping
    n_cont: int
    n_bin: int
    lb_c: np.ndarray
    ub_c: np.ndarray
    idx_pg: dict  # (gen_id, t) -> cont idx, active generators only
    idx_pe: dict  # (esm_id, t)
    idx_ee: dict
    idx_ppr: dict  # (module, t)
    idx_rho: dict  # (part, t)
    idx_dd: int
    idx_delta: dict  # (gen_id, t) -> bin idx
    idx_y: dict
    idx_sp: dict  # (zone, t), coupled zones only
    idx_ss: dict
    idx_ysw_p: dict
    idx_ysw_s: dict
    bin_names: list
    branch_mask: np.ndarray  # binaries that must be branched on

    # objective: 0.5-free convention, f = xc'diag(Q)xc + q_c'xc + q_b'xb + const
    obj_quad_c: np.ndarray
    obj_lin_c: np.ndarray
    obj_lin_b: np.ndarray
    obj_const: float

    rows: list  # LinearRow
    smooth: list  # SmoothConstraint

    active_gens: list  # GeneratorSpec in variable order
    coupled_zones: list
    p_vs_by_part: np.ndarray  # [W][T]
    p_no_by_part: np.ndarray  # [W][T]

    notes: list = field(default_factory=list)

    # -- convenience ------------------------------------------------------
    @property
    def horizon(self) -> int:
        return self.scenario.horizon

    def binary_rows(self):
        return [r for r in self.rows if r.scope == SCOPE_BIN]

    def continuous_rows(self):
        return [r for r in self.rows if r.scope == SCOPE_CONT]

    def objective_value(self, xc: np.ndarray, xb: np.ndarray) -> float:
        return float(
            xc @ (self.obj_quad_c * xc)
            + self.obj_lin_c @ xc
            + self.obj_lin_b @ xb
            + self.obj_const
        )

    def subproblem_objective(self, xc: np.ndarray) -> float:
        """Continuous cost share (commitment constants excluded)."""
        return float(xc @ (self.obj_quad_c * xc) + self.obj_lin_c @ xc + self.obj_const)

    def check(self, xc: np.ndarray, xb: np.ndarray, tol: float = 1e-6) -> dict:
        """Max violation per constraint tag, including variable boxes."""
        out: dict = {}
        for r in self.rows:
            out[r.tag] = max(out.get(r.tag, 0.0), r.violation(xc, xb))
        for s in self.smooth:
            out[s.tag] = max(out.get(s.tag, 0.0), s.violation(xc, xb))
        box = max(
            float(np.max(self.lb_c - xc, initial=0.0)),
            float(np.max(xc - self.ub_c, initial=0.0)),
        )
        out["variable-bounds"] = box
        return out

    # -- schedule packing -------------------------------------------------
    def pack(self, schedule: Schedule):
        """Schedule -> (xc, xb) in this instance's variable layout."""
        sc = self.scenario
        gen_pos = {g.id: i for i, g in enumerate(sc.generators)}
        esm_pos = {e.id: i for i, e in enumerate(sc.esms)}
        xc = np.zeros(self.n_cont)
        xb = np.zeros(self.n_bin)
        for (gid, t), i in self.idx_pg.items():
            xc[i] = schedule.p_g[gen_pos[gid], t]
        for (eid, t), i in self.idx_pe.items():
            xc[i] = schedule.p_e[esm_pos[eid], t]
        for (eid, t), i in self.idx_ee.items():
            xc[i] = schedule.e_e[esm_pos[eid], t]
        for (r, t), i in self.idx_ppr.items():
            xc[i] = schedule.p_pr[r, t]
        for (w, t), i in self.idx_rho.items():
            xc[i] = schedule.rho[w, t]
        xc[self.idx_dd] = schedule.d_d
        for (gid, t), i in self.idx_delta.items():
            xb[i] = schedule.delta_g[gen_pos[gid], t]
        for (gid, t), i in self.idx_y.items():
            xb[i] = schedule.y_g[gen_pos[gid], t]
        for (z, t), i in self.idx_sp.items():
            xb[i] = schedule.s_p[z - 1, t]
        for (z, t), i in self.idx_ss.items():
            xb[i] = schedule.s_s[z - 1, t]
        for (z, t), i in self.idx_ysw_p.items():
            prev = schedule.s_p[z - 1, t - 1] if t > 0 else self.scenario.topology.switch_initial[z - 1][0]
            xb[i] = max(0.0, schedule.s_p[z - 1, t] - prev)
        for (z, t), i in self.idx_ysw_s.items():
            prev = schedule.s_s[z - 1, t - 1] if t > 0 else self.scenario.topology.switch_initial[z - 1][1]
            xb[i] = max(0.0, schedule.s_s[z - 1, t] - prev)
        return xc, xb

    def unpack(self, xc: np.ndarray, xb: np.ndarray) -> Schedule:
        sc = self.scenario
        T = self.horizon
        M = len(sc.generators)
        N = len(sc.esms)
        R = sc.propulsion.module_count
        Z = sc.topology.zone_count
        W = self.partition.n_parts
        gen_pos = {g.id: i for i, g in enumerate(sc.generators)}
        esm_pos = {e.id: i for i, e in enumerate(sc.esms)}

        sched = Schedule(
            delta_g=np.zeros((M, T)),
            y_g=np.zeros((M, T)),
            p_g=np.zeros((M, T)),
            p_e=np.zeros((N, T)),
            e_e=np.zeros((N, T)),
            p_pr=np.zeros((R, T)),
            rho=np.zeros((W, T)),
            s_p=np.zeros((Z, T)),
            s_s=np.zeros((Z, T)),
            d_d=float(max(0.0, xc[self.idx_dd])),
        )
        for (gid, t), i in self.idx_pg.items():
            sched.p_g[gen_pos[gid], t] = xc[i]
        for (eid, t), i in self.idx_pe.items():
            sched.p_e[esm_pos[eid], t] = xc[i]
        for (eid, t), i in self.idx_ee.items():
            sched.e_e[esm_pos[eid], t] = xc[i]
        for (r, t), i in self.idx_ppr.items():
            sched.p_pr[r, t] = xc[i]
        for (w, t), i in self.idx_rho.items():
            sched.rho[w, t] = min(1.0, max(0.0, xc[i]))
        for (gid, t), i in self.idx_delta.items():
            sched.delta_g[gen_pos[gid], t] = round(xb[i])
        for (gid, t), i in self.idx_y.items():
            sched.y_g[gen_pos[gid], t] = round(xb[i])
        # switch states: fixed zones from the partition, coupled from variables
        for z in range(1, Z + 1):
            if z in self.partition.fixed_switches:
                sp0, ss0 = self.partition.fixed_switches[z]
                sched.s_p[z - 1, :] = sp0
                sched.s_s[z - 1, :] = ss0
            elif self.mode in (FaultMode.NORMAL, FaultMode.NON_ISLAND):
                sp0, ss0 = sc.topology.switch_initial[z - 1]
                sched.s_p[z - 1, :] = sp0
                sched.s_s[z - 1, :] = ss0
        for (z, t), i in self.idx_sp.items():
            sched.s_p[z - 1, t] = round(xb[i])
        for (z, t), i in self.idx_ss.items():
            sched.s_s[z - 1, t] = round(xb[i])
        return sched


def uniform_propulsion_power(voyage: VoyageSpec, propulsion: PropulsionSpec) -> float:
    """Constant propulsion power whose uniform speed exactly meets the target."""
    span = voyage.horizon * voyage.dt
    if span <= 0:
        raise ValueError("voyage time span must be positive")
    if voyage.distance <= 0:
        return 0.0
    v = voyage.distance / span
    return propulsion.alpha * v**propulsion.beta


def build(scenario: ShipScenario, partition: IslandPartition) -> ProblemInstance:
    """Assemble the relaxed problem for the given fault mode."""
    sc = scenario
    T = sc.horizon
    dt = sc.dt
    zeta = sc.topology.converter_efficiency
    pen = sc.resolved_penalties()
    pr = sc.propulsion
    vs = sc.loads.vs_array()
    parts = partition.parts
    W = len(parts)
    mode = partition.mode
    semi = mode == FaultMode.SEMI_ISLAND
    notes: list = []

    gens = {g.id: g for g in sc.generators}
    esms = {e.id: e for e in sc.esms}
    active_gens = [g for g in sc.generators if g.id not in partition.failed_generators]
    coupled = list(partition.coupled_zones)
    ts_min = sc.topology.t_min_switch

    # per-part load series
    p_vs_by_part = np.zeros((W, T))
    p_no_by_part = np.zeros((W, T))
    for p in parts:
        for z in p.zones:
            p_vs_by_part[p.index] += vs[z - 1]
        for bi in p.nonvital_blocks:
            p_no_by_part[p.index] += np.asarray(sc.loads.no_blocks[bi].series)

    # ---- continuous variables ------------------------------------------
    idx_pg, idx_pe, idx_ee, idx_ppr, idx_rho = {}, {}, {}, {}, {}
    lb, ub = [], []

    def add_cont(lo, hi):
        lb.append(lo)
        ub.append(hi)
        return len(lb) - 1

    for g in active_gens:
        for t in range(T):
            idx_pg[(g.id, t)] = add_cont(0.0, g.p_max)
    for e in sc.esms:
        for t in range(T):
            idx_pe[(e.id, t)] = add_cont(e.p_min, e.p_max)
    for e in sc.esms:
        for t in range(T):
            idx_ee[(e.id, t)] = add_cont(e.e_min, e.e_max)
    for r in range(pr.module_count):
        for t in range(T):
            idx_ppr[(r, t)] = add_cont(0.0, pr.p_max)
    for w in range(W):
        for t in range(T):
            hi = 1.0 if p_no_by_part[w, t] > 0 else 0.0
            idx_rho[(w, t)] = add_cont(0.0, hi)
    idx_dd = add_cont(0.0, max(sc.voyage.distance, 0.0))
    n_cont = len(lb)
    lb_c = np.array(lb)
    ub_c = np.array(ub)

    # ---- binary variables ----------------------------------------------
    idx_delta, idx_y, idx_sp, idx_ss = {}, {}, {}, {}
    idx_ysw_p, idx_ysw_s = {}, {}
    bin_names: list = []
    branch: list = []

    def add_bin(name, branchable):
        bin_names.append(name)
        branch.append(branchable)
        return len(bin_names) - 1

    for g in active_gens:
        for t in range(T):
            idx_delta[(g.id, t)] = add_bin(f"delta[{g.id},{t}]", True)
    for g in active_gens:
        for t in range(T):
            # start indicators are implied binary once delta is integral
            idx_y[(g.id, t)] = add_bin(f"y[{g.id},{t}]", False)
    if semi:
        for z in coupled:
            for t in range(T):
                idx_sp[(z, t)] = add_bin(f"sp[{z},{t}]", True)
        for z in coupled:
            for t in range(T):
                # exclusivity row pins ss once sp is integral
                idx_ss[(z, t)] = add_bin(f"ss[{z},{t}]", False)
        if ts_min > 1:
            for z in coupled:
                for t in range(T):
                    idx_ysw_p[(z, t)] = add_bin(f"ysw_p[{z},{t}]", False)
                    idx_ysw_s[(z, t)] = add_bin(f"ysw_s[{z},{t}]", False)
            notes.append("switch dwell-time indicators added (t_min_switch > 1)")
    n_bin = len(bin_names)

    rows: list = []
    smooth: list = []

    def row(cc, cb, rhs, sense, tag, scope):
        rows.append(LinearRow(cc, cb, float(rhs), sense, tag, scope))

    # ---- generator constraints -----------------------------------------
    for g in active_gens:
        for t in range(T):
            ip = idx_pg[(g.id, t)]
            idl = idx_delta[(g.id, t)]
            row({ip: 1.0}, {idl: -g.p_max}, 0.0, LE, "gen-power-bounds", SCOPE_CONT)
            row({ip: -1.0}, {idl: g.p_min}, 0.0, LE, "gen-power-bounds", SCOPE_CONT)
            if t == 0:
                row({ip: 1.0}, {}, g.ramp_max + g.initial_power, LE, "gen-ramp", SCOPE_CONT)
                row({ip: -1.0}, {}, g.ramp_max - g.initial_power, LE, "gen-ramp", SCOPE_CONT)
            else:
                ipp = idx_pg[(g.id, t - 1)]
                row({ip: 1.0, ipp: -1.0}, {}, g.ramp_max, LE, "gen-ramp", SCOPE_CONT)
                row({ip: -1.0, ipp: 1.0}, {}, g.ramp_max, LE, "gen-ramp", SCOPE_CONT)
            # start-up detection
            iy = idx_y[(g.id, t)]
            if t == 0:
                row({}, {idx_delta[(g.id, 0)]: 1.0, iy: -1.0}, float(g.initial_on), LE, "gen-start-detect", SCOPE_BIN)
            else:
                row(
                    {},
                    {idx_delta[(g.id, t)]: 1.0, idx_delta[(g.id, t - 1)]: -1.0, iy: -1.0},
                    0.0,
                    LE,
                    "gen-start-detect",
                    SCOPE_BIN,
                )
            # minimum running time, window clipped at the horizon end
            win = list(range(t, min(t + g.t_min_on, T)))
            cb = {idx_delta[(g.id, tau)]: -1.0 for tau in win}
            cb[iy] = cb.get(iy, 0.0) + float(len(win))
            row({}, cb, 0.0, LE, "gen-min-on-time", SCOPE_BIN)

    # ---- ESM energy recursion ------------------------------------------
    for e in sc.esms:
        for t in range(T):
            ie = idx_ee[(e.id, t)]
            ip = idx_pe[(e.id, t)]
            if t == 0:
                row({ie: 1.0, ip: dt}, {}, e.e_initial, EQ, "esm-energy-recursion", SCOPE_CONT)
            else:
                row(
                    {ie: 1.0, idx_ee[(e.id, t - 1)]: -1.0, ip: dt},
                    {},
                    0.0,
                    EQ,
                    "esm-energy-recursion",
                    SCOPE_CONT,
                )

    # ---- switch logic (coupled zones only) ------------------------------
    for z in coupled:
        sp0, ss0 = sc.topology.switch_initial[z - 1]
        for t in range(T):
            row(
                {},
                {idx_sp[(z, t)]: 1.0, idx_ss[(z, t)]: 1.0},
                1.0,
                EQ,
                "switch-exclusivity",
                SCOPE_BIN,
            )
        if ts_min > 1:
            for t in range(T):
                for which, idx_s, idx_ysw, s0 in (
                    ("p", idx_sp, idx_ysw_p, sp0),
                    ("s", idx_ss, idx_ysw_s, ss0),
                ):
                    iy = idx_ysw[(z, t)]
                    if t == 0:
                        row({}, {idx_s[(z, 0)]: 1.0, iy: -1.0}, float(s0), LE, "switch-start-detect", SCOPE_BIN)
                    else:
                        row(
                            {},
                            {idx_s[(z, t)]: 1.0, idx_s[(z, t - 1)]: -1.0, iy: -1.0},
                            0.0,
                            LE,
                            "switch-start-detect",
                            SCOPE_BIN,
                        )
                    win = list(range(t, min(t + ts_min, T)))
                    cb = {idx_s[(z, tau)]: -1.0 for tau in win}
                    cb[iy] = cb.get(iy, 0.0) + float(len(win))
                    row({}, cb, 0.0, LE, "switch-min-dwell", SCOPE_BIN)

    # ---- per-part power balance ----------------------------------------
    for p in parts:
        w = p.index
        for t in range(T):
            cc: dict = {}
            cb: dict = {}
            for gid in p.generators:
                cc[idx_pg[(gid, t)]] = zeta
            for eid in p.esms:
                cc[idx_pe[(eid, t)]] = 1.0
            for r in p.propulsion_modules:
                cc[idx_ppr[(r, t)]] = -1.0
            cc[idx_rho[(w, t)]] = p_no_by_part[w, t]
            for z in p.omega_pb:
                cb[idx_sp[(z, t)]] = -vs[z - 1, t]
            for z in p.omega_sb:
                cb[idx_ss[(z, t)]] = -vs[z - 1, t]
            row(
                cc,
                cb,
                p_vs_by_part[w, t] + p_no_by_part[w, t],
                EQ,
                "power-balance",
                SCOPE_CONT,
            )

    # ---- propulsion total bounds ---------------------------------------
    prop_part = partition.propulsion_part()
    if prop_part is not None:
        mods = prop_part.propulsion_modules
        for t in range(T):
            cc = {idx_ppr[(r, t)]: 1.0 for r in mods}
            row(dict(cc), {}, pr.p_max, LE, "propulsion-power-range", SCOPE_CONT)
            row({i: -c for i, c in cc.items()}, {}, -pr.p_min, LE, "propulsion-power-range", SCOPE_CONT)

    # ---- semi-island aggregated ESM bounds ------------------------------
    if semi:
        for p in parts:
            if not p.esms:
                continue
            pmin = sum(esms[eid].p_min for eid in p.esms)
            pmax = sum(esms[eid].p_max for eid in p.esms)
            emin = sum(esms[eid].e_min for eid in p.esms)
            emax = sum(esms[eid].e_max for eid in p.esms)
            for t in range(T):
                ccp = {idx_pe[(eid, t)]: 1.0 for eid in p.esms}
                row(dict(ccp), {}, pmax, LE, "esm-aggregate-bounds", SCOPE_CONT)
                row({i: -c for i, c in ccp.items()}, {}, -pmin, LE, "esm-aggregate-bounds", SCOPE_CONT)
                cce = {idx_ee[(eid, t)]: 1.0 for eid in p.esms}
                row(dict(cce), {}, emax, LE, "esm-aggregate-bounds", SCOPE_CONT)
                row({i: -c for i, c in cce.items()}, {}, -emin, LE, "esm-aggregate-bounds", SCOPE_CONT)

    # ---- capacity coverage (master accelerators) ------------------------
    for p in parts:
        w = p.index
        if not (p.generators or p.esms or p.zones or p.omega_pb or p.omega_sb):
            continue
        esm_max = sum(esms[eid].p_max for eid in p.esms)
        esm_min = sum(esms[eid].p_min for eid in p.esms)
        prop_lo = pr.p_min if p.propulsion_modules else 0.0
        prop_hi = pr.p_max if p.propulsion_modules else 0.0
        for t in range(T):
            cb_hi = {idx_delta[(gid, t)]: -zeta * gens[gid].p_max for gid in p.generators}
            for z in p.omega_pb:
                cb_hi[idx_sp[(z, t)]] = cb_hi.get(idx_sp[(z, t)], 0.0) + vs[z - 1, t]
            for z in p.omega_sb:
                cb_hi[idx_ss[(z, t)]] = cb_hi.get(idx_ss[(z, t)], 0.0) + vs[z - 1, t]
            row(
                {},
                cb_hi,
                esm_max - p_vs_by_part[w, t] - prop_lo,
                LE,
                "capacity-coverage",
                SCOPE_BIN,
            )
            cb_lo = {idx_delta[(gid, t)]: zeta * gens[gid].p_min for gid in p.generators}
            for z in p.omega_pb:
                cb_lo[idx_sp[(z, t)]] = cb_lo.get(idx_sp[(z, t)], 0.0) - vs[z - 1, t]
            for z in p.omega_sb:
                cb_lo[idx_ss[(z, t)]] = cb_lo.get(idx_ss[(z, t)], 0.0) - vs[z - 1, t]
            row(
                {},
                cb_lo,
                p_vs_by_part[w, t] + p_no_by_part[w, t] + prop_hi - esm_min,
                LE,
                "capacity-coverage",
                SCOPE_BIN,
            )

    # ---- emission intensity (transformed convex form) -------------------
    k_eeoi = sc.voyage.eeoi_max * sc.voyage.f_sl * dt
    all_mods = list(range(pr.module_count))
    for t in range(T):
        quad = {idx_pg[(g.id, t)]: g.co2_a * dt for g in active_gens}
        lin_c = {idx_pg[(g.id, t)]: g.co2_b * dt for g in active_gens}
        lin_b = {idx_delta[(g.id, t)]: g.co2_c * dt for g in active_gens}
        ppr_idx = [idx_ppr[(r, t)] for r in all_mods]
        if pr.beta == 1.0:
            cc = dict(lin_c)
            for i in ppr_idx:
                cc[i] = cc.get(i, 0.0) - k_eeoi / pr.alpha
            if any(c != 0 for c in quad.values()):
                smooth.append(
                    SmoothConstraint(quad, cc, lin_b, 0.0, [], "eeoi-limit")
                )
            else:
                row(cc, lin_b, 0.0, LE, "eeoi-limit", SCOPE_CONT)
        else:
            smooth.append(
                SmoothConstraint(
                    quad,
                    lin_c,
                    lin_b,
                    0.0,
                    [(-k_eeoi, ppr_idx, pr.alpha, pr.beta)],
                    "eeoi-limit",
                )
            )

    # ---- relaxed voyage distance ----------------------------------------
    if pr.beta == 1.0:
        cc = {idx_ppr[(r, t)]: -dt / pr.alpha for r in all_mods for t in range(T)}
        cc[idx_dd] = -1.0
        row(cc, {}, -sc.voyage.distance, LE, "distance-relaxed", SCOPE_CONT)
    else:
        terms = [
            (-dt, [idx_ppr[(r, t)] for r in all_mods], pr.alpha, pr.beta)
            for t in range(T)
        ]
        smooth.append(
            SmoothConstraint({}, {idx_dd: -1.0}, {}, sc.voyage.distance, terms, "distance-relaxed")
        )

    # ---- objective -------------------------------------------------------
    obj_quad_c = np.zeros(n_cont)
    obj_lin_c = np.zeros(n_cont)
    obj_lin_b = np.zeros(n_bin)
    obj_const = 0.0
    for g in active_gens:
        for t in range(T):
            obj_quad_c[idx_pg[(g.id, t)]] = g.cost_a * dt
            obj_lin_c[idx_pg[(g.id, t)]] = g.cost_b * dt
            obj_lin_b[idx_delta[(g.id, t)]] = g.cost_c * dt
    for e in sc.esms:
        for t in range(T):
            obj_quad_c[idx_pe[(e.id, t)]] = pen.xi_e * e.lc_a * dt
        obj_const += pen.xi_e * e.lc_c * dt * T
    for w in range(W):
        for t in range(T):
            obj_lin_c[idx_rho[(w, t)]] = pen.xi_l * p_no_by_part[w, t] * dt
    obj_lin_c[idx_dd] = pen.h

    assert (obj_quad_c >= 0).all(), "objective must stay convex"
    assert pr.beta >= 1, "distance relaxation needs beta >= 1"

    return ProblemInstance(
        scenario=sc,
        partition=partition,
        mode=mode,
        n_cont=n_cont,
        n_bin=n_bin,
        lb_c=lb_c,
        ub_c=ub_c,
        idx_pg=idx_pg,
        idx_pe=idx_pe,
        idx_ee=idx_ee,
        idx_ppr=idx_ppr,
        idx_rho=idx_rho,
        idx_dd=idx_dd,
        idx_delta=idx_delta,
        idx_y=idx_y,
        idx_sp=idx_sp,
        idx_ss=idx_ss,
        idx_ysw_p=idx_ysw_p,
        idx_ysw_s=idx_ysw_s,
        bin_names=bin_names,
        branch_mask=np.array(branch, dtype=bool),
        obj_quad_c=obj_quad_c,
        obj_lin_c=obj_lin_c,
        obj_lin_b=obj_lin_b,
        obj_const=obj_const,
        rows=rows,
        smooth=smooth,
        active_gens=active_gens,
        coupled_zones=coupled,
        p_vs_by_part=p_vs_by_part,
        p_no_by_part=p_no_by_part,
        notes=notes,
    )
