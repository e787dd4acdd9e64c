"""Low-complexity near-optimal variant: time-decoupled subproblems.

Instead of one horizon-wide dispatch per commitment, each interval is
dispatched on its own: the ESM energy recursion is replaced by per-interval
power caps (a uniform energy budget plus a load-deviation share phi(t)),
and the voyage target is split into per-interval distance targets around
the uniform-sailing baseline.  Interval shortfalls D_d(t) feed a
redistribution loop; per-interval multipliers are aggregated into a single
cut for the same master as the optimal algorithm.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .benders import make_master, _make_report
from .convex_solver import OPTIMAL, CvxSubproblem
from .model import Schedule, ShipScenario
from .problem_builder import (
    EQ,
    LE,
    SCOPE_CONT,
    LinearRow,
    ProblemInstance,
    SmoothConstraint,
    uniform_propulsion_power,
)


@dataclass
class LnbdConfig:
    phi: np.ndarray = None  # per-t in [0,1], last entry 1 (filled at run)
    epsilon: float = 1e-2
    max_outer_iter: int = 10
    max_distance_update_iter: int = 50
    check_kkt: bool = True

    @classmethod
    def with_phi(cls, phi_value: float, horizon: int, **kw) -> "LnbdConfig":
        phi = np.full(horizon, float(phi_value))
        phi[-1] = 1.0
        return cls(phi=phi, **kw)


def _resolve_phi(cfg: LnbdConfig, T: int) -> np.ndarray:
    if cfg.phi is None:
        phi = np.full(T, 0.5)
        phi[-1] = 1.0
        return phi
    phi = np.asarray(cfg.phi, dtype=float)
    if phi.shape != (T,):
        raise ValueError(f"phi must have {T} entries")
    if (phi < 0).any() or (phi > 1).any() or abs(phi[-1] - 1.0) > 1e-12:
        raise ValueError("phi entries must lie in [0, 1] with the final entry 1")
    return phi


def initial_distance_targets(
    instance: ProblemInstance, phi: np.ndarray
) -> tuple:
    """Per-interval distance targets around the uniform-sailing baseline.

    Returns (targets, clamped) where clamped flags intervals whose power
    argument went negative and was cut off at zero.
    """
    sc = instance.scenario
    pr = sc.propulsion
    T = sc.horizon
    dt = sc.dt
    p_bar = uniform_propulsion_power(sc.voyage, pr)
    prop_part = instance.partition.propulsion_part()
    if prop_part is None:
        return np.zeros(T), False
    w = prop_part.index
    load = instance.p_vs_by_part[w] + instance.p_no_by_part[w]
    delta_load = load - load.mean()
    clamped = False
    targets = np.zeros(T)
    for t in range(T - 1):
        arg = p_bar - (1.0 - phi[t]) * delta_load[t]
        if arg < 0:
            arg = 0.0
            clamped = True
        targets[t] = (arg / pr.alpha) ** (1.0 / pr.beta) * dt
    # phi(T) = 1: the last interval absorbs the remainder so the split
    # always covers the full voyage target
    rest = sc.voyage.distance - targets.sum()
    if rest < 0:
        rest = 0.0
        clamped = True
    targets[T - 1] = rest
    return targets, clamped


def update_distance_targets(d_d_per_t: np.ndarray, d_per_t: np.ndarray):
    """Redistribution rule: spread the total shortfall evenly while some
    intervals are short and others are not; returns (new targets, done)."""
    short = d_d_per_t > 1e-9
    if short.any() and (~short).any():
        return d_per_t + d_d_per_t.sum() / len(d_per_t), False
    return d_per_t, True


# ---------------------------------------------------------------------------
# per-interval subinstance


@dataclass
class _MiniInstance:
    n_cont: int
    n_bin: int
    lb_c: np.ndarray
    ub_c: np.ndarray
    rows: list
    smooth: list
    obj_quad_c: np.ndarray
    obj_lin_c: np.ndarray
    obj_const: float
    bin_map: list  # mini bin index -> full-instance bin index
    cont_names: dict = field(default_factory=dict)  # label -> mini cont index

    def subproblem_objective(self, xc: np.ndarray) -> float:
        return float(xc @ (self.obj_quad_c * xc) + self.obj_lin_c @ xc + self.obj_const)


def _interval_instance(
    instance: ProblemInstance,
    t: int,
    e_prev: dict,  # esm id -> energy entering the interval
    d_target: float,
    phi_t: float,
    online_parts: set,  # part indices with at least one committed generator
) -> _MiniInstance:
    sc = instance.scenario
    dt = sc.dt
    pr = sc.propulsion
    pen = sc.resolved_penalties()
    zeta = sc.topology.converter_efficiency
    vs = sc.loads.vs_array()
    esms = {e.id: e for e in sc.esms}

    lb, ub, names = [], [], {}

    def add(label, lo, hi):
        names[label] = len(lb)
        lb.append(lo)
        ub.append(hi)
        return names[label]

    for g in instance.active_gens:
        add(("pg", g.id), 0.0, g.p_max)
    for e in sc.esms:
        # exact per-interval energy window keeps any reconstruction feasible
        lo = max(e.p_min, (e_prev[e.id] - e.e_max) / dt)
        hi = min(e.p_max, (e_prev[e.id] - e.e_min) / dt)
        add(("pe", e.id), lo, hi)
    for r in range(pr.module_count):
        add(("ppr", r), 0.0, pr.p_max)
    for p in instance.partition.parts:
        hi = 1.0 if instance.p_no_by_part[p.index, t] > 0 else 0.0
        add(("rho", p.index), 0.0, hi)
    idd = add("dd", 0.0, max(d_target, 0.0))
    n_cont = len(lb)

    bin_map: list = []
    bpos: dict = {}

    def bidx(full_idx):
        if full_idx not in bpos:
            bpos[full_idx] = len(bin_map)
            bin_map.append(full_idx)
        return bpos[full_idx]

    rows: list = []
    smooth: list = []
    for g in instance.active_gens:
        ip = names[("pg", g.id)]
        ib = bidx(instance.idx_delta[(g.id, t)])
        rows.append(LinearRow({ip: 1.0}, {ib: -g.p_max}, 0.0, LE, "gen-power-bounds", SCOPE_CONT))
        rows.append(LinearRow({ip: -1.0}, {ib: g.p_min}, 0.0, LE, "gen-power-bounds", SCOPE_CONT))

    for p in instance.partition.parts:
        w = p.index
        cc: dict = {}
        cb: dict = {}
        for gid in p.generators:
            cc[names[("pg", gid)]] = zeta
        for eid in p.esms:
            cc[names[("pe", eid)]] = 1.0
        for r in p.propulsion_modules:
            cc[names[("ppr", r)]] = -1.0
        cc[names[("rho", w)]] = instance.p_no_by_part[w, t]
        for z in p.omega_pb:
            cb[bidx(instance.idx_sp[(z, t)])] = -vs[z - 1, t]
        for z in p.omega_sb:
            cb[bidx(instance.idx_ss[(z, t)])] = -vs[z - 1, t]
        rows.append(
            LinearRow(
                cc,
                cb,
                instance.p_vs_by_part[w, t] + instance.p_no_by_part[w, t],
                EQ,
                "power-balance",
                SCOPE_CONT,
            )
        )
        # ESM power cap: uniform energy budget + load-deviation share,
        # active only while a generator of the part is committed
        if p.esms and w in online_parts:
            load = instance.p_vs_by_part[w] + instance.p_no_by_part[w]
            delta_load = load[t] - load.mean()
            e_bar = sum(esms[eid].e_initial - esms[eid].e_min for eid in p.esms) / sc.horizon
            cap = e_bar / dt + phi_t * delta_load
            rows.append(
                LinearRow(
                    {names[("pe", eid)]: 1.0 for eid in p.esms},
                    {},
                    cap,
                    LE,
                    "esm-power-cap",
                    SCOPE_CONT,
                )
            )

    prop_part = instance.partition.propulsion_part()
    all_mods = list(range(pr.module_count))
    if prop_part is not None:
        cc = {names[("ppr", r)]: 1.0 for r in all_mods}
        rows.append(LinearRow(dict(cc), {}, pr.p_max, LE, "propulsion-power-range", SCOPE_CONT))
        rows.append(
            LinearRow({i: -c for i, c in cc.items()}, {}, -pr.p_min, LE, "propulsion-power-range", SCOPE_CONT)
        )
        ppr_idx = [names[("ppr", r)] for r in all_mods]
        if pr.beta == 1.0:
            cc2 = {i: -dt / pr.alpha for i in ppr_idx}
            cc2[idd] = -1.0
            rows.append(LinearRow(cc2, {}, -d_target, LE, "distance-interval", SCOPE_CONT))
        else:
            smooth.append(
                SmoothConstraint(
                    {},
                    {idd: -1.0},
                    {},
                    d_target,
                    [(-dt, ppr_idx, pr.alpha, pr.beta)],
                    "distance-interval",
                )
            )

    # emission intensity at this interval
    k_eeoi = sc.voyage.eeoi_max * sc.voyage.f_sl * dt
    quad = {names[("pg", g.id)]: g.co2_a * dt for g in instance.active_gens}
    lin_c = {names[("pg", g.id)]: g.co2_b * dt for g in instance.active_gens}
    lin_b = {bidx(instance.idx_delta[(g.id, t)]): g.co2_c * dt for g in instance.active_gens}
    ppr_idx = [names[("ppr", r)] for r in all_mods]
    if pr.beta == 1.0:
        cc3 = dict(lin_c)
        for i in ppr_idx:
            cc3[i] = cc3.get(i, 0.0) - k_eeoi / pr.alpha
        if any(c != 0 for c in quad.values()):
            smooth.append(SmoothConstraint(quad, cc3, lin_b, 0.0, [], "eeoi-limit"))
        else:
            rows.append(LinearRow(cc3, lin_b, 0.0, LE, "eeoi-limit", SCOPE_CONT))
    else:
        smooth.append(
            SmoothConstraint(quad, lin_c, lin_b, 0.0, [(-k_eeoi, ppr_idx, pr.alpha, pr.beta)], "eeoi-limit")
        )

    obj_quad = np.zeros(n_cont)
    obj_lin = np.zeros(n_cont)
    obj_const = 0.0
    for g in instance.active_gens:
        obj_quad[names[("pg", g.id)]] = g.cost_a * dt
        obj_lin[names[("pg", g.id)]] = g.cost_b * dt
    for e in sc.esms:
        obj_quad[names[("pe", e.id)]] = pen.xi_e * e.lc_a * dt
        obj_const += pen.xi_e * e.lc_c * dt
    for p in instance.partition.parts:
        obj_lin[names[("rho", p.index)]] = pen.xi_l * instance.p_no_by_part[p.index, t] * dt
    obj_lin[idd] = pen.h

    return _MiniInstance(
        n_cont=n_cont,
        n_bin=len(bin_map),
        lb_c=np.array(lb),
        ub_c=np.array(ub),
        rows=rows,
        smooth=smooth,
        obj_quad_c=obj_quad,
        obj_lin_c=obj_lin,
        obj_const=obj_const,
        bin_map=bin_map,
        cont_names=names,
    )


# ---------------------------------------------------------------------------
# one full subproblem pass (T sequential intervals + distance redistribution)


@dataclass
class _PassResult:
    feasible: bool
    objective: float  # sum of interval objectives (interval slack priced)
    lambda_full: np.ndarray
    d_d_per_t: np.ndarray
    schedule_parts: dict  # label -> value arrays
    infeasibility: float = 0.0
    max_kkt: float = 0.0
    clamped: bool = False
    inner_iterations: int = 1
    reliable: bool = True  # False when any interval solve lacked usable duals


def _run_pass(
    instance: ProblemInstance,
    xb: np.ndarray,
    phi: np.ndarray,
    cfg: LnbdConfig,
) -> _PassResult:
    sc = instance.scenario
    T = sc.horizon
    dt = sc.dt

    d_targets, clamped = initial_distance_targets(instance, phi)
    online_by_t = []
    for t in range(T):
        online = set()
        for p in instance.partition.parts:
            if any(round(xb[instance.idx_delta[(gid, t)]]) == 1 for gid in p.generators):
                online.add(p.index)
        online_by_t.append(online)

    inner = 0
    while True:
        inner += 1
        e_prev = {e.id: e.e_initial for e in sc.esms}
        lam = np.zeros(instance.n_bin)
        total = 0.0
        d_d = np.zeros(T)
        max_kkt = 0.0
        parts: dict = {
            "p_g": {},
            "p_e": {},
            "e_e": {},
            "p_pr": {},
            "rho": {},
        }
        feasible = True
        infeas = 0.0
        reliable = True
        for t in range(T):
            mini = _interval_instance(
                instance, t, e_prev, float(d_targets[t]), float(phi[t]), online_by_t[t]
            )
            xb_mini = np.array([xb[i] for i in mini.bin_map])
            sub = CvxSubproblem(mini)
            res = sub.solve(xb_mini)
            if res.status != OPTIMAL:
                lam = np.zeros(instance.n_bin)
                for j, i in enumerate(mini.bin_map):
                    lam[i] = res.lambda_bin[j]
                return _PassResult(
                    feasible=False,
                    objective=float("inf"),
                    lambda_full=lam,
                    d_d_per_t=d_d,
                    schedule_parts=parts,
                    infeasibility=res.infeasibility,
                    clamped=clamped,
                    inner_iterations=inner,
                )
            if not res.reliable:
                reliable = False
            elif cfg.check_kkt:
                max_kkt = max(max_kkt, res.kkt)
            total += res.objective
            for j, i in enumerate(mini.bin_map):
                lam[i] += res.lambda_bin[j]
            xc = res.xc
            names = mini.cont_names
            for g in instance.active_gens:
                parts["p_g"].setdefault(g.id, np.zeros(T))[t] = xc[names[("pg", g.id)]]
            for e in sc.esms:
                p_et = xc[names[("pe", e.id)]]
                parts["p_e"].setdefault(e.id, np.zeros(T))[t] = p_et
                e_prev[e.id] = e_prev[e.id] - p_et * dt
                parts["e_e"].setdefault(e.id, np.zeros(T))[t] = e_prev[e.id]
            for r_i in range(sc.propulsion.module_count):
                parts["p_pr"].setdefault(r_i, np.zeros(T))[t] = xc[names[("ppr", r_i)]]
            for p in instance.partition.parts:
                parts["rho"].setdefault(p.index, np.zeros(T))[t] = xc[names[("rho", p.index)]]
            d_d[t] = max(0.0, xc[names["dd"]])

        d_targets, done = update_distance_targets(d_d, d_targets)
        if done or inner >= cfg.max_distance_update_iter:
            return _PassResult(
                feasible=True,
                objective=total,
                lambda_full=lam,
                d_d_per_t=d_d,
                schedule_parts=parts,
                max_kkt=max_kkt,
                clamped=clamped,
                inner_iterations=inner,
                reliable=reliable,
            )


def _assemble_schedule(instance: ProblemInstance, xb: np.ndarray, pr_pass: _PassResult) -> Schedule:
    sc = instance.scenario
    T = sc.horizon
    dt = sc.dt
    # route per-t values through the flat layout for consistent unpacking
    xc = np.zeros(instance.n_cont)
    parts = pr_pass.schedule_parts
    for (gid, t), i in instance.idx_pg.items():
        xc[i] = parts["p_g"][gid][t]
    for (eid, t), i in instance.idx_pe.items():
        xc[i] = parts["p_e"][eid][t]
    for (eid, t), i in instance.idx_ee.items():
        xc[i] = parts["e_e"][eid][t]
    for (r, t), i in instance.idx_ppr.items():
        xc[i] = parts["p_pr"][r][t]
    for (w, t), i in instance.idx_rho.items():
        xc[i] = parts["rho"][w][t]
    pr = sc.propulsion
    total = np.array([sum(parts["p_pr"][r][t] for r in range(pr.module_count)) for t in range(T)])
    sailed = float(((np.clip(total, 0.0, None) / pr.alpha) ** (1.0 / pr.beta)).sum() * dt)
    xc[instance.idx_dd] = max(0.0, sc.voyage.distance - sailed)
    return instance.unpack(xc, xb)


def run(instance: ProblemInstance, config: LnbdConfig = None):
    """Near-optimal solve; returns (Schedule, SolveReport)."""
    cfg = config or LnbdConfig()
    t0 = time.perf_counter()
    sc = instance.scenario
    phi = _resolve_phi(cfg, sc.horizon)
    mp = make_master(instance)
    from .verifier import cost_breakdown

    lower_trace: list = []
    upper_trace: list = []
    best_ub = np.inf
    best = None  # (xb, pass result, schedule)
    max_kkt = 0.0
    notes: list = []
    converged = False
    k = 0
    while k < cfg.max_outer_iter:
        k += 1
        xb, lower = mp.solve()
        lower_trace.append(float(lower))
        pr_pass = _run_pass(instance, xb, phi, cfg)
        if pr_pass.feasible:
            max_kkt = max(max_kkt, pr_pass.max_kkt)
            sched = _assemble_schedule(instance, xb, pr_pass)
            ub = cost_breakdown(sc, instance.partition, sched)["total"]
            if ub < best_ub - 1e-12:
                best_ub, best = ub, (xb.copy(), pr_pass, sched)
            if pr_pass.reliable:
                mp.add_cut(
                    pr_pass.objective - float(pr_pass.lambda_full @ xb), pr_pass.lambda_full
                )
            else:
                # degenerate interval dispatch: the multipliers are not
                # certifiable, so only rule out this exact commitment
                mp.add_nogood(xb)
                notes.append(f"iteration {k}: degenerate commitment excluded")
            if pr_pass.clamped:
                notes.append(f"iteration {k}: negative distance-split argument clamped to 0")
        else:
            mp.add_feasibility_cut(
                pr_pass.infeasibility - float(pr_pass.lambda_full @ xb),
                pr_pass.lambda_full,
            )
        upper_trace.append(float(best_ub))
        if best_ub - lower < cfg.epsilon:
            converged = True
            break

    if best is None:
        raise RuntimeError("no feasible commitment found within the outer-iteration cap")
    if not converged:
        notes.append("outer-iteration cap reached before the bound gap closed")
    xb, pr_pass, sched = best
    report = _make_report(
        instance,
        sched,
        xb,
        None,
        iterations=k,
        lower=lower_trace,
        upper=upper_trace,
        converged=converged,
        wall=time.perf_counter() - t0,
        max_kkt=max_kkt,
        notes=notes,
    )
    return sched, report
