"""Optimal management algorithm: master/subproblem decomposition.

The master commits generators and coupled-zone switches (an integer linear
program over the logic rows, capacity-coverage rows, and accumulated cuts);
the subproblem dispatches power for that commitment and returns multipliers
that become the next cut.  The loop terminates when the incumbent upper
bound meets the master lower bound within epsilon.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .bnb import MasterProblem
from .convex_solver import OPTIMAL, CvxSubproblem
from .model import Schedule, SolveReport
from .problem_builder import SCOPE_BIN, ProblemInstance


@dataclass
class BendersConfig:
    epsilon: float = 1e-2
    max_iter: int = 500
    check_kkt: bool = True


def make_master(instance: ProblemInstance) -> MasterProblem:
    """Master ILP over the binary variables (no cuts yet)."""
    mp = MasterProblem(n=instance.n_bin, c=instance.obj_lin_b.copy())
    for r in instance.rows:
        if r.scope != SCOPE_BIN:
            continue
        if r.coeffs_c:
            raise ValueError(f"binary-scope row {r.tag} touches continuous variables")
        mp.add_row(r.coeffs_b, r.rhs, r.sense)
    return mp


def run(instance: ProblemInstance, config: BendersConfig = None):
    """Solve the relaxed problem to global optimality; returns (Schedule, SolveReport)."""
    cfg = config or BendersConfig()
    t0 = time.perf_counter()
    sub = CvxSubproblem(instance)
    mp = make_master(instance)

    lower_trace: list = []
    upper_trace: list = []
    best_ub = np.inf
    best_xb = None
    best_xc = None
    max_kkt = 0.0
    notes: list = []
    converged = False
    k = 0

    while k < cfg.max_iter:
        k += 1
        xb, lower = mp.solve()
        lower_trace.append(float(lower))
        res = sub.solve(xb)
        if res.status == OPTIMAL and not res.reliable:
            # the commitment's continuous feasible set has an empty interior,
            # so no solver can certify multipliers; keep the point as an
            # incumbent candidate only if it is primal-feasible on its own,
            # and exclude just this assignment rather than trust a bad cut
            worst = max(instance.check(res.xc, xb).values())
            if worst <= 1e-6:
                commit = float(instance.obj_lin_b @ xb)
                ub = commit + res.objective
                if ub < best_ub - 1e-12:
                    best_ub, best_xb, best_xc = ub, xb.copy(), res.xc.copy()
            mp.add_nogood(xb)
            notes.append(
                f"iteration {k}: degenerate commitment excluded "
                f"(audited residual {res.kkt:.1e})"
            )
        elif res.status == OPTIMAL:
            commit = float(instance.obj_lin_b @ xb)
            ub = commit + res.objective
            if ub < best_ub - 1e-12:
                best_ub, best_xb, best_xc = ub, xb.copy(), res.xc.copy()
            if cfg.check_kkt:
                max_kkt = max(max_kkt, res.kkt)
            # optimality cut: mu >= C_sp^k + lambda'(x - x^k)
            mp.add_cut(res.objective - float(res.lambda_bin @ xb), res.lambda_bin)
        else:
            # feasibility cut excludes this assignment
            mp.add_feasibility_cut(
                res.infeasibility - float(res.lambda_bin @ xb), res.lambda_bin
            )
        upper_trace.append(float(best_ub))
        if best_ub - lower < cfg.epsilon:
            converged = True
            break

    if best_xb is None:
        raise RuntimeError("no feasible commitment found within the iteration limit")
    if not converged:
        notes.append("iteration cap reached before the bound gap closed")

    schedule = instance.unpack(best_xc, best_xb)
    report = _make_report(
        instance,
        schedule,
        best_xb,
        best_xc,
        iterations=k,
        lower=lower_trace,
        upper=upper_trace,
        converged=converged,
        wall=time.perf_counter() - t0,
        max_kkt=max_kkt,
        notes=notes,
    )
    return schedule, report


def _make_report(
    instance: ProblemInstance,
    schedule: Schedule,
    xb: np.ndarray,
    xc: np.ndarray,
    iterations: int,
    lower: list,
    upper: list,
    converged: bool,
    wall: float,
    max_kkt: float,
    notes: list,
) -> SolveReport:
    from .fault_analysis import count_switch_changes
    from .verifier import cost_breakdown

    sc = instance.scenario
    br = cost_breakdown(sc, instance.partition, schedule)
    return SolveReport(
        total_cost=br["total"],
        fuel_cost=br["fuel"],
        esm_cost=br["esm"],
        shed_cost=br["shed"],
        distance_penalty=br["distance"],
        p_ls_total=br["p_ls_total"],
        d_d=float(schedule.d_d),
        n_rs=count_switch_changes(instance.partition, schedule, sc.topology),
        iterations=iterations,
        lower_bounds=lower,
        upper_bounds=upper,
        converged=converged,
        wall_time=wall,
        max_kkt=max_kkt,
        notes=notes,
    )
