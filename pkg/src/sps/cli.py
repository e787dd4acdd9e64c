"""Command-line front end.

Subcommands: solve, verify, faults, sweep, max-distance, gen-fixture.
Exit codes: 0 ok, 1 validation/verification failure, 2 non-convergence,
3 I/O error.  Numeric output uses 6 significant digits; wall-clock timing
is kept in a separate report section so content is reproducible.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import benders, lnbd, oracle
from .fault_analysis import partition
from .model import Schedule, load_scenario, save_scenario, validate_scenario
from .problem_builder import build
from .verifier import cost_breakdown, eeoi_profile, verify
from .fixtures import NAMED_FIXTURES

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NO_CONVERGENCE = 2
EXIT_IO = 3


def _fmt(x) -> str:
    return f"{x:.6g}" if isinstance(x, float) else str(x)


def _load(path):
    try:
        return load_scenario(path)
    except OSError as exc:
        print(f"error: cannot read scenario: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_IO)


def _validated(path):
    sc = _load(path)
    problems = validate_scenario(sc)
    if problems:
        for p in problems:
            print(f"invalid scenario: {p}", file=sys.stderr)
        raise SystemExit(EXIT_VALIDATION)
    return sc


def _solve_one(sc, algorithm, args):
    part = partition(sc.topology, sc.faults, sc)
    inst = build(sc, part)
    if algorithm == "benders":
        cfg = benders.BendersConfig(epsilon=args.epsilon, max_iter=args.max_iter)
        sched, report = benders.run(inst, cfg)
    elif algorithm == "lnbd":
        phi = _phi_array(args, sc.horizon)
        cfg = lnbd.LnbdConfig(phi=phi, epsilon=args.epsilon)
        sched, report = lnbd.run(inst, cfg)
    elif algorithm == "oracle":
        sched, obj = oracle.enumerate_solve(inst, limit=args.limit)
        br = cost_breakdown(sc, part, sched)
        from .fault_analysis import count_switch_changes
        from .model import SolveReport

        report = SolveReport(
            total_cost=br["total"],
            fuel_cost=br["fuel"],
            esm_cost=br["esm"],
            shed_cost=br["shed"],
            distance_penalty=br["distance"],
            p_ls_total=br["p_ls_total"],
            d_d=float(sched.d_d),
            n_rs=count_switch_changes(part, sched, sc.topology),
            iterations=1,
            lower_bounds=[obj],
            upper_bounds=[obj],
        )
    else:
        raise ValueError(algorithm)
    return part, inst, sched, report


def _phi_array(args, horizon):
    if getattr(args, "phi_profile", None):
        with open(args.phi_profile) as fh:
            return np.asarray(json.load(fh), dtype=float)
    phi_value = getattr(args, "phi", None)
    if phi_value is None:
        phi_value = float(os.environ.get("SPS_PHI", 0.5))
    phi = np.full(horizon, float(phi_value))
    phi[-1] = 1.0
    return phi


def _report_payload(report, sched):
    rep = report.to_dict()
    timing = {"wall_time": rep.pop("wall_time")}
    return {"report": rep, "timing": timing, "schedule": sched.to_dict()}


def cmd_solve(args) -> int:
    sc = _validated(args.scenario)
    try:
        part, inst, sched, report = _solve_one(sc, args.algorithm, args)
    except oracle.TooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    check = verify(sc, part, sched, tol=args.tol)
    payload = _report_payload(report, sched)
    payload["verified"] = check.passed
    text = json.dumps(payload, indent=2)
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            print(f"error: cannot write report: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        print(text)
    if args.csv:
        _write_series_csv(args.csv, sc, part, sched)
    print(
        f"total={_fmt(report.total_cost)} d_d={_fmt(report.d_d)} "
        f"p_ls={_fmt(report.p_ls_total)} n_rs={report.n_rs} "
        f"iterations={report.iterations} verified={check.passed}",
        file=sys.stderr,
    )
    if not check.passed:
        tag, amount = check.worst()
        print(f"verification failed: {tag} violated by {_fmt(amount)}", file=sys.stderr)
        return EXIT_VALIDATION
    if not report.converged:
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def _write_series_csv(path, sc, part, sched):
    T = sc.horizon
    vs = sc.loads.vs_array()
    pr = sc.propulsion
    total_pr = np.asarray(sched.p_pr).sum(axis=0)
    speeds = (np.clip(total_pr, 0.0, None) / pr.alpha) ** (1.0 / pr.beta)
    shed = np.zeros(T)
    for p in part.parts:
        p_no = np.zeros(T)
        for bi in p.nonvital_blocks:
            p_no += np.asarray(sc.loads.no_blocks[bi].series)
        shed += np.asarray(sched.rho)[p.index] * p_no
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        header = ["t", "speed_kn", "p_pr_mw"]
        header += [f"p_g_{g.id}_mw" for g in sc.generators]
        header += [f"p_e_{e.id}_mw" for e in sc.esms]
        header += ["service_load_mw", "shed_mw"]
        w.writerow(header)
        for t in range(T):
            row = [t + 1, _fmt(float(speeds[t])), _fmt(float(total_pr[t]))]
            row += [_fmt(float(sched.p_g[i, t])) for i in range(len(sc.generators))]
            row += [_fmt(float(sched.p_e[i, t])) for i in range(len(sc.esms))]
            load = float(vs[:, t].sum() + sum(b.series[t] for b in sc.loads.no_blocks))
            row += [_fmt(load), _fmt(float(shed[t]))]
            w.writerow(row)


def cmd_verify(args) -> int:
    sc = _validated(args.scenario)
    try:
        with open(args.schedule) as fh:
            data = json.load(fh)
    except OSError as exc:
        print(f"error: cannot read schedule: {exc}", file=sys.stderr)
        return EXIT_IO
    sched = Schedule.from_dict(data.get("schedule", data))
    part = partition(sc.topology, sc.faults, sc)
    check = verify(sc, part, sched, tol=args.tol)
    print(f"{'tag':<28} max violation")
    for tag in sorted(check.violations):
        print(f"{tag:<28} {_fmt(check.violations[tag])}")
    print(f"passed: {check.passed}")
    return EXIT_OK if check.passed else EXIT_VALIDATION


def cmd_faults(args) -> int:
    sc = _validated(args.scenario)
    part = partition(sc.topology, sc.faults, sc)
    print(f"mode: {part.mode}")
    print(f"coupled zones: {list(part.coupled_zones) or 'none'}")
    for p in part.parts:
        print(
            f"part {p.index}: zones={p.zones} generators={p.generators} "
            f"esms={p.esms} propulsion={bool(p.propulsion_modules)} "
            f"omega_pb={p.omega_pb} omega_sb={p.omega_sb}"
        )
    return EXIT_OK


def cmd_sweep(args) -> int:
    from dataclasses import replace

    sc = _validated(args.scenario)
    distances = [float(d) for d in args.distances.split(",")]
    rows = []
    for d in distances:
        sc_d = replace(sc, voyage=replace(sc.voyage, distance=d))
        try:
            part, inst, sched, report = _solve_one(sc_d, args.algorithm, args)
            rows.append(
                [
                    _fmt(d),
                    _fmt(report.total_cost),
                    _fmt(report.p_ls_total),
                    str(report.n_rs),
                    _fmt(report.d_d),
                    str(report.iterations),
                ]
            )
        except Exception as exc:  # keep sweeping, record the failure
            rows.append([_fmt(d), "error", str(exc), "", "", ""])
    out = sys.stdout
    close = False
    if args.out:
        try:
            out = open(args.out, "w", newline="")
            close = True
        except OSError as exc:
            print(f"error: cannot write sweep: {exc}", file=sys.stderr)
            return EXIT_IO
    w = csv.writer(out)
    w.writerow(["distance_nm", "cost", "p_ls_mwh", "n_rs", "d_d_nm", "iterations"])
    w.writerows(rows)
    if close:
        out.close()
    return EXIT_OK


def cmd_max_distance(args) -> int:
    sc = _validated(args.scenario)
    part = partition(sc.topology, sc.faults, sc)
    try:
        d = oracle.max_distance_bisection(sc, part, tol_nm=args.tol, limit=args.limit)
    except oracle.TooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    print(_fmt(d))
    return EXIT_OK


def cmd_gen_fixture(args) -> int:
    if args.name not in NAMED_FIXTURES:
        print(
            f"unknown fixture {args.name!r}; available: {', '.join(sorted(NAMED_FIXTURES))}",
            file=sys.stderr,
        )
        return EXIT_VALIDATION
    sc = NAMED_FIXTURES[args.name](distance=args.distance) if args.distance else NAMED_FIXTURES[args.name]()
    try:
        save_scenario(sc, args.out)
    except OSError as exc:
        print(f"error: cannot write fixture: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    eps_default = float(os.environ.get("SPS_EPSILON", 1e-2))
    ap = argparse.ArgumentParser(prog="sps", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common_solver(p):
        p.add_argument("-s", "--scenario", required=True)
        p.add_argument("-a", "--algorithm", default="benders", choices=("benders", "lnbd", "oracle"))
        p.add_argument("--epsilon", type=float, default=eps_default)
        p.add_argument("--max-iter", type=int, default=500)
        p.add_argument("--phi", type=float, default=None)
        p.add_argument("--phi-profile", default=None)
        p.add_argument("--limit", type=int, default=20)
        p.add_argument("--tol", type=float, default=1e-6)

    p = sub.add_parser("solve", help="solve a scenario and write report/schedule")
    common_solver(p)
    p.add_argument("--out", default=None)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a schedule file against a scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--schedule", required=True)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("faults", help="print the island partition")
    p.add_argument("--scenario", required=True)
    p.set_defaults(func=cmd_faults)

    p = sub.add_parser("sweep", help="solve over a list of voyage distances")
    common_solver(p)
    p.add_argument("--distances", required=True, help="comma-separated nm values")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("max-distance", help="largest reachable voyage distance")
    p.add_argument("--scenario", required=True)
    p.add_argument("--tol", type=float, default=0.1)
    p.add_argument("--limit", type=int, default=20)
    p.set_defaults(func=cmd_max_distance)

    p = sub.add_parser("gen-fixture", help="write a named scenario fixture")
    p.add_argument("--name", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--distance", type=float, default=None)
    p.set_defaults(func=cmd_gen_fixture)
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
