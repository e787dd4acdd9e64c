"""Optimal vs. low-complexity solver on the same faulted voyage.

Runs the exact decomposition and the time-decoupled variant on a batch of
small instances and prints cost gap, iteration counts, and wall time, with
the brute-force optimum as the yardstick.
"""

import time

from sps import benders, fixtures, lnbd, oracle
from sps.fault_analysis import partition
from sps.problem_builder import build
from sps.verifier import verify


def main():
    print(f"{'seed':>4} {'mode':>10} {'oracle':>9} {'exact':>9} {'fast':>9} "
          f"{'gap%':>6} {'t_ex':>6} {'t_fa':>6}")
    for seed in range(8):
        sc = fixtures.random_small_scenario(seed)
        part = partition(sc.topology, sc.faults, sc)
        inst = build(sc, part)

        _, obj = oracle.enumerate_solve(inst)

        t0 = time.perf_counter()
        sched_b, rep_b = benders.run(inst)
        t_ex = time.perf_counter() - t0

        t0 = time.perf_counter()
        sched_l, rep_l = lnbd.run(inst)
        t_fa = time.perf_counter() - t0

        assert verify(sc, part, sched_b).passed
        assert verify(sc, part, sched_l).passed
        gap = 100.0 * (rep_l.total_cost - obj) / max(1.0, abs(obj))
        print(
            f"{seed:>4} {part.mode:>10} {obj:>9.2f} {rep_b.total_cost:>9.2f} "
            f"{rep_l.total_cost:>9.2f} {gap:>6.2f} {t_ex:>6.2f} {t_fa:>6.2f}"
        )
    print()
    print("The exact solver tracks the oracle; the decoupled variant trades a")
    print("few percent of cost for per-interval solves that scale with T, not 2^T.")


if __name__ == "__main__":
    main()
