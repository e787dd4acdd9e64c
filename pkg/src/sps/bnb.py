"""Small exact 0-1 solver for the decomposition master problem.

min  c'x + mu   over x in {0,1}^n, mu >= mu_lower
s.t. linear rows over x, and cut rows  mu >= r_k + s_k'x.

Best-bound branch and bound on top of scipy's HiGHS LP.  Branching order is
the fixed variable order with the zero branch explored first, which makes
the search deterministic and biases ties toward small assignments.  An
exhaustive path doubles as an independent cross-check on tiny instances.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

_INT_TOL = 1e-6
_GAP_TOL = 1e-9


@dataclass
class MasterProblem:
    n: int
    c: np.ndarray  # objective on the binaries
    a_ub: list = field(default_factory=list)  # rows over x only: a'x <= b
    b_ub: list = field(default_factory=list)
    a_eq: list = field(default_factory=list)
    b_eq: list = field(default_factory=list)
    cuts: list = field(default_factory=list)  # (r, s): mu >= r + s'x
    mu_lower: float = 0.0

    def add_row(self, coeffs: dict, rhs: float, sense: str):
        a = np.zeros(self.n)
        for i, v in coeffs.items():
            a[i] = v
        if sense == "==":
            self.a_eq.append(a)
            self.b_eq.append(rhs)
        else:
            self.a_ub.append(a)
            self.b_ub.append(rhs)

    def add_cut(self, level: float, slope: np.ndarray):
        self.cuts.append((float(level), np.asarray(slope, dtype=float)))

    def add_feasibility_cut(self, level: float, slope: np.ndarray):
        # 0 >= level + slope'(x)  =>  slope'x <= -level
        self.a_ub.append(np.asarray(slope, dtype=float).copy())
        self.b_ub.append(-float(level))

    def add_nogood(self, x: np.ndarray):
        """Exclude exactly one 0-1 assignment (Hamming-distance >= 1 row)."""
        x = np.asarray(x, dtype=float)
        a = np.where(x > 0.5, 1.0, -1.0)
        self.a_ub.append(a)
        self.b_ub.append(float(np.sum(x > 0.5)) - 1.0)

    # ------------------------------------------------------------------
    def mu_at(self, x: np.ndarray) -> float:
        mu = self.mu_lower
        for r, s in self.cuts:
            mu = max(mu, r + float(s @ x))
        return mu

    def value_at(self, x: np.ndarray) -> float:
        return float(self.c @ x) + self.mu_at(x)

    def rows_satisfied(self, x: np.ndarray, tol: float = 1e-6) -> bool:
        for a, b in zip(self.a_ub, self.b_ub):
            if float(a @ x) > b + tol:
                return False
        for a, b in zip(self.a_eq, self.b_eq):
            if abs(float(a @ x) - b) > tol:
                return False
        return True

    # ------------------------------------------------------------------
    def _lp(self, lo: np.ndarray, hi: np.ndarray):
        """LP relaxation with mu appended as variable n."""
        n = self.n
        cc = np.concatenate([self.c, [1.0]])
        a_ub, b_ub = [], []
        for a, b in zip(self.a_ub, self.b_ub):
            a_ub.append(np.concatenate([a, [0.0]]))
            b_ub.append(b)
        for r, s in self.cuts:
            a_ub.append(np.concatenate([s, [-1.0]]))  # s'x - mu <= -r
            b_ub.append(-r)
        a_eq = [np.concatenate([a, [0.0]]) for a in self.a_eq] or None
        b_eq = list(self.b_eq) or None
        bounds = [(lo[i], hi[i]) for i in range(n)] + [(self.mu_lower, None)]
        for method in ("highs", "highs-ds", "highs-ipm"):
            res = linprog(
                cc,
                A_ub=np.array(a_ub) if a_ub else None,
                b_ub=np.array(b_ub) if b_ub else None,
                A_eq=np.array(a_eq) if a_eq is not None else None,
                b_eq=np.array(b_eq) if b_eq is not None else None,
                bounds=bounds,
                method=method,
            )
            # status 2 is a clean infeasibility certificate; anything else
            # that is not success gets one more try with the next method
            if res.success or res.status == 2:
                break
        return res

    def solve(self, node_limit: int = 200000):
        """Exact optimum by branch and bound; returns (x, objective)."""
        n = self.n
        lo0 = np.zeros(n)
        hi0 = np.ones(n)
        counter = itertools.count()
        root = self._lp(lo0, hi0)
        if not root.success:
            raise RuntimeError(f"master root LP failed: {root.message}")
        heap = [(root.fun, next(counter), lo0, hi0, root.x)]
        best_x = None
        best_val = np.inf
        nodes = 0
        while heap:
            bound, _, lo, hi, x = heapq.heappop(heap)
            if bound >= best_val - _GAP_TOL:
                continue
            nodes += 1
            if nodes > node_limit:
                raise RuntimeError("master branch-and-bound node limit exceeded")
            frac = [i for i in range(n) if min(x[i] - lo[i], hi[i] - x[i]) > 0 and abs(x[i] - round(x[i])) > _INT_TOL]
            if not frac:
                xr = np.round(x[:n])
                val = self.value_at(xr)
                if val < best_val - _GAP_TOL or (
                    val < best_val + _GAP_TOL
                    and best_x is not None
                    and tuple(xr) < tuple(best_x)
                ):
                    best_val = min(best_val, val)
                    best_x = xr
                continue
            i = frac[0]
            for v in (0.0, 1.0):
                lo2, hi2 = lo.copy(), hi.copy()
                lo2[i] = hi2[i] = v
                res = self._lp(lo2, hi2)
                if not res.success:
                    if res.status == 2:  # infeasible child
                        continue
                    raise RuntimeError(f"master node LP failed: {res.message}")
                if res.fun < best_val - _GAP_TOL:
                    heapq.heappush(heap, (res.fun, next(counter), lo2, hi2, res.x))
        if best_x is None:
            raise RuntimeError("master problem is infeasible")
        return best_x, best_val

    def solve_exhaustive(self):
        """Brute force over all assignments (cross-check path, n <= 16)."""
        if self.n > 16:
            raise ValueError("exhaustive master limited to 16 binaries")
        best_x, best_val = None, np.inf
        for bits in itertools.product((0.0, 1.0), repeat=self.n):
            x = np.array(bits)
            if not self.rows_satisfied(x):
                continue
            val = self.value_at(x)
            if val < best_val - _GAP_TOL:
                best_val, best_x = val, x
        if best_x is None:
            raise RuntimeError("master problem is infeasible")
        return best_x, best_val
