"""Exact 0-1 master solver: branch-and-bound vs. exhaustive enumeration."""

import numpy as np
import pytest

from sps.bnb import MasterProblem


def _random_master(rng, n, n_rows=3, n_cuts=3):
    mp = MasterProblem(n=n, c=rng.uniform(-2.0, 2.0, n))
    for _ in range(n_rows):
        coeffs = {int(i): float(rng.uniform(-1, 1)) for i in rng.choice(n, size=min(3, n), replace=False)}
        mp.add_row(coeffs, float(rng.uniform(0.0, 2.0)), "<=")
    for _ in range(n_cuts):
        mp.add_cut(float(rng.uniform(-1, 3)), rng.uniform(-1.0, 1.0, n))
    return mp


@pytest.mark.parametrize("trial", range(10))
def test_matches_exhaustive(trial):
    rng = np.random.default_rng(100 + trial)
    n = int(rng.integers(4, 10))
    mp = _random_master(rng, n)
    try:
        x_bb, v_bb = mp.solve()
    except RuntimeError:
        with pytest.raises(RuntimeError):
            mp.solve_exhaustive()
        return
    x_ex, v_ex = mp.solve_exhaustive()
    assert v_bb == pytest.approx(v_ex, abs=1e-7)
    np.testing.assert_array_equal(x_bb, x_ex)


def test_pure_linear_objective():
    mp = MasterProblem(n=3, c=np.array([1.0, -2.0, 0.5]))
    x, v = mp.solve()
    np.testing.assert_array_equal(x, [0, 1, 0])
    assert v == pytest.approx(-2.0)


def test_cut_floor_respected():
    # single cut mu >= 1 + x0 makes the all-zero point cost 1
    mp = MasterProblem(n=2, c=np.zeros(2))
    mp.add_cut(1.0, np.array([1.0, 0.0]))
    x, v = mp.solve()
    assert v == pytest.approx(1.0)
    assert x[0] == 0.0


def test_mu_lower_bound_used_without_cuts():
    mp = MasterProblem(n=2, c=np.array([0.5, 0.5]), mu_lower=0.0)
    x, v = mp.solve()
    assert v == pytest.approx(0.0)
    np.testing.assert_array_equal(x, [0, 0])


def test_row_infeasible_raises():
    mp = MasterProblem(n=2, c=np.zeros(2))
    mp.add_row({0: 1.0}, 0.5, "<=")
    mp.add_row({0: -1.0}, -0.8, "<=")  # x0 >= 0.8 and x0 <= 0.5
    with pytest.raises(RuntimeError):
        mp.solve()


def test_equality_row():
    mp = MasterProblem(n=3, c=np.array([1.0, 2.0, 3.0]))
    mp.add_row({0: 1.0, 1: 1.0, 2: 1.0}, 2.0, "==")
    x, v = mp.solve()
    np.testing.assert_array_equal(x, [1, 1, 0])
    assert v == pytest.approx(3.0)


def test_nogood_excludes_exactly_one_point():
    mp = MasterProblem(n=3, c=np.array([1.0, 2.0, 3.0]))
    x0, v0 = mp.solve()
    np.testing.assert_array_equal(x0, [0, 0, 0])
    mp.add_nogood(x0)
    x1, v1 = mp.solve()
    np.testing.assert_array_equal(x1, [1, 0, 0])
    assert v1 == pytest.approx(1.0)
    # the excluded point now violates the rows, every other point satisfies them
    assert not mp.rows_satisfied(np.array([0.0, 0.0, 0.0]))
    for bits in ([1, 0, 0], [0, 1, 0], [1, 1, 1], [0, 1, 1]):
        assert mp.rows_satisfied(np.array(bits, dtype=float))


def test_feasibility_cut_excludes_halfspace():
    # 0 >= 0.5 + (x0 - 1)  => x0 <= 0.5, i.e. x0 = 0
    mp = MasterProblem(n=2, c=np.array([-1.0, -1.0]))
    mp.add_feasibility_cut(0.5 - 1.0, np.array([1.0, 0.0]))
    x, v = mp.solve()
    assert x[0] == 0.0
    assert x[1] == 1.0


def test_deterministic_tie_break():
    # two optimal assignments; the lexicographically smaller one must win
    mp = MasterProblem(n=2, c=np.array([1.0, 1.0]))
    mp.add_row({0: -1.0, 1: -1.0}, -1.0, "<=")  # x0 + x1 >= 1
    x_bb, _ = mp.solve()
    x_ex, _ = mp.solve_exhaustive()
    np.testing.assert_array_equal(x_bb, x_ex)
    np.testing.assert_array_equal(x_bb, [0, 1])
