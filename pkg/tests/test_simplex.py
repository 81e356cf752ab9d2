import numpy as np
import pytest
from pytest import approx
from scipy.optimize import linprog

from idca.exceptions import DimensionMismatchError
from idca.simplex import solve_lp, lp_status_optimal, lp_status_infeasible, lp_status_unbounded
from test_data.test_data import random_polytope


def test_solve_lp_simple():
    result = solve_lp([1.0, 1.0], None, None, [[1, 0], [0, 1], [1, 1]], [0, 0, 1])
    assert result.status == lp_status_optimal
    assert result.objective == approx(1.0)
    assert result.x.sum() == approx(1.0)
    assert result.is_feasible


def test_solve_lp_free_variables():
    result = solve_lp([1.0], None, None, [[1.0]], [-3.0])
    assert result.status == lp_status_optimal
    assert result.x[0] == approx(-3.0)


def test_solve_lp_infeasible():
    result = solve_lp(None, None, None, [[1.0], [-1.0]], [1.0, 0.0])
    assert result.status == lp_status_infeasible
    assert not result.is_feasible
    assert result.x is None


def test_solve_lp_unbounded():
    result = solve_lp([-1.0], None, None, [[1.0]], [0.0])
    assert result.status == lp_status_unbounded
    assert result.objective == -np.inf


def test_solve_lp_redundant_equalities():
    result = solve_lp([1.0, 0.0], [[1, 1], [2, 2]], [1, 2], [[1, 0], [0, 1]], [0, 0])
    assert result.status == lp_status_optimal
    assert result.x == approx([0.0, 1.0], abs=1e-12)


def test_solve_lp_no_rows():
    assert solve_lp(None, n=3).status == lp_status_optimal
    assert solve_lp([1.0, 0.0]).status == lp_status_unbounded
    with pytest.raises(DimensionMismatchError):
        solve_lp()
    with pytest.raises(DimensionMismatchError):
        solve_lp([1.0], None, None, [[1.0, 2.0]], [0.0, 1.0])


def test_solve_lp_degenerate_vertex():
    # four constraints through the origin in the plane, Bland's rule must not cycle
    A = [[1, 0], [0, 1], [1, 1], [1, -1]]
    result = solve_lp([1.0, 1.0], None, None, A, [0, 0, 0, 0])
    assert result.status == lp_status_optimal
    assert result.x == approx([0.0, 0.0], abs=1e-12)


def test_solve_lp_matches_linprog():
    rng = np.random.default_rng(21)
    for _ in range(50):
        n = int(rng.integers(1, 5))
        A, b = random_polytope(rng, n, int(rng.integers(0, 5)))
        c = rng.standard_normal(n)
        ours = solve_lp(c, None, None, A, b)
        ref = linprog(c, A_ub=-A, b_ub=-b, bounds=[(None, None)] * n, method='highs')
        assert ours.status == lp_status_optimal
        assert ours.objective == approx(ref.fun, abs=1e-8)
        assert (A @ ours.x - b).min() >= -1e-9
