import warnings

import numpy as np
import pytest
from pytest import approx

from idca.certify import make_piece
from idca.exceptions import NotPositiveDefiniteError, InfeasibleRegionError, VariantMismatchError, \
    DimensionMismatchError
from idca.idca_variables import variant_projection, variant_proximal
from idca.model import make_decomposition
from idca.qp_solver import QpSubproblem, ActiveSetSolver, solve_qp, build_indca2_subproblem
from test_data.test_data import example_problem_arrays, random_polytope, random_spd, random_interior_point, \
    brute_force_qp


def test_qp_subproblem_validation():
    with pytest.raises(NotPositiveDefiniteError):
        QpSubproblem(np.diag([1.0, -1.0]), [0, 0], [[1, 0]], [0])
    with pytest.raises(DimensionMismatchError):
        QpSubproblem(np.eye(2), [0, 0, 0], [[1, 0]], [0])
    sub = QpSubproblem(np.eye(2), [0, 0], [1, 0], [0])
    assert sub.A.shape == (1, 2)
    assert sub.A_eq.shape == (0, 2)
    assert sub.n == 2
    assert sub.m == 1
    assert sub.objective(np.array([1.0, 1.0])) == 1.0


def test_solve_qp_single_cut():
    # min 1/2 ||x||^2 - 2 x1 - 2 x2 subject to x1 + x2 <= 1
    sub = QpSubproblem(np.eye(2), [-2.0, -2.0], [[-1.0, -1.0]], [-1.0])
    sol = solve_qp(sub)
    assert sol.x_star == approx([0.5, 0.5], abs=1e-12)
    assert sol.active == (0,)
    assert sol.working_set == (0,)
    assert sol.multipliers == approx([1.5], abs=1e-12)
    assert sol.kkt_residual <= 1e-10


def test_solve_qp_interior_minimizer():
    sub = QpSubproblem(2.0 * np.eye(2), [-1.0, 0.0], [[1.0, 0.0]], [-5.0])
    sol = solve_qp(sub)
    assert sol.x_star == approx([0.5, 0.0], abs=1e-12)
    assert sol.active == ()
    assert sol.multipliers == approx([0.0])


def test_solve_qp_equality_rows():
    sub = QpSubproblem(np.eye(2), [0.0, 0.0], np.zeros((0, 2)), [], A_eq=[[1.0, 1.0]], b_eq=[1.0])
    sol = solve_qp(sub)
    assert sol.x_star == approx([0.5, 0.5], abs=1e-12)
    assert sol.eq_multipliers == approx([0.5], abs=1e-12)


def test_solve_qp_dependent_equality_rows():
    sub = QpSubproblem(np.eye(2), [0.0, 0.0], [[1.0, 0.0]], [-5.0], A_eq=[[1.0, 1.0], [2.0, 2.0]], b_eq=[1.0, 2.0])
    assert ActiveSetSolver(sub).eq_rows == [0]
    with warnings.catch_warnings():
        warnings.simplefilter('error')
        sol = solve_qp(sub)
    assert sol.x_star == approx([0.5, 0.5], abs=1e-12)
    assert sol.eq_multipliers == approx([0.5, 0.0], abs=1e-12)
    assert sol.kkt_residual <= 1e-12
    assert make_piece(2, Aeq=[[1.0, 1.0], [2.0, 2.0]], beq=[1.0, 2.0]).project(np.zeros(2)) == approx([0.5, 0.5])

    inconsistent = QpSubproblem(np.eye(2), [0.0, 0.0], np.zeros((0, 2)), [], A_eq=[[1.0, 1.0], [2.0, 2.0]],
                                b_eq=[1.0, 3.0])
    with pytest.raises(InfeasibleRegionError):
        solve_qp(inconsistent)


def test_solve_qp_infeasible_region():
    sub = QpSubproblem(np.eye(1), [0.0], [[1.0], [-1.0]], [1.0, 0.0])
    with pytest.raises(InfeasibleRegionError):
        solve_qp(sub)


def test_solve_qp_degenerate_vertex():
    # three cuts through the minimizer's vertex (0, 0), one of them redundant
    sub = QpSubproblem(np.eye(2), [1.0, 1.0], [[1, 0], [0, 1], [1, 1]], [0, 0, 0])
    sol = solve_qp(sub, x_start=np.array([1.0, 1.0]))
    assert sol.x_star == approx([0.0, 0.0], abs=1e-12)
    assert set(sol.active) == {0, 1, 2}
    assert len(sol.working_set) == 2
    stationarity = sub.H @ sol.x_star + sub.g - sub.A.T @ sol.multipliers
    assert np.abs(stationarity).max() <= 1e-10
    assert sol.multipliers.min() >= 0


def test_active_set_solver_independent_rows():
    sub = QpSubproblem(np.eye(2), [0, 0], [[1, 0], [2, 0], [0, 1], [1, 1]], [0, 0, 0, 0])
    solver = ActiveSetSolver(sub)
    assert solver._independent_rows([3, 1, 0, 2]) == [0, 2]


def test_solve_qp_matches_brute_force():
    rng = np.random.default_rng(41)
    for _ in range(200):
        n = int(rng.integers(1, 4))
        extra = int(rng.integers(0, 7 - 2 * n)) if 2 * n < 6 else 0
        A, b = random_polytope(rng, n, extra)
        H = random_spd(rng, n)
        g = 3.0 * rng.standard_normal(n)
        start = random_interior_point(rng, A, b, n) if rng.random() < 0.5 else None
        sol = solve_qp(QpSubproblem(H, g, A, b), x_start=start)
        expected = brute_force_qp(H, g, A, b)
        assert sol.x_star == approx(expected, abs=1e-8)
        assert (A @ sol.x_star - b).min() >= -1e-9
        assert sol.multipliers.min() >= 0


def test_build_indca2_subproblem():
    p = example_problem_arrays()
    dc = make_decomposition(p, variant_proximal, eta=3.0)
    sub = build_indca2_subproblem(p, dc, np.array([1.0, 0.0]), np.array([1.0, 0.0]), 1.0 / 3.0)
    assert (sub.H == np.diag([5.0, 1.0])).all()
    assert sub.g == approx([-3.0, 0.0])
    assert solve_qp(sub).x_star == approx([0.6, 0.0], abs=1e-12)

    sub = build_indca2_subproblem(p, dc, np.array([1.0, 0.0]), np.array([2.0, 0.0]), 1.0 / 3.0)
    assert sub.g == approx([-3.0 + 1.0 / 3.0, 0.0])

    with pytest.raises(VariantMismatchError):
        build_indca2_subproblem(p, make_decomposition(p, variant_projection, eta=3.0), [1, 0], [1, 0], 0.1)
