import numpy as np
import pytest
from pytest import approx

from idca.certify import kkt_certificate, avi_check, verify_strong_convexity, qc_check, make_piece, make_component, \
    distance_to_component, component_convergence_check, component_separation, verdict_vacuous, verdict_satisfied, \
    verdict_violated, qc_holds, qc_fails
from idca.convenience import example_components, point_component, solve_problem
from idca.engine import algo_indca1
from idca.exceptions import EmptyFaceError, NoComponentsError, TooManyConstraintsError, DimensionMismatchError
from idca.geometry import find_nonzero_direction, conic_distance
from idca.idca_variables import variant_projection, variant_proximal
from idca.model import make_decomposition
from idca.problem_file import parse_problem_document
from test_data.test_data import example_problem_arrays, example_eta, example_gamma, boxdata, halfplane_document, \
    too_many_rows_document, random_indefinite, random_planar_cone, ray_sampling_intersects


def test_kkt_certificate_example_points():
    p = example_problem_arrays()
    cert = kkt_certificate(p, [0.25, 0.0])
    assert cert.is_kkt
    assert cert.multipliers == approx([0.0, 0.0, 0.5], abs=1e-12)
    assert cert.stationarity_residual <= 1e-12

    cert = kkt_certificate(p, [0.25, 0.25])
    assert cert.is_kkt
    assert cert.multipliers == approx([0.5, 0.0, 0.0], abs=1e-12)

    cert = kkt_certificate(p, [2.0, -2.0])
    assert cert.is_kkt
    assert cert.multipliers == approx([0.0, 4.0, 0.0], abs=1e-12)


def test_kkt_certificate_rejects():
    p = example_problem_arrays()
    cert = kkt_certificate(p, [1.0, 0.0])
    assert not cert.is_kkt
    assert cert.stationarity_residual == approx(2.0)
    assert cert.feasibility_violation == 0.0

    cert = kkt_certificate(p, [0.0, 0.0])
    assert not cert.is_kkt
    assert cert.feasibility_violation == approx(0.25)
    assert cert.stationarity_residual == approx(0.0, abs=1e-12)


def test_avi_check():
    p = example_problem_arrays()
    assert avi_check(p, [0.25, 0.0], samples=50, seed=1).passed
    report = avi_check(p, [1.0, 0.0], samples=50, seed=1)
    assert not report.passed
    assert report.worst_value < 0
    assert report.samples == 50


def test_strong_convexity_both_variants():
    p = example_problem_arrays()
    for variant in (variant_projection, variant_proximal):
        dc = make_decomposition(p, variant, eta=example_eta)
        assert dc.rho == 1.0
        report = verify_strong_convexity(dc.Q2, dc.rho, samples=10000, seed=3)
        assert report.passed
        assert report.worst_slack >= -1e-9
        assert report.samples == 10000


def test_strong_convexity_detects_overclaim():
    report = verify_strong_convexity(np.diag([1.0, 5.0]), 2.0, samples=1000, seed=4)
    assert not report.passed
    assert report.worst_slack < 0
    h = report.witness_y - report.witness_x
    assert 0.5 * h @ np.diag([1.0, 5.0]) @ h - h @ h == approx(report.worst_slack)
    with pytest.raises(ValueError):
        verify_strong_convexity(np.eye(2), 1.0, samples=0)
    with pytest.raises(DimensionMismatchError):
        verify_strong_convexity(np.ones((2, 3)), 1.0)


def test_qc_example_fails():
    report = qc_check(example_problem_arrays())
    assert report.overall == qc_fails
    assert [face.alpha for face in report.per_face] == [(), (0,), (1,), (2,), (0, 2), (1, 2)]
    assert report.verdict_for(()).verdict == verdict_satisfied
    assert report.verdict_for((2,)).verdict == verdict_vacuous
    assert report.verdict_for((0, 2)).verdict == verdict_vacuous
    assert report.verdict_for((2, 1)).verdict == verdict_vacuous

    face = report.verdict_for((0,))
    assert face.verdict == verdict_violated
    assert face.witness == approx([1.0, 1.0], abs=1e-9)
    assert face.multipliers == approx([2.0], abs=1e-9)
    assert face.witness_residual <= 1e-8

    face = report.verdict_for((1,))
    assert face.verdict == verdict_violated
    assert face.witness == approx([1.0, -1.0], abs=1e-9)

    with pytest.raises(KeyError):
        report.verdict_for((0, 1))


def test_qc_dask_matches_serial():
    p = example_problem_arrays()
    serial = qc_check(p)
    threaded = qc_check(p, use_dask=True)
    assert threaded.overall == serial.overall
    assert [(f.alpha, f.verdict) for f in threaded.per_face] == [(f.alpha, f.verdict) for f in serial.per_face]


def test_qc_box_holds_vacuously():
    report = qc_check(boxdata)
    assert report.overall == qc_holds
    assert len(report.per_face) == 9
    assert all(face.verdict == verdict_vacuous for face in report.per_face)


def test_qc_flat_direction():
    p = parse_problem_document(halfplane_document).problem
    report = qc_check(p)
    assert report.overall == qc_fails
    face = report.verdict_for(())
    assert face.verdict == verdict_violated
    assert face.witness == approx([1.0, 0.0], abs=1e-9)
    assert report.verdict_for((0,)).verdict == verdict_satisfied


def test_coordinate_probes_match_ray_sampling():
    rng = np.random.default_rng(43)
    outcomes = set()
    for _ in range(200):
        Q = random_indefinite(rng, 2)
        _, normals = random_planar_cone(rng)
        targets, _ = random_planar_cone(rng)
        # z = (v, mu): v in the cone, Q v = targets^T mu, mu >= 0
        Aeq = np.hstack([Q, -targets.T])
        Aineq = np.vstack([np.hstack([normals, np.zeros((2, 2))]), np.hstack([np.zeros((2, 2)), np.eye(2)])])
        z = find_nonzero_direction(Aeq, Aineq, 2, 4)
        assert (z is not None) == ray_sampling_intersects(Q, normals, targets)
        if z is not None:
            v = z[:2]
            assert np.abs(v).max() == approx(1.0)
            assert (normals @ v).min() >= -1e-9
            assert conic_distance(targets, Q @ v) <= 1e-8
        outcomes.add(z is not None)
    assert outcomes == {True, False}


def test_qc_cap():
    with pytest.raises(TooManyConstraintsError):
        qc_check(parse_problem_document(too_many_rows_document).problem)


def test_components():
    with pytest.raises(EmptyFaceError):
        make_component([], 'nothing')
    with pytest.raises(EmptyFaceError):
        make_component([make_piece(1, Aineq=[[1.0], [-1.0]], bineq=[1.0, 0.0])], 'empty')
    piece = make_piece(2, Aeq=[[1.0, -1.0]], beq=[0.0])
    assert piece.Aineq.shape == (0, 2)
    assert piece.project(np.array([1.0, 0.0])) == approx([0.5, 0.5], abs=1e-12)


def test_distance_to_component():
    f1, f2, point = example_components()
    assert f1.name == 'F1'
    assert distance_to_component(f1, [0.25, 0.0]) == approx(0.25, abs=1e-12)
    assert distance_to_component(f1, [1.0, 1.0]) == approx(0.0, abs=1e-12)
    # nearest point of F2 is its vertex (1/4, -1/4)
    assert distance_to_component(f2, [1.0, 1.0]) == approx(np.sqrt(2.125), abs=1e-12)
    assert distance_to_component(point, [0.25, 0.25]) == approx(0.25, abs=1e-12)
    assert distance_to_component(point_component([0.0, 0.0]), [3.0, 4.0]) == approx(5.0, abs=1e-12)


def test_component_convergence():
    p = example_problem_arrays()
    comps = example_components()
    _, _, case3 = solve_problem(p, [0.25, 0.125], algo_indca1, example_eta, example_gamma)
    report = component_convergence_check(case3.trace, comps)
    assert report.closest == 'F1'
    assert report.converged
    assert report.objective_spread == approx(0.0, abs=1e-12)
    assert set(report.distances) == {'F1', 'F2', 'P'}
    assert len(report.distances['F1']) == len(case3.trace)

    _, _, case4 = solve_problem(p, [1.0, 0.0], algo_indca1, example_eta, example_gamma)
    report = component_convergence_check(case4.trace, comps)
    assert report.closest == 'P'
    assert report.converged
    assert report.final_distance == approx(0.0, abs=1e-12)

    with pytest.raises(NoComponentsError):
        component_convergence_check(case4.trace, [])


def test_component_convergence_far_away():
    p = example_problem_arrays()
    _, _, case4 = solve_problem(p, [1.0, 0.0], algo_indca1, example_eta, example_gamma)
    report = component_convergence_check(case4.trace, [point_component([5.0, 5.0], 'far')])
    assert report.closest == 'far'
    assert not report.converged


def test_component_separation():
    report = component_separation(example_components())
    assert report.pairwise[('F1', 'F2')] == approx(0.5, abs=1e-9)
    assert report.pairwise[('F1', 'P')] == approx(0.25, abs=1e-9)
    assert report.pairwise[('F2', 'P')] == approx(0.25, abs=1e-9)
    assert report.delta == approx(0.25, abs=1e-9)
    with pytest.raises(NoComponentsError):
        component_separation(example_components()[:1])
