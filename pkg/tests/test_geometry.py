import numpy as np
import pytest
from pytest import approx

from idca.exceptions import InfeasiblePointError, TooManyConstraintsError, EmptyFaceError
from idca.geometry import lp_feasible, active_set, maximize_slack, face_is_nonempty, enumerate_pseudo_faces, \
    normal_cone_generators, recession_cone, conic_distance, normal_cone_residual, project_onto_C, \
    find_nonzero_direction, coordinate_probes, cone_kind_normal, cone_kind_recession
from idca.model import build_problem
from idca.problem_file import parse_problem_document
from test_data.test_data import example_problem_arrays, example_pseudo_faces, boxdata, random_polytope, \
    brute_force_projection, too_many_rows_document, random_interior_point


def test_lp_feasible():
    res = lp_feasible(None, None, [[1, -1], [1, 1], [1, 0]], [0, 0, 0.25])
    assert res.is_feasible
    assert (np.array([[1, -1], [1, 1], [1, 0]]) @ res.witness - np.array([0, 0, 0.25])).min() >= -1e-9
    assert not lp_feasible(None, None, [[1.0], [-1.0]], [1.0, 0.0]).is_feasible
    assert lp_feasible([[1, 1]], [2], [[1, 0]], [3]).is_feasible
    assert not lp_feasible([[1, 1], [1, 1]], [2, 3], n=2).is_feasible


def test_active_set():
    p = example_problem_arrays()
    assert active_set(p, [0.25, 0.0]) == (2,)
    assert active_set(p, [0.25, 0.25]) == (0, 2)
    assert active_set(p, [1.0, -1.0]) == (1,)
    assert active_set(p, [1.0, 0.5]) == ()
    assert active_set(p, [0.25 - 1e-12, 0.0]) == (2,)
    with pytest.raises(InfeasiblePointError):
        active_set(p, [0.0, 0.0])


def test_maximize_slack():
    p = example_problem_arrays()
    assert maximize_slack(p, ()) == approx(1.0)
    assert maximize_slack(p, (0, 2)) == approx(0.5)
    assert maximize_slack(p, (0, 1)) < 0


def test_face_is_nonempty():
    p = example_problem_arrays()
    assert face_is_nonempty(p, (0, 2))
    assert face_is_nonempty(p, [2, 0])
    assert not face_is_nonempty(p, (0, 1))


def test_enumerate_pseudo_faces_example():
    faces = enumerate_pseudo_faces(example_problem_arrays())
    assert [f.alpha for f in faces] == example_pseudo_faces
    assert not any(f.is_empty for f in faces)
    assert [f.face_recession_dim_hint for f in faces] == [2, 1, 1, 1, 0, 0]


def test_enumerate_pseudo_faces_box():
    faces = enumerate_pseudo_faces(boxdata)
    # interior, four edges, four vertices
    assert len(faces) == 9
    assert sum(1 for f in faces if len(f.alpha) == 2) == 4
    assert (0, 1) in [f.alpha for f in faces]
    assert (0, 2) not in [f.alpha for f in faces]


def test_enumerate_pseudo_faces_cap():
    with pytest.raises(TooManyConstraintsError):
        enumerate_pseudo_faces(example_problem_arrays(), cap=2)
    with pytest.raises(TooManyConstraintsError):
        enumerate_pseudo_faces(parse_problem_document(too_many_rows_document).problem)


def test_normal_cone_generators():
    p = example_problem_arrays()
    cone = normal_cone_generators(p, (2, 0))
    assert cone.kind == cone_kind_normal
    assert cone.alpha == (0, 2)
    assert cone.generators == approx(-np.array([[1.0, -1.0], [1.0, 0.0]]))
    assert not cone.is_trivial
    assert cone.contains(np.array([-2.0, 1.0]))
    assert not cone.contains(np.array([1.0, 0.0]))
    assert normal_cone_generators(p, ()).is_trivial


def test_recession_cone():
    p = example_problem_arrays()
    interior = recession_cone(p, ())
    assert interior.kind == cone_kind_recession
    assert not interior.is_trivial
    assert interior.contains(interior.direction[:2])
    assert interior.contains(np.array([1.0, 0.5]))
    assert not interior.contains(np.array([0.0, 1.0]))

    edge = recession_cone(p, (0,))
    assert not edge.is_trivial
    v = edge.direction
    assert v[0] == approx(v[1])
    assert v[0] > 0

    assert recession_cone(p, (2,)).is_trivial
    assert recession_cone(p, (0, 2)).is_trivial
    with pytest.raises(EmptyFaceError):
        recession_cone(p, (0, 1))


def test_box_faces_are_bounded():
    for face in enumerate_pseudo_faces(boxdata):
        assert recession_cone(boxdata, face.alpha).is_trivial


def test_find_nonzero_direction():
    assert len(coordinate_probes(3)) == 6
    z = find_nonzero_direction(None, [[1.0, 0.0], [0.0, 1.0]], 2)
    assert z is not None
    assert z.min() >= -1e-9
    assert np.abs(z).max() == approx(1.0)
    # only the origin satisfies v >= 0 and -v1 - v2 >= 0
    assert find_nonzero_direction(None, [[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]], 2) is None


def test_conic_distance():
    gens = np.array([[1.0, 0.0]])
    assert conic_distance(gens, np.array([-1.0, 0.0])) == approx(1.0)
    assert conic_distance(gens, np.array([2.0, 3.0])) == approx(3.0)
    assert conic_distance(gens, np.array([2.0, 0.0])) == approx(0.0, abs=1e-14)
    assert conic_distance(np.zeros((0, 2)), np.array([3.0, 4.0])) == approx(5.0)


def test_normal_cone_residual():
    p = example_problem_arrays()
    assert normal_cone_residual(p, [0.25, 0.0], [-1.0, 0.0]) == approx(0.0, abs=1e-14)
    assert normal_cone_residual(p, [0.25, 0.0], [1.0, 0.0]) == approx(1.0)
    assert normal_cone_residual(p, [1.0, 0.5], [0.0, 0.0]) == 0.0
    assert normal_cone_residual(p, [0.25, 0.25], [-1.0, 1.0]) == approx(0.0, abs=1e-14)


def test_project_onto_C_example():
    p = example_problem_arrays()
    assert project_onto_C(p, [0.0, 0.0]) == approx([0.25, 0.0], abs=1e-12)
    assert project_onto_C(p, [1.0, 2.0]) == approx([1.5, 1.5], abs=1e-12)
    assert project_onto_C(p, [0.25, 1.0]) == approx([0.625, 0.625], abs=1e-12)
    assert project_onto_C(p, [2.0, 0.5]) == approx([2.0, 0.5], abs=1e-12)
    sol = project_onto_C(p, [0.0, 0.0], return_solution=True)
    assert sol.active == (2,)
    assert sol.multipliers == approx([0.0, 0.0, 0.25], abs=1e-12)


def test_project_onto_C_warm_start():
    p = example_problem_arrays()
    cold = project_onto_C(p, [0.25, 1.0])
    warm = project_onto_C(p, [0.25, 1.0], x_start=np.array([0.25, 0.25]), working_set=(0, 2))
    assert warm == approx(cold, abs=1e-12)
    # an infeasible warm start falls back to the phase 1 witness
    assert project_onto_C(p, [0.25, 1.0], x_start=np.array([0.0, 0.0])) == approx(cold, abs=1e-12)


def test_project_onto_C_matches_brute_force():
    rng = np.random.default_rng(31)
    for _ in range(100):
        n = int(rng.integers(1, 4))
        extra = int(rng.integers(0, 7 - 2 * n)) if 2 * n < 6 else 0
        A, b = random_polytope(rng, n, extra)
        p = build_problem(n, A.shape[0], np.eye(n), np.zeros(n), A, b)
        u = 3.0 * rng.standard_normal(n)
        assert project_onto_C(p, u) == approx(brute_force_projection(A, b, u), abs=1e-8)


def test_projection_properties_on_random_polytopes():
    rng = np.random.default_rng(37)
    for _ in range(60):
        n = int(rng.integers(1, 5))
        A, b = random_polytope(rng, n, int(rng.integers(0, 5)))
        p = build_problem(n, A.shape[0], np.eye(n), np.zeros(n), A, b)
        u = 3.0 * rng.standard_normal(n)
        v = 3.0 * rng.standard_normal(n)
        pu = project_onto_C(p, u)
        pv = project_onto_C(p, v)
        assert (A @ pu - b).min() >= -1e-9
        # idempotent
        assert np.linalg.norm(project_onto_C(p, pu) - pu) <= 1e-10
        # nonexpansive
        assert np.linalg.norm(pu - pv) <= np.linalg.norm(u - v) + 1e-10
        for _ in range(5):
            x = random_interior_point(rng, A, b, n)
            assert (u - pu) @ (x - pu) <= 1e-8


def _example_face_point(rng, kind):
    t = rng.uniform(0.3, 3.0)
    if kind == ():
        return np.array([t, rng.uniform(-0.9, 0.9) * t])
    if kind == (0,):
        return np.array([t, t])
    if kind == (1,):
        return np.array([t, -t])
    if kind == (2,):
        return np.array([0.25, rng.uniform(-0.9, 0.9) * 0.25])
    if kind == (0, 2):
        return np.array([0.25, 0.25])
    return np.array([0.25, -0.25])


def test_active_set_partitions_example():
    p = example_problem_arrays()
    rng = np.random.default_rng(41)
    seen = set()
    for _ in range(1000):
        kind = example_pseudo_faces[int(rng.integers(0, len(example_pseudo_faces)))]
        alpha = active_set(p, _example_face_point(rng, kind))
        assert alpha == kind
        assert sum(1 for face in example_pseudo_faces if face == alpha) == 1
        seen.add(alpha)
    assert seen == set(example_pseudo_faces)
