"""
Polyhedral machinery for C = {x | A x >= b}: activity, pseudo-faces, normal and recession cones, LP feasibility and
the metric projection onto C.

Constraint indices are 0-based.  The normal cone at a point of the pseudo-face alpha is pos{-A_i^T : i in alpha}.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import TYPE_CHECKING, Tuple

import numpy as np
from scipy.optimize import nnls

from idca.exceptions import InfeasiblePointError, TooManyConstraintsError, EmptyFaceError, NumericalFailureError
from idca.idca_variables import activity_tolerance, feasibility_tolerance, enumeration_cap, strict_slack_tolerance
from idca.qp_solver import QpSubproblem, solve_qp
from idca.simplex import solve_lp, lp_status_infeasible, lp_status_optimal
from idca.utilities import as_vector

if TYPE_CHECKING:
    from idca.model import IqpProblem

logger = logging.getLogger(__name__)

cone_kind_normal = 'normal'
cone_kind_recession = 'recession'


@dataclass(frozen=True)
class FeasibilityResult:
    is_feasible: bool
    witness: np.ndarray = None


@dataclass(frozen=True)
class PseudoFaceDescriptor:
    """
    The pseudo-face {x | A_alpha x = b_alpha, A_rest x > b_rest}.  face_recession_dim_hint is n - rank(A_alpha), an
    upper bound on the dimension of the face.
    """

    alpha: Tuple[int, ...]
    is_empty: bool
    face_recession_dim_hint: int = None


@dataclass(frozen=True)
class ConeDescription:
    """
    Normal cones are stored by generators (conic hull of the rows of generators), recession cones by constraints
    A_eq v = 0, A_ineq v >= 0.  is_trivial means the cone is {0}.
    """

    kind: str
    alpha: Tuple[int, ...]
    generators: np.ndarray = field(default=None, repr=False)
    A_eq: np.ndarray = field(default=None, repr=False)
    A_ineq: np.ndarray = field(default=None, repr=False)
    is_trivial: bool = None
    direction: np.ndarray = None

    def contains(self, v: np.ndarray, tol: float = 1e-9) -> bool:
        v = np.asarray(v, dtype=np.float64)
        if self.kind == cone_kind_recession:
            ok_eq = self.A_eq.shape[0] == 0 or np.abs(self.A_eq @ v).max() <= tol
            ok_ineq = self.A_ineq.shape[0] == 0 or (self.A_ineq @ v).min() >= -tol
            return bool(ok_eq and ok_ineq)
        return conic_distance(self.generators, v) <= tol


def _split_rows(p: 'IqpProblem', alpha):
    alpha = tuple(sorted(int(i) for i in alpha))
    mask = np.zeros(p.m, dtype=bool)
    mask[list(alpha)] = True
    return alpha, mask


def lp_feasible(Aeq: np.ndarray = None, beq: np.ndarray = None, Aineq: np.ndarray = None, bineq: np.ndarray = None,
                n: int = None) -> FeasibilityResult:
    """
    Decide whether {x | Aeq x = beq, Aineq x >= bineq} is nonempty with the phase 1 simplex.

    Parameters
    ----------
    Aeq
        optional, equality rows
    beq
        optional, equality right hand side
    Aineq
        optional, inequality rows
    bineq
        optional, inequality right hand side
    n
        number of variables if no matrix is provided

    Returns
    -------
    FeasibilityResult
        is_feasible and, when feasible, a witness satisfying every constraint to within 1e-9
    """

    result = solve_lp(None, Aeq, beq, Aineq, bineq, n=n)
    if result.status == lp_status_infeasible:
        return FeasibilityResult(False, None)
    witness = result.x
    worst = 0.0
    if Aeq is not None and np.asarray(Aeq).size:
        worst = max(worst, float(np.abs(np.asarray(Aeq) @ witness - np.asarray(beq)).max()))
    if Aineq is not None and np.asarray(Aineq).size:
        worst = max(worst, float(-(np.asarray(Aineq) @ witness - np.asarray(bineq)).min()))
    if worst > feasibility_tolerance * max(1.0, float(np.abs(witness).max(initial=0.0))):
        raise NumericalFailureError('lp_feasible: phase 1 witness violates the constraints by {}'.format(worst))
    return FeasibilityResult(True, witness)


def active_set(p: 'IqpProblem', x: np.ndarray, act_tol: float = activity_tolerance) -> Tuple[int, ...]:
    """
    Indices i with |A_i x - b_i| <= act_tol.

    Parameters
    ----------
    p
        problem
    x
        point of C, feasible to within act_tol
    act_tol
        activity tolerance

    Returns
    -------
    tuple
        sorted active constraint indices
    """

    x = as_vector(x, p.n, 'active_set x')
    res = p.residuals(x)
    if res.min() < -act_tol:
        raise InfeasiblePointError('active_set: point violates constraint {} by {}'.format(int(res.argmin()), -res.min()))
    return tuple(int(i) for i in np.nonzero(np.abs(res) <= act_tol)[0])


def maximize_slack(p: 'IqpProblem', alpha) -> float:
    """
    max s subject to A_alpha x = b_alpha, A_rest x >= b_rest + s, s <= 1.  Returns -inf when the equalities alone
    are inconsistent.
    """

    alpha, mask = _split_rows(p, alpha)
    rest = ~mask
    n_rest = int(rest.sum())
    Aeq = np.hstack([p.A[mask], np.zeros((len(alpha), 1))])
    beq = p.b[mask]
    Aineq = np.vstack([np.hstack([p.A[rest], -np.ones((n_rest, 1))]),
                       np.hstack([np.zeros((1, p.n)), -np.ones((1, 1))])])
    bineq = np.concatenate([p.b[rest], [-1.0]])
    c = np.zeros(p.n + 1)
    c[-1] = -1.0
    result = solve_lp(c, Aeq, beq, Aineq, bineq)
    if result.status != lp_status_optimal:
        return -np.inf
    return float(result.x[-1])


def face_is_nonempty(p: 'IqpProblem', alpha) -> bool:
    """
    Whether the closed face {A_alpha x = b_alpha, A_rest x >= b_rest} has a point
    """

    alpha, mask = _split_rows(p, alpha)
    return lp_feasible(p.A[mask], p.b[mask], p.A[~mask], p.b[~mask], n=p.n).is_feasible


def enumerate_pseudo_faces(p: 'IqpProblem', cap: int = enumeration_cap, slack_tol: float = strict_slack_tolerance):
    """
    All index sets alpha whose pseudo-face is nonempty, in order of size then lexicographic.  Strictness of the
    inactive rows is certified by slack maximization (nonempty iff the optimal slack exceeds slack_tol).  Supersets of
    an index set whose closed face is empty are skipped without an LP.

    Parameters
    ----------
    p
        problem
    cap
        largest m accepted
    slack_tol
        optimal slack must exceed this

    Returns
    -------
    list
        list of PseudoFaceDescriptor, all with is_empty False
    """

    if p.m > cap:
        raise TooManyConstraintsError('enumerate_pseudo_faces: m={} exceeds the enumeration cap {}'.format(p.m, cap))
    faces = []
    closed_empty = set()
    for size in range(p.m + 1):
        for alpha in combinations(range(p.m), size):
            if size and any(alpha[:j] + alpha[j + 1:] in closed_empty for j in range(size)):
                closed_empty.add(alpha)
                continue
            slack = maximize_slack(p, alpha)
            if slack < -slack_tol:
                closed_empty.add(alpha)
            elif slack > slack_tol:
                rank = int(np.linalg.matrix_rank(p.A[list(alpha)])) if size else 0
                faces.append(PseudoFaceDescriptor(alpha, False, p.n - rank))
    logger.debug('enumerate_pseudo_faces: {} nonempty pseudo-faces out of {} index sets'.format(len(faces), 2 ** p.m))
    return faces


def normal_cone_generators(p: 'IqpProblem', alpha) -> ConeDescription:
    """
    Normal cone of C along the pseudo-face alpha, generated by -A_i^T for i in alpha.  An empty alpha gives {0}.
    """

    alpha, mask = _split_rows(p, alpha)
    gens = -p.A[list(alpha)] if alpha else np.zeros((0, p.n))
    return ConeDescription(cone_kind_normal, alpha, generators=gens, is_trivial=len(alpha) == 0 or not np.any(gens))


def find_nonzero_direction(Aeq: np.ndarray, Aineq: np.ndarray, n_direction: int, n_vars: int = None):
    """
    Search the polyhedral cone {z | Aeq z = 0, Aineq z >= 0} for a point whose leading n_direction entries v are
    nonzero.  Runs up to 2 * n_direction LP probes, each pinning one v_j to +1 or -1 inside the slab -1 <= v <= 1.

    Returns
    -------
    np.ndarray
        the first feasible probe's z, or None if every probe is infeasible
    """

    for j, sign in coordinate_probes(n_direction):
        z = run_direction_probe(Aeq, Aineq, n_direction, j, sign, n_vars)
        if z is not None:
            return z
    return None


def coordinate_probes(n_direction: int):
    return [(j, sign) for j in range(n_direction) for sign in (1.0, -1.0)]


def run_direction_probe(Aeq: np.ndarray, Aineq: np.ndarray, n_direction: int, j: int, sign: float, n_vars: int = None):
    """
    One coordinate pinning probe of find_nonzero_direction, returns the witness z or None
    """

    n_vars = n_direction if n_vars is None else n_vars
    Aeq = np.zeros((0, n_vars)) if Aeq is None else np.asarray(Aeq, dtype=np.float64).reshape(-1, n_vars)
    Aineq = np.zeros((0, n_vars)) if Aineq is None else np.asarray(Aineq, dtype=np.float64).reshape(-1, n_vars)
    pin = np.zeros((1, n_vars))
    pin[0, j] = 1.0
    slab = np.hstack([np.eye(n_direction), np.zeros((n_direction, n_vars - n_direction))])
    eq_rows = np.vstack([Aeq, pin])
    eq_rhs = np.concatenate([np.zeros(Aeq.shape[0]), [sign]])
    ineq_rows = np.vstack([Aineq, slab, -slab])
    ineq_rhs = np.concatenate([np.zeros(Aineq.shape[0]), -np.ones(2 * n_direction)])
    feas = lp_feasible(eq_rows, eq_rhs, ineq_rows, ineq_rhs)
    return feas.witness if feas.is_feasible else None


def recession_cone(p: 'IqpProblem', alpha) -> ConeDescription:
    """
    Recession cone {v | A_alpha v = 0, A_rest v >= 0} of the face F_alpha, with its triviality decided by the 2n
    coordinate probes.

    Parameters
    ----------
    p
        problem
    alpha
        index set with a nonempty face

    Returns
    -------
    ConeDescription
        recession cone, is_trivial True iff the face is bounded, direction holds a nonzero member otherwise
    """

    alpha, mask = _split_rows(p, alpha)
    if not face_is_nonempty(p, alpha):
        raise EmptyFaceError('recession_cone: face {} is empty'.format(alpha))
    A_eq = p.A[mask]
    A_ineq = p.A[~mask]
    direction = find_nonzero_direction(A_eq, A_ineq, p.n)
    return ConeDescription(cone_kind_recession, alpha, A_eq=A_eq, A_ineq=A_ineq, is_trivial=direction is None,
                           direction=direction)


def conic_distance(generators: np.ndarray, w: np.ndarray) -> float:
    """
    Distance from w to the conic hull of the rows of generators, by nonnegative least squares
    """

    w = np.asarray(w, dtype=np.float64)
    if generators is None or generators.shape[0] == 0:
        return float(np.linalg.norm(w))
    _, rnorm = nnls(np.asarray(generators, dtype=np.float64).T, w)
    return float(rnorm)


def normal_cone_residual(p: 'IqpProblem', x: np.ndarray, w: np.ndarray, act_tol: float = activity_tolerance) -> float:
    """
    Distance from w to the normal cone N_C(x) = pos{-A_i^T : i active at x}.

    Parameters
    ----------
    p
        problem
    x
        point of C
    w
        vector to test for membership
    act_tol
        activity tolerance for choosing the generators

    Returns
    -------
    float
        0 (to rounding) when w lies in N_C(x)
    """

    res = p.residuals(np.asarray(x, dtype=np.float64))
    active = np.nonzero(np.abs(res) <= act_tol)[0]
    return conic_distance(-p.A[active], w)


def project_onto_C(p: 'IqpProblem', u: np.ndarray, x_start: np.ndarray = None, working_set=None, return_solution: bool = False):
    """
    Metric projection of u onto C, argmin ||x - u|| over A x >= b, solved as the QP with H = I and g = -u.

    Parameters
    ----------
    p
        problem
    u
        point to project
    x_start
        optional, feasible warm start
    working_set
        optional, initial working set for the active set solver
    return_solution
        if True return the full QpSolution instead of just the point

    Returns
    -------
    np.ndarray
        P_C(u)
    """

    u = as_vector(u, p.n, 'project_onto_C u')
    sol = solve_qp(QpSubproblem(np.eye(p.n), -u, p.A, p.b), x_start=x_start, working_set=working_set)
    if return_solution:
        return sol
    return sol.x_star
