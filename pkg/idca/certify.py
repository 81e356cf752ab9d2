"""
Independent verification of solver output: KKT certificates, the affine variational inequality, strong convexity
spot checks, the qualification condition over unbounded pseudo-faces, and convergence to user supplied KKT
components.
"""

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, List, Tuple, Dict

import dask
import numpy as np
from scipy.optimize import nnls

from idca.exceptions import NoComponentsError, EmptyFaceError, DimensionMismatchError
from idca.geometry import enumerate_pseudo_faces, recession_cone, conic_distance, lp_feasible, project_onto_C, \
    coordinate_probes, run_direction_probe
from idca.idca_variables import kkt_tolerance, kkt_activity_tolerance, strong_convexity_tolerance, enumeration_cap, \
    qc_witness_tolerance, component_distance_threshold, component_objective_window, \
    component_objective_spread, separation_max_iterations
from idca.model import IqpProblem
from idca.qp_solver import QpSubproblem, solve_qp
from idca.utilities import as_vector

if TYPE_CHECKING:
    from idca.engine import SolveTrace

logger = logging.getLogger(__name__)

verdict_vacuous = 'satisfied_vacuously'
verdict_satisfied = 'satisfied'
verdict_violated = 'violated'
qc_holds = 'holds'
qc_fails = 'fails'


@dataclass(frozen=True)
class KktCertificate:
    x: np.ndarray
    multipliers: np.ndarray
    stationarity_residual: float
    feasibility_violation: float
    complementarity_violation: float
    is_kkt: bool
    tolerance: float = kkt_tolerance


def kkt_certificate(p: IqpProblem, x: np.ndarray, tol: float = kkt_tolerance,
                    act_tol: float = kkt_activity_tolerance) -> KktCertificate:
    """
    Certify x as a KKT point: x feasible and Q x + q = A^T lambda with lambda >= 0 and lambda_i (A_i x - b_i) = 0.
    Multipliers are recovered by nonnegative least squares of Q x + q against the rows active at x, inactive
    multipliers are fixed at zero.

    Parameters
    ----------
    p
        problem
    x
        candidate point, may be infeasible (reported through feasibility_violation)
    tol
        is_kkt requires all three residuals at or below tol
    act_tol
        rows with |A_i x - b_i| <= act_tol are allowed positive multipliers

    Returns
    -------
    KktCertificate
        multipliers and residuals
    """

    x = as_vector(x, p.n, 'kkt_certificate x')
    grad = p.gradient(x)
    res = p.residuals(x)
    active = np.nonzero(np.abs(res) <= act_tol)[0]
    multipliers = np.zeros(p.m)
    if active.size:
        lam, _ = nnls(p.A[active].T, grad)
        multipliers[active] = lam
    stationarity = float(np.linalg.norm(grad - p.A.T @ multipliers))
    feasibility = float(max(0.0, (-res).max()))
    complementarity = float(np.abs(multipliers * res).max())
    is_kkt = stationarity <= tol and feasibility <= tol and complementarity <= tol
    return KktCertificate(x, multipliers, stationarity, feasibility, complementarity, bool(is_kkt), tol)


@dataclass(frozen=True)
class AviReport:
    worst_value: float
    samples: int
    passed: bool


def avi_check(p: IqpProblem, x: np.ndarray, samples: int = 100, seed: int = None, tol: float = kkt_tolerance,
              spread: float = 10.0) -> AviReport:
    """
    Spot check the affine variational inequality <Q x + q, u - x> >= -tol at random feasible u, drawn by projecting
    normal samples around x onto C.
    """

    x = as_vector(x, p.n, 'avi_check x')
    rng = np.random.default_rng(seed)
    grad = p.gradient(x)
    worst = np.inf
    for _ in range(samples):
        u = project_onto_C(p, x + spread * rng.standard_normal(p.n))
        worst = min(worst, float(grad @ (u - x)))
    return AviReport(worst, samples, worst >= -tol)


@dataclass(frozen=True)
class StrongConvexityReport:
    passed: bool
    worst_slack: float
    witness_x: np.ndarray
    witness_y: np.ndarray
    samples: int


def verify_strong_convexity(f2_matrix: np.ndarray, rho: float, samples: int = 10000, seed: int = None,
                            tol: float = strong_convexity_tolerance) -> StrongConvexityReport:
    """
    Check f2(y) >= f2(x) + <grad f2(x), y - x> + rho/2 ||y - x||^2 on random pairs, f2(x) = 1/2 x^T Q2 x.  For a
    quadratic the gap is exactly 1/2 h^T Q2 h with h = y - x, which is what gets evaluated.

    Parameters
    ----------
    f2_matrix
        symmetric matrix Q2
    rho
        claimed modulus
    samples
        number of random pairs
    seed
        rng seed
    tol
        a slack below -tol fails the check

    Returns
    -------
    StrongConvexityReport
        worst slack and the pair attaining it
    """

    if samples < 1:
        raise ValueError('verify_strong_convexity: samples must be at least 1, found {}'.format(samples))
    Q2 = np.asarray(f2_matrix, dtype=np.float64)
    if Q2.ndim != 2 or Q2.shape[0] != Q2.shape[1]:
        raise DimensionMismatchError('verify_strong_convexity: expected a square matrix, found {}'.format(Q2.shape))
    rng = np.random.default_rng(seed)
    xs = rng.standard_normal((samples, Q2.shape[0]))
    ys = rng.standard_normal((samples, Q2.shape[0]))
    h = ys - xs
    quad = (h * (h @ Q2.T)).sum(axis=1)
    sq = (h * h).sum(axis=1)
    slack = 0.5 * quad - 0.5 * rho * sq
    worst = int(np.argmin(slack))
    return StrongConvexityReport(bool(slack[worst] >= -tol), float(slack[worst]), xs[worst], ys[worst], samples)


@dataclass(frozen=True)
class QcFaceVerdict:
    alpha: Tuple[int, ...]
    verdict: str
    witness: np.ndarray = None
    multipliers: np.ndarray = None
    witness_residual: float = None


@dataclass(frozen=True)
class QcReport:
    per_face: List[QcFaceVerdict]
    overall: str

    def verdict_for(self, alpha) -> QcFaceVerdict:
        alpha = tuple(sorted(alpha))
        for face in self.per_face:
            if face.alpha == alpha:
                return face
        raise KeyError('QcReport: no nonempty pseudo-face {}'.format(alpha))


def _qc_probe_system(p: IqpProblem, alpha: Tuple[int, ...]):
    """
    Cone over z = (v, mu) with A_alpha v = 0, A_rest v >= 0, Q v - A_alpha^T mu = 0, mu >= 0.  v in it means
    Q v lies in -N_F = pos{A_i^T : i in alpha}.
    """

    k = len(alpha)
    mask = np.zeros(p.m, dtype=bool)
    mask[list(alpha)] = True
    A_alpha = p.A[mask]
    Aeq = np.vstack([np.hstack([A_alpha, np.zeros((k, k))]),
                     np.hstack([p.Q, -A_alpha.T])])
    Aineq = np.vstack([np.hstack([p.A[~mask], np.zeros((p.m - k, k))]),
                       np.hstack([np.zeros((k, p.n)), np.eye(k)])])
    return Aeq, Aineq, A_alpha


def _face_verdict(p: IqpProblem, alpha: Tuple[int, ...]) -> QcFaceVerdict:
    cone = recession_cone(p, alpha)
    if cone.is_trivial:
        return QcFaceVerdict(alpha, verdict_vacuous)
    Aeq, Aineq, A_alpha = _qc_probe_system(p, alpha)
    n_vars = p.n + len(alpha)
    for j, sign in coordinate_probes(p.n):
        z = run_direction_probe(Aeq, Aineq, p.n, j, sign, n_vars)
        if z is None:
            continue
        v = z[:p.n]
        # re-certify independently of the LP multipliers
        residual = conic_distance(A_alpha, p.Q @ v)
        if residual > qc_witness_tolerance:
            logger.warning('qc_check: probe witness for face {} has residual {}, skipping it'.format(alpha, residual))
            continue
        return QcFaceVerdict(alpha, verdict_violated, v, z[p.n:], residual)
    return QcFaceVerdict(alpha, verdict_satisfied)


def qc_check(p: IqpProblem, use_dask: bool = False, cap: int = enumeration_cap) -> QcReport:
    """
    Decide the qualification condition: for every unbounded pseudo-face alpha, no nonzero v in the recession cone of
    the face has Q v in -N_F.  Each nonempty pseudo-face gets a verdict, satisfied_vacuously for bounded faces,
    violated with a witness v (||v||_inf = 1) when one of the 2n coordinate probes is feasible, satisfied otherwise.

    Parameters
    ----------
    p
        problem, m at most cap
    use_dask
        if True, evaluate the faces concurrently with dask.delayed on the threaded scheduler
    cap
        enumeration cap on m

    Returns
    -------
    QcReport
        per face verdicts, overall 'fails' iff any face is violated
    """

    faces = enumerate_pseudo_faces(p, cap=cap)
    if use_dask:
        tasks = [dask.delayed(_face_verdict)(p, face.alpha) for face in faces]
        verdicts = list(dask.compute(*tasks, scheduler='threads'))
    else:
        verdicts = [_face_verdict(p, face.alpha) for face in faces]
    overall = qc_fails if any(v.verdict == verdict_violated for v in verdicts) else qc_holds
    return QcReport(verdicts, overall)


@dataclass(frozen=True)
class ComponentPiece:
    """
    Polyhedron {x | Aeq x = beq, Aineq x >= bineq}
    """

    Aeq: np.ndarray
    beq: np.ndarray
    Aineq: np.ndarray
    bineq: np.ndarray

    def project(self, x: np.ndarray) -> np.ndarray:
        n = x.size
        sub = QpSubproblem(np.eye(n), -x, self.Aineq, self.bineq, self.Aeq, self.beq)
        return solve_qp(sub).x_star


@dataclass(frozen=True)
class ComponentDescription:
    pieces: Tuple[ComponentPiece, ...]
    name: str = ''


def make_piece(n: int, Aeq=None, beq=None, Aineq=None, bineq=None) -> ComponentPiece:
    Aeq = np.zeros((0, n)) if Aeq is None else np.asarray(Aeq, dtype=np.float64).reshape(-1, n)
    beq = np.zeros(0) if beq is None else as_vector(beq, Aeq.shape[0], 'ComponentPiece beq')
    Aineq = np.zeros((0, n)) if Aineq is None else np.asarray(Aineq, dtype=np.float64).reshape(-1, n)
    bineq = np.zeros(0) if bineq is None else as_vector(bineq, Aineq.shape[0], 'ComponentPiece bineq')
    return ComponentPiece(Aeq, beq, Aineq, bineq)


def make_component(pieces: List[ComponentPiece], name: str = '') -> ComponentDescription:
    """
    Assemble a component from its polyhedral pieces, each certified nonempty by the phase 1 LP
    """

    if not pieces:
        raise EmptyFaceError('ComponentDescription: {} has no pieces'.format(name))
    for i, piece in enumerate(pieces):
        if not lp_feasible(piece.Aeq, piece.beq, piece.Aineq, piece.bineq, n=piece.Aeq.shape[1]).is_feasible:
            raise EmptyFaceError('ComponentDescription: piece {} of {} is empty'.format(i, name))
    return ComponentDescription(tuple(pieces), name)


def distance_to_component(comp: ComponentDescription, x: np.ndarray) -> float:
    """
    min over the pieces of ||x - P_piece(x)||
    """

    x = np.asarray(x, dtype=np.float64).reshape(-1)
    return min(float(np.linalg.norm(x - piece.project(x))) for piece in comp.pieces)


@dataclass(frozen=True)
class ComponentConvergenceReport:
    distances: Dict[str, np.ndarray]
    closest: str
    final_distance: float
    objective_spread: float
    threshold: float = component_distance_threshold
    spread_tolerance: float = component_objective_spread

    @property
    def converged(self) -> bool:
        return self.final_distance <= self.threshold and self.objective_spread <= self.spread_tolerance


def component_convergence_check(trace: 'SolveTrace', components: List[ComponentDescription],
                                threshold: float = component_distance_threshold,
                                window: int = component_objective_window,
                                spread_tolerance: float = component_objective_spread) -> ComponentConvergenceReport:
    """
    Track the distance of every iterate to each component, pick the component closest to the last iterate, and
    check its distance is below threshold.  The objective must also be constant (to spread_tolerance) over those of
    the last window iterates that lie within threshold of that component.

    Parameters
    ----------
    trace
        solve trace
    components
        user supplied KKT components
    threshold
        distance threshold for the closest component
    window
        number of trailing iterates considered for the objective check
    spread_tolerance
        allowed max - min of those objective values

    Returns
    -------
    ComponentConvergenceReport
        distance sequences keyed by component name, the closest component and the convergence verdict
    """

    if not components:
        raise NoComponentsError('component_convergence_check: no components given')
    xs = trace.iterates
    distances = {}
    for i, comp in enumerate(components):
        name = comp.name or 'component_{}'.format(i)
        distances[name] = np.array([distance_to_component(comp, x) for x in xs])
    closest = min(distances, key=lambda nm: distances[nm][-1])
    near = distances[closest][-window:] <= threshold
    tail = trace.objective_values[-window:][near]
    spread = float(tail.max() - tail.min()) if tail.size else np.inf
    return ComponentConvergenceReport(distances, closest, float(distances[closest][-1]), spread, threshold,
                                      spread_tolerance)


def _piece_distance(first: ComponentPiece, second: ComponentPiece, max_iter: int, tol: float) -> float:
    n = first.Aeq.shape[1]
    x = lp_feasible(first.Aeq, first.beq, first.Aineq, first.bineq, n=n).witness
    y = second.project(x)
    for _ in range(max_iter):
        x_new = first.project(y)
        y_new = second.project(x_new)
        moved = max(np.linalg.norm(x_new - x), np.linalg.norm(y_new - y))
        x, y = x_new, y_new
        if moved <= tol:
            break
    return float(np.linalg.norm(x - y))


@dataclass(frozen=True)
class SeparationReport:
    pairwise: Dict[Tuple[str, str], float]
    delta: float


def component_separation(components: List[ComponentDescription], max_iter: int = separation_max_iterations,
                         tol: float = 1e-12) -> SeparationReport:
    """
    Measure the pairwise distances between components by alternating projections between their pieces, delta is
    the smallest of them
    """

    if len(components) < 2:
        raise NoComponentsError('component_separation: need at least two components, found {}'.format(len(components)))
    pairwise = {}
    names = [comp.name or 'component_{}'.format(i) for i, comp in enumerate(components)]
    for i in range(len(components)):
        for j in range(i + 1, len(components)):
            pairwise[(names[i], names[j])] = min(_piece_distance(a, b, max_iter, tol)
                                                 for a in components[i].pieces for b in components[j].pieces)
    return SeparationReport(pairwise, min(pairwise.values()))
