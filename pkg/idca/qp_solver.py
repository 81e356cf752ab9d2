"""
Strictly convex QP over {A x >= b} (plus optional equality rows) by a primal active-set method.  The equality
constrained step on each working set is solved in range-space form with the Cholesky factor of H.
"""

import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Tuple

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve, LinAlgError

from idca.exceptions import NotPositiveDefiniteError, DimensionMismatchError, InfeasibleRegionError, \
    CycleGuardExceededError, VariantMismatchError
from idca.idca_variables import feasibility_tolerance, multiplier_tolerance, qp_kkt_tolerance, cycle_guard_factor, \
    variant_proximal
from idca.simplex import solve_lp, lp_status_infeasible
from idca.utilities import as_vector

if TYPE_CHECKING:
    from idca.model import IqpProblem, DcDecomposition

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QpSubproblem:
    """
    min 1/2 x^T H x + g^T x  subject to  A x >= b, A_eq x = b_eq

    H must be symmetric positive definite, checked by a Cholesky factorization on construction.
    """

    H: np.ndarray
    g: np.ndarray
    A: np.ndarray
    b: np.ndarray
    A_eq: np.ndarray = None
    b_eq: np.ndarray = None
    chol: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        H = np.asarray(self.H, dtype=np.float64)
        n = H.shape[0]
        if H.ndim != 2 or H.shape != (n, n):
            raise DimensionMismatchError('QpSubproblem: H must be square, found shape {}'.format(H.shape))
        A = np.asarray(self.A, dtype=np.float64).reshape(-1, n)
        A_eq = np.zeros((0, n)) if self.A_eq is None else np.asarray(self.A_eq, dtype=np.float64).reshape(-1, n)
        b_eq = np.zeros(0) if self.b_eq is None else as_vector(self.b_eq, A_eq.shape[0], 'QpSubproblem b_eq')
        object.__setattr__(self, 'H', H)
        object.__setattr__(self, 'g', as_vector(self.g, n, 'QpSubproblem g'))
        object.__setattr__(self, 'A', A)
        object.__setattr__(self, 'b', as_vector(self.b, A.shape[0], 'QpSubproblem b'))
        object.__setattr__(self, 'A_eq', A_eq)
        object.__setattr__(self, 'b_eq', b_eq)
        try:
            chol = cho_factor(0.5 * (H + H.T), lower=True)
        except LinAlgError:
            raise NotPositiveDefiniteError('QpSubproblem: H is not positive definite')
        object.__setattr__(self, 'chol', chol)

    @property
    def n(self):
        return self.H.shape[0]

    @property
    def m(self):
        return self.A.shape[0]

    def objective(self, x: np.ndarray) -> float:
        return float(0.5 * x @ (self.H @ x) + self.g @ x)


@dataclass(frozen=True)
class QpSolution:
    x_star: np.ndarray
    active: Tuple[int, ...]
    multipliers: np.ndarray
    kkt_residual: float
    working_set: Tuple[int, ...] = ()
    eq_multipliers: np.ndarray = None
    iterations: int = 0


def independent_rows(base: np.ndarray, rows: np.ndarray, candidates) -> list:
    """
    Greedy lowest index first selection of the candidate rows of rows that stay linearly independent of base and of
    each other
    """

    chosen = []
    current = base.copy()
    rank = int(np.linalg.matrix_rank(current)) if current.shape[0] else 0
    for i in sorted(set(int(c) for c in candidates)):
        trial = np.vstack([current, rows[i]])
        trial_rank = int(np.linalg.matrix_rank(trial))
        if trial_rank > rank:
            chosen.append(i)
            current = trial
            rank = trial_rank
        if rank >= rows.shape[1]:
            break
    return chosen


class ActiveSetSolver:
    """
    Primal active-set solver for one QpSubproblem.  Holds the per-solve working set, so use one instance per thread.

    Parameters
    ----------
    sub
        the subproblem
    feas_tol
        feasibility and activity tolerance
    mult_tol
        multipliers below -mult_tol are dropped from the working set
    """

    def __init__(self, sub: QpSubproblem, feas_tol: float = feasibility_tolerance, mult_tol: float = multiplier_tolerance):
        self.sub = sub
        self.feas_tol = feas_tol
        self.mult_tol = mult_tol
        self.x = None
        self.working = []
        self.changes = 0
        self.max_changes = cycle_guard_factor * (sub.m + sub.n)
        # dependent equality rows are dropped, their consistency is checked by phase 1 or the warm start test
        self.eq_rows = independent_rows(np.zeros((0, sub.n)), sub.A_eq, range(sub.A_eq.shape[0]))

    def _is_feasible(self, x: np.ndarray) -> bool:
        sub = self.sub
        scale = max(1.0, float(np.abs(x).max(initial=0.0)))
        ok_ineq = sub.m == 0 or (sub.A @ x - sub.b).min() >= -self.feas_tol * scale
        ok_eq = sub.A_eq.shape[0] == 0 or np.abs(sub.A_eq @ x - sub.b_eq).max() <= self.feas_tol * scale
        return bool(ok_ineq and ok_eq)

    def _starting_point(self, x_start: np.ndarray = None) -> np.ndarray:
        sub = self.sub
        if x_start is not None:
            x_start = as_vector(x_start, sub.n, 'ActiveSetSolver x_start')
            if self._is_feasible(x_start):
                return x_start.copy()
            logger.debug('ActiveSetSolver: warm start is infeasible, falling back to the phase 1 witness')
        result = solve_lp(None, sub.A_eq, sub.b_eq, sub.A, sub.b, n=sub.n)
        if result.status == lp_status_infeasible:
            raise InfeasibleRegionError('ActiveSetSolver: feasible region is empty')
        return result.x

    def _independent_rows(self, candidates) -> list:
        """
        Greedy lowest index first selection of candidate inequality rows that stay linearly independent of the
        equality rows and each other
        """

        return independent_rows(self.sub.A_eq[self.eq_rows], self.sub.A, candidates)

    def _equality_step(self, x: np.ndarray):
        """
        Solve min 1/2 p^T H p + grad^T p subject to M p = 0 where M stacks the equality rows and the working rows.

        Returns the step p and the multipliers of the rows of M, ordered equality rows first.
        """

        sub = self.sub
        grad = sub.H @ x + sub.g
        hinv_grad = cho_solve(sub.chol, grad)
        A_eq = sub.A_eq[self.eq_rows]
        M = np.vstack([A_eq, sub.A[self.working]]) if self.working else A_eq
        if M.shape[0] == 0:
            return -hinv_grad, np.zeros(0)
        hinv_mt = cho_solve(sub.chol, M.T)
        schur = M @ hinv_mt
        lam = solve(schur, M @ hinv_grad, assume_a='pos')
        step = hinv_mt @ lam - hinv_grad
        return step, lam

    def _change(self):
        self.changes += 1
        if self.changes > self.max_changes:
            raise CycleGuardExceededError('ActiveSetSolver: more than {} working set changes'.format(self.max_changes))

    def solve(self, x_start: np.ndarray = None, working_set=None) -> QpSolution:
        """
        Run the active-set iteration.

        Parameters
        ----------
        x_start
            optional, feasible starting point, otherwise the phase 1 witness is used
        working_set
            optional, initial working set, rows not active at the start point are ignored.  Defaults to all rows
            active at the start point.

        Returns
        -------
        QpSolution
            the unique minimizer with its multipliers
        """

        sub = self.sub
        x = self._starting_point(x_start)
        scale = max(1.0, float(np.abs(x).max(initial=0.0)))
        residual = sub.A @ x - sub.b
        active_now = np.nonzero(np.abs(residual) <= self.feas_tol * scale)[0]
        if working_set is None:
            candidates = active_now
        else:
            candidates = [i for i in working_set if i in set(active_now.tolist())]
        self.working = self._independent_rows(candidates)
        n_eq = len(self.eq_rows)
        iterations = 0

        while True:
            iterations += 1
            step, lam = self._equality_step(x)
            step_scale = max(1.0, float(np.abs(x).max(initial=0.0)))
            if np.abs(step).max(initial=0.0) <= 1e-12 * step_scale:
                ineq_lam = lam[n_eq:]
                negative = [self.working[k] for k in range(len(self.working)) if ineq_lam[k] < -self.mult_tol]
                if not negative:
                    break
                # drop the lowest index row with a negative multiplier
                self.working.remove(min(negative))
                self._change()
                continue

            Ap = sub.A @ step
            t = 1.0
            blocking = None
            in_working = set(self.working)
            for i in range(sub.m):
                if i in in_working or Ap[i] >= -1e-14 * step_scale:
                    continue
                t_i = max(0.0, (sub.b[i] - sub.A[i] @ x) / Ap[i])
                # strict comparison keeps the lowest index on ties
                if t_i < t:
                    t = t_i
                    blocking = i
            x = x + t * step
            if blocking is not None:
                self.working.append(blocking)
                self._change()

        self.x = x
        multipliers = np.zeros(sub.m)
        ineq_lam = lam[n_eq:]
        for k, i in enumerate(self.working):
            multipliers[i] = max(0.0, ineq_lam[k])
        eq_multipliers = np.zeros(sub.A_eq.shape[0])
        eq_multipliers[self.eq_rows] = lam[:n_eq]
        stationarity = sub.H @ x + sub.g - sub.A.T @ multipliers - sub.A_eq.T @ eq_multipliers
        kkt_residual = float(np.linalg.norm(stationarity))
        if kkt_residual > qp_kkt_tolerance * max(1.0, float(np.linalg.norm(sub.g))):
            logger.warning('ActiveSetSolver: KKT residual {} above target {}'.format(kkt_residual, qp_kkt_tolerance))
        scale = max(1.0, float(np.abs(x).max(initial=0.0)))
        active = tuple(int(i) for i in np.nonzero(np.abs(sub.A @ x - sub.b) <= self.feas_tol * scale)[0])
        return QpSolution(x, active, multipliers, kkt_residual, tuple(sorted(self.working)), eq_multipliers, iterations)


def solve_qp(sub: QpSubproblem, x_start: np.ndarray = None, working_set=None) -> QpSolution:
    """
    Unique global minimizer of a strictly convex QP, see ActiveSetSolver.solve
    """

    return ActiveSetSolver(sub).solve(x_start=x_start, working_set=working_set)


def build_indca2_subproblem(p: 'IqpProblem', dc: 'DcDecomposition', x_k: np.ndarray, x_km1: np.ndarray,
                            gamma: float) -> QpSubproblem:
    """
    Proximal subproblem of one InDCA2 iteration, min 1/2 x^T (Q + eta I) x + g^T x over C with
    g = q - eta x_k - gamma (x_k - x_km1).  The constant term of the subproblem objective is dropped.

    Parameters
    ----------
    p
        problem
    dc
        proximal_b decomposition
    x_k
        current iterate
    x_km1
        previous iterate
    gamma
        inertial weight

    Returns
    -------
    QpSubproblem
        the subproblem over C
    """

    if dc.variant != variant_proximal:
        raise VariantMismatchError('build_indca2_subproblem: decomposition variant is {}, expected {}'.format(dc.variant, variant_proximal))
    x_k = as_vector(x_k, p.n, 'build_indca2_subproblem x_k')
    x_km1 = as_vector(x_km1, p.n, 'build_indca2_subproblem x_km1')
    H = p.Q + dc.eta * np.eye(p.n)
    g = p.q - dc.eta * x_k - gamma * (x_k - x_km1)
    return QpSubproblem(H, g, p.A, p.b)
