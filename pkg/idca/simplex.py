"""
Dense tableau two phase simplex over free variables.  This is the LP kernel behind lp_feasible, pseudo-face
enumeration and the QC probes.  Bland's rule is used for both entering and leaving choices.
"""

import logging
from dataclasses import dataclass

import numpy as np

from idca.exceptions import DimensionMismatchError, NumericalFailureError
from idca.idca_variables import pivot_tolerance, feasibility_tolerance

logger = logging.getLogger(__name__)

lp_status_optimal = 'optimal'
lp_status_infeasible = 'infeasible'
lp_status_unbounded = 'unbounded'


@dataclass(frozen=True)
class LpResult:
    status: str
    x: np.ndarray = None
    objective: float = None
    iterations: int = 0

    @property
    def is_feasible(self):
        return self.status != lp_status_infeasible


def _pivot(tableau: np.ndarray, row: int, col: int):
    tableau[row, :] /= tableau[row, col]
    for i in range(tableau.shape[0]):
        if i != row and tableau[i, col] != 0.0:
            tableau[i, :] -= tableau[i, col] * tableau[row, :]


def _entering_column(tableau: np.ndarray, allowed: np.ndarray, tol: float):
    # Bland: lowest index column with a negative reduced cost
    candidates = np.nonzero((tableau[-1, :-1] < -tol) & allowed)[0]
    if candidates.size == 0:
        return None
    return int(candidates[0])


def _leaving_row(tableau: np.ndarray, basis: np.ndarray, col: int, tol: float):
    column = tableau[:-1, col]
    rhs = tableau[:-1, -1]
    rows = np.nonzero(column > tol)[0]
    if rows.size == 0:
        return None
    ratios = rhs[rows] / column[rows]
    best = ratios.min()
    ties = rows[ratios <= best + tol * max(1.0, abs(best))]
    # Bland: among tied rows, leave the lowest index basic variable
    return int(ties[np.argmin(basis[ties])])


def _run_simplex(tableau: np.ndarray, basis: np.ndarray, allowed: np.ndarray, max_pivots: int, tol: float):
    """
    Pivot until optimal or unbounded, modifies tableau and basis in place.

    Returns
    -------
    bool
        True if optimal, False if unbounded
    int
        number of pivots taken
    """

    pivots = 0
    while True:
        col = _entering_column(tableau, allowed, tol)
        if col is None:
            return True, pivots
        row = _leaving_row(tableau, basis, col, tol)
        if row is None:
            return False, pivots
        _pivot(tableau, row, col)
        basis[row] = col
        pivots += 1
        if pivots > max_pivots:
            raise NumericalFailureError('simplex: cycling guard exceeded after {} pivots'.format(pivots))


def solve_lp(c: np.ndarray = None, Aeq: np.ndarray = None, beq: np.ndarray = None, Aineq: np.ndarray = None,
             bineq: np.ndarray = None, n: int = None, tol: float = pivot_tolerance,
             feas_tol: float = feasibility_tolerance) -> LpResult:
    """
    Minimize c^T z subject to Aeq z = beq, Aineq z >= bineq with z free.  With c None this is a pure phase 1
    feasibility problem and the returned x is the phase 1 witness.

    Parameters
    ----------
    c
        optional, objective vector of length n
    Aeq
        optional, equality rows (k x n)
    beq
        optional, equality right hand side (k)
    Aineq
        optional, inequality rows (l x n)
    bineq
        optional, inequality right hand side (l)
    n
        number of variables, only needed when no matrix is given
    tol
        pivot tolerance
    feas_tol
        phase 1 optimum above this (relative to the rhs scale) means infeasible

    Returns
    -------
    LpResult
        status, solution and objective value
    """

    if n is None:
        for mat in (Aeq, Aineq):
            if mat is not None and np.asarray(mat).ndim == 2:
                n = np.asarray(mat).shape[1]
                break
        if n is None and c is not None:
            n = np.asarray(c).size
    if n is None:
        raise DimensionMismatchError('solve_lp: unable to determine the number of variables')

    Aeq = np.zeros((0, n)) if Aeq is None else np.asarray(Aeq, dtype=np.float64).reshape(-1, n)
    beq = np.zeros(0) if beq is None else np.asarray(beq, dtype=np.float64).reshape(-1)
    Aineq = np.zeros((0, n)) if Aineq is None else np.asarray(Aineq, dtype=np.float64).reshape(-1, n)
    bineq = np.zeros(0) if bineq is None else np.asarray(bineq, dtype=np.float64).reshape(-1)
    c = np.zeros(n) if c is None else np.asarray(c, dtype=np.float64).reshape(-1)
    if Aeq.shape[0] != beq.size or Aineq.shape[0] != bineq.size or c.size != n:
        raise DimensionMismatchError('solve_lp: inconsistent constraint dimensions')

    k = Aeq.shape[0]
    l = Aineq.shape[0]
    rows = k + l
    if rows == 0:
        if np.any(np.abs(c) > tol):
            return LpResult(lp_status_unbounded, np.zeros(n), -np.inf)
        return LpResult(lp_status_optimal, np.zeros(n), 0.0)

    # columns: z+ (n), z- (n), surplus (l), artificial (rows)
    n_struct = 2 * n + l
    n_cols = n_struct + rows
    tableau = np.zeros((rows + 1, n_cols + 1))
    tableau[:k, :n] = Aeq
    tableau[:k, n:2 * n] = -Aeq
    tableau[k:rows, :n] = Aineq
    tableau[k:rows, n:2 * n] = -Aineq
    tableau[k:rows, 2 * n:n_struct] = -np.eye(l)
    tableau[:rows, -1] = np.concatenate([beq, bineq])
    negative = tableau[:rows, -1] < 0
    tableau[:rows][negative] *= -1.0
    tableau[:rows, n_struct:n_cols] = np.eye(rows)
    basis = np.arange(n_struct, n_cols)

    # phase 1 reduced costs, minimize the sum of artificials
    tableau[-1, :n_struct] = -tableau[:rows, :n_struct].sum(axis=0)
    tableau[-1, -1] = -tableau[:rows, -1].sum()

    max_pivots = 50 * (rows + n_cols)
    allowed = np.ones(n_cols, dtype=bool)
    _, pivots = _run_simplex(tableau, basis, allowed, max_pivots, tol)

    scale = max(1.0, np.abs(tableau[:rows, -1]).max(initial=0.0), np.abs(np.concatenate([beq, bineq])).max(initial=0.0))
    phase1_objective = -tableau[-1, -1]
    if phase1_objective > feas_tol * scale:
        logger.debug('solve_lp: phase 1 optimum {} means infeasible'.format(phase1_objective))
        return LpResult(lp_status_infeasible, None, None, pivots)

    # drive artificials out of the basis, rows where that is impossible are redundant
    keep_rows = np.ones(rows, dtype=bool)
    for i in range(rows):
        if basis[i] >= n_struct:
            candidates = np.nonzero(np.abs(tableau[i, :n_struct]) > tol)[0]
            if candidates.size:
                _pivot(tableau, i, int(candidates[0]))
                basis[i] = int(candidates[0])
                pivots += 1
            else:
                keep_rows[i] = False
    keep = np.concatenate([keep_rows, [True]])
    tableau = tableau[keep]
    basis = basis[keep_rows]
    tableau = np.hstack([tableau[:, :n_struct], tableau[:, -1:]])

    # phase 2 reduced costs
    costs = np.concatenate([c, -c, np.zeros(l)])
    tableau[-1, :] = 0.0
    tableau[-1, :n_struct] = costs
    for i, var in enumerate(basis):
        if costs[var] != 0.0:
            tableau[-1, :] -= costs[var] * tableau[i, :]
    bounded, extra = _run_simplex(tableau, basis, np.ones(n_struct, dtype=bool), max_pivots, tol)
    pivots += extra

    values = np.zeros(n_struct)
    values[basis] = tableau[:-1, -1]
    x = values[:n] - values[n:2 * n]
    if not bounded:
        return LpResult(lp_status_unbounded, x, -np.inf, pivots)
    return LpResult(lp_status_optimal, x, float(c @ x), pivots)
