import logging
from dataclasses import dataclass

import numba
import numpy as np

from idca.exceptions import NonSymmetricError, NoConvergenceError, DimensionMismatchError
from idca.idca_variables import jacobi_tolerance, jacobi_max_sweeps, spectral_symmetry_tolerance

logger = logging.getLogger(__name__)

spectral_method_jacobi = 'jacobi'
spectral_method_gershgorin = 'gershgorin'


@dataclass(frozen=True)
class SpectralBounds:
    """
    Extreme eigenvalue information for a symmetric matrix.  For the jacobi method both values are eigenvalues to within
    the iteration tolerance, for the gershgorin method they bracket the spectrum.
    """

    lambda_min: float
    lambda_max: float
    method: str


def _check_symmetric(M, caller: str) -> np.ndarray:
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatchError('{}: expected a square matrix, found shape {}'.format(caller, M.shape))
    scale = max(1.0, float(np.abs(M).max(initial=0.0)))
    asym = float(np.abs(M - M.T).max(initial=0.0))
    if asym > spectral_symmetry_tolerance * scale:
        raise NonSymmetricError('{}: matrix is not symmetric, max |M - M^T| = {}'.format(caller, asym))
    return M


@numba.njit(cache=True)
def _off_diagonal_norm(a: np.ndarray):
    n = a.shape[0]
    total = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                total += a[i, j] * a[i, j]
    return np.sqrt(total)


@numba.njit(cache=True)
def _jacobi_sweeps(a: np.ndarray, threshold: float, max_sweeps: int):
    """
    Cyclic Jacobi rotations on a (modified in place) until the off diagonal Frobenius norm is at or below threshold.

    Returns the diagonal, the number of sweeps used and whether the threshold was reached.
    """

    n = a.shape[0]
    sweeps = 0
    while _off_diagonal_norm(a) > threshold:
        if sweeps >= max_sweeps:
            return np.diag(a).copy(), sweeps, False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
        sweeps += 1
    return np.diag(a).copy(), sweeps, True


def jacobi_eigenvalues(M: np.ndarray, tol: float = jacobi_tolerance, max_sweeps: int = jacobi_max_sweeps):
    """
    Full eigenvalue set of a symmetric matrix by cyclic Jacobi rotations, sorted ascending.

    Parameters
    ----------
    M
        symmetric n x n matrix
    tol
        relative stopping tolerance, sweeps stop once the off diagonal Frobenius norm is <= tol * ||M||_F
    max_sweeps
        sweep cap

    Returns
    -------
    np.ndarray
        eigenvalues in ascending order
    """

    if tol <= 0:
        raise ValueError('jacobi_eigenvalues: tol must be positive, found {}'.format(tol))
    M = _check_symmetric(M, 'jacobi_eigenvalues')
    work = np.array(0.5 * (M + M.T), dtype=np.float64, order='C')
    threshold = tol * float(np.linalg.norm(M, 'fro'))
    eigs, sweeps, converged = _jacobi_sweeps(work, threshold, max_sweeps)
    if not converged:
        raise NoConvergenceError('jacobi_eigenvalues: off diagonal norm above {} after {} sweeps'.format(threshold, sweeps))
    logger.debug('jacobi_eigenvalues: converged in {} sweeps'.format(sweeps))
    return np.sort(eigs)


def jacobi_extreme_eigenvalues(M: np.ndarray, tol: float = jacobi_tolerance) -> SpectralBounds:
    """
    Smallest and largest eigenvalue of a symmetric matrix, see jacobi_eigenvalues
    """

    eigs = jacobi_eigenvalues(M, tol)
    return SpectralBounds(float(eigs[0]), float(eigs[-1]), spectral_method_jacobi)


def gershgorin_bounds(M: np.ndarray) -> SpectralBounds:
    """
    Gershgorin disc bracket of the spectrum of a symmetric matrix.  lambda_min is min(M_ii - radius_i), lambda_max is
    max(M_ii + radius_i) with radius_i the off diagonal absolute row sum.

    Parameters
    ----------
    M
        symmetric n x n matrix

    Returns
    -------
    SpectralBounds
        certified lower bound on the smallest and upper bound on the largest eigenvalue
    """

    M = _check_symmetric(M, 'gershgorin_bounds')
    center = np.diag(M)
    radius = np.abs(M).sum(axis=1) - np.abs(center)
    return SpectralBounds(float((center - radius).min()), float((center + radius).max()), spectral_method_gershgorin)
