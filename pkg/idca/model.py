import logging
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from idca.exceptions import DimensionMismatchError, InfeasibleConstraintSetError, EtaTooSmallError, InvalidGammaError
from idca.geometry import lp_feasible
from idca.idca_variables import auto_eta_margin, default_gamma_fraction, default_tol, default_max_iter, \
    divergence_norm_cap, symmetry_tolerance, variant_projection, variants
from idca.spectral import jacobi_extreme_eigenvalues, gershgorin_bounds, spectral_method_jacobi, \
    spectral_method_gershgorin
from idca.utilities import as_vector, as_matrix, read_only

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IqpProblem:
    """
    min 1/2 x^T Q x + q^T x  subject to  A x >= b

    Arrays are private read-only copies.  Build with build_problem, which validates dimensions, symmetrizes Q and
    rejects an empty constraint set.
    """

    n: int
    m: int
    Q: np.ndarray
    q: np.ndarray
    A: np.ndarray
    b: np.ndarray
    was_symmetrized: bool = False

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return self.Q @ x + self.q

    def residuals(self, x: np.ndarray) -> np.ndarray:
        """A x - b, nonnegative on the constraint set"""
        return self.A @ x - self.b

    def is_feasible(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        return bool(self.m == 0 or self.residuals(x).min() >= -tol)


@dataclass(frozen=True)
class DcDecomposition:
    """
    f = f1 - f2 with f1 = 1/2 x^T Q1 x + q^T x + indicator(C) and f2 = 1/2 x^T Q2 x.

    projection_a: Q1 = eta I, Q2 = eta I - Q, rho = eta - lambda_max_Q
    proximal_b: Q1 = Q + eta I, Q2 = eta I, rho = eta + lambda_min_Q
    """

    variant: str
    eta: float
    rho: float
    lambda_min_Q: float
    lambda_max_Q: float
    Q1: np.ndarray = field(repr=False)
    Q2: np.ndarray = field(repr=False)
    spectral_method: str = spectral_method_jacobi


@dataclass(frozen=True)
class InertialConfig:
    gamma: float
    tol: float
    max_iter: int
    divergence_norm_cap: float
    alpha: float
    alpha1: float
    rho: float


def build_problem(n: int, m: int, Q_entries, q_entries, A_entries, b_entries, check_feasible: bool = True) -> IqpProblem:
    """
    Validate and assemble an IqpProblem.

    Parameters
    ----------
    n
        dimension
    m
        number of constraints
    Q_entries
        n x n matrix, nested rows or flat row major
    q_entries
        n vector
    A_entries
        m x n matrix, nested rows or flat row major
    b_entries
        m vector
    check_feasible
        if True, run the phase 1 LP and reject an empty constraint set

    Returns
    -------
    IqpProblem
        validated problem, Q symmetrized as (Q + Q^T) / 2 if the input was asymmetric
    """

    if int(n) != n or n < 1:
        raise DimensionMismatchError('IqpProblem: n must be a positive integer, found {}'.format(n))
    if int(m) != m or m < 1:
        raise DimensionMismatchError('IqpProblem: m must be a positive integer, found {}'.format(m))
    n, m = int(n), int(m)
    Q = as_matrix(Q_entries, n, n, 'IqpProblem Q')
    q = as_vector(q_entries, n, 'IqpProblem q')
    A = as_matrix(A_entries, m, n, 'IqpProblem A')
    b = as_vector(b_entries, m, 'IqpProblem b')
    for name, arr in (('Q', Q), ('q', q), ('A', A), ('b', b)):
        if not np.all(np.isfinite(arr)):
            raise ValueError('IqpProblem: {} contains non finite entries'.format(name))

    was_symmetrized = False
    if np.abs(Q - Q.T).max() > symmetry_tolerance:
        logger.warning('IqpProblem: Q is not symmetric, replacing it with (Q + Q^T) / 2')
        Q = 0.5 * (Q + Q.T)
        was_symmetrized = True

    if check_feasible:
        feas = lp_feasible(None, None, A, b)
        if not feas.is_feasible:
            raise InfeasibleConstraintSetError('IqpProblem: constraint set {x | Ax >= b} is empty')
    return IqpProblem(n, m, read_only(Q), read_only(q), read_only(A), read_only(b), was_symmetrized)


def objective(p: IqpProblem, x: np.ndarray) -> float:
    """
    f(x) = 1/2 x^T Q x + q^T x
    """

    x = as_vector(x, p.n, 'objective x')
    return float(0.5 * x @ (p.Q @ x) + p.q @ x)


def _variant_bound(variant: str, lambda_min: float, lambda_max: float) -> float:
    # both Q1 and Q2 must be positive definite, so eta is also kept strictly positive
    if variant == variant_projection:
        return max(lambda_max, 0.0)
    return max(-lambda_min, 0.0)


def make_decomposition(p: IqpProblem, variant: str = variant_projection, eta: Union[str, float] = 'auto',
                       bounds_method: str = spectral_method_jacobi) -> DcDecomposition:
    """
    Build the DC split of the objective for one of the two variants.

    Parameters
    ----------
    p
        problem
    variant
        one of 'projection_a', 'proximal_b'
    eta
        'auto' for spectral bound + 1, or an explicit value strictly above the spectral bound
    bounds_method
        'jacobi' for the exact extreme eigenvalues, 'gershgorin' for the cheap certified bracket

    Returns
    -------
    DcDecomposition
        decomposition with eta, rho and the implied Q1, Q2
    """

    if variant not in variants:
        raise ValueError('DcDecomposition: variant must be one of {}, found {}'.format(variants, variant))
    if bounds_method == spectral_method_jacobi:
        bounds = jacobi_extreme_eigenvalues(p.Q)
    elif bounds_method == spectral_method_gershgorin:
        bounds = gershgorin_bounds(p.Q)
        logger.warning('DcDecomposition: eta chosen from Gershgorin bounds, the admissible gamma range may shrink')
    else:
        raise ValueError('DcDecomposition: bounds_method must be jacobi or gershgorin, found {}'.format(bounds_method))

    bound = _variant_bound(variant, bounds.lambda_min, bounds.lambda_max)
    if isinstance(eta, str):
        if eta.lower() != 'auto':
            raise ValueError('DcDecomposition: eta must be "auto" or a number, found {}'.format(eta))
        eta = bound + auto_eta_margin
    else:
        eta = float(eta)
        if not eta > bound:
            raise EtaTooSmallError('DcDecomposition: eta={} must be strictly greater than {} for variant {}'.format(eta, bound, variant),
                                   bound=bound)

    identity = np.eye(p.n)
    if variant == variant_projection:
        rho = eta - bounds.lambda_max
        Q1 = eta * identity
        Q2 = eta * identity - p.Q
    else:
        rho = eta + bounds.lambda_min
        Q1 = p.Q + eta * identity
        Q2 = eta * identity
    return DcDecomposition(variant, eta, float(rho), bounds.lambda_min, bounds.lambda_max, read_only(Q1), read_only(Q2),
                           bounds.method)


def make_config(dc: DcDecomposition, gamma: float = None, gamma_fraction: float = None, tol: float = default_tol,
                max_iter: int = None, divergence_cap: float = divergence_norm_cap) -> InertialConfig:
    """
    Build the inertial configuration for a decomposition.  gamma may be given absolutely or as a fraction theta in
    [0, 1) of the admissible bound rho / 2.  With neither, gamma = 0.9 * rho / 2.

    Parameters
    ----------
    dc
        decomposition, provides rho
    gamma
        optional, absolute inertial weight in [0, rho / 2)
    gamma_fraction
        optional, theta with gamma = theta * rho / 2
    tol
        stopping tolerance, 0 is allowed only with an explicit max_iter
    max_iter
        iteration cap, default 1e5
    divergence_cap
        iterate norm beyond which the solve reports divergence

    Returns
    -------
    InertialConfig
        config with alpha = (rho - gamma) / 2 and alpha1 = alpha - gamma / 2
    """

    if gamma is not None and gamma_fraction is not None:
        raise InvalidGammaError('InertialConfig: give either gamma or gamma_fraction, not both')
    if gamma is None:
        theta = default_gamma_fraction if gamma_fraction is None else float(gamma_fraction)
        if not 0.0 <= theta < 1.0:
            raise InvalidGammaError('InertialConfig: gamma fraction must be in [0, 1), found {}'.format(theta))
        gamma = theta * dc.rho / 2.0
    gamma = float(gamma)
    if not 0.0 <= gamma < dc.rho / 2.0:
        raise InvalidGammaError('InertialConfig: gamma={} must be in [0, rho/2) = [0, {})'.format(gamma, dc.rho / 2.0))
    tol = float(tol)
    if tol < 0:
        raise ValueError('InertialConfig: tol must be nonnegative, found {}'.format(tol))
    if max_iter is None:
        if tol == 0:
            raise ValueError('InertialConfig: tol=0 requires an explicit max_iter')
        max_iter = default_max_iter
    if int(max_iter) != max_iter or max_iter < 1:
        raise ValueError('InertialConfig: max_iter must be a positive integer, found {}'.format(max_iter))
    if not divergence_cap > 0:
        raise ValueError('InertialConfig: divergence cap must be positive, found {}'.format(divergence_cap))
    alpha = (dc.rho - gamma) / 2.0
    alpha1 = alpha - gamma / 2.0
    return InertialConfig(gamma, tol, int(max_iter), float(divergence_cap), alpha, alpha1, dc.rho)
