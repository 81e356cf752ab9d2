"""
The inertial DCA loops.  InDCA1 uses the projection split (Q1 = eta I) and reduces each iteration to a projection
onto C, InDCA2 uses the proximal split (Q1 = Q + eta I) and solves a strictly convex QP over C per iteration.

Starting from x^{-1} = x^0, iteration k produces x^{k+1} from (x^k, x^{k-1}) with the inertial term
d^k = gamma (x^k - x^{k-1}).  The loop stops once ||x^{k+1} - x^k|| <= tol and ||d^k|| <= tol and returns x^k.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
import xarray as xr

from idca.certify import KktCertificate, kkt_certificate
from idca.exceptions import InvalidGammaError, VariantMismatchError, TraceTooShortError
from idca.geometry import project_onto_C, active_set, normal_cone_residual
from idca.idca_variables import variant_projection, variant_proximal, diagnostic_tolerance, activity_tolerance, \
    inclusion_tolerance
from idca.model import IqpProblem, DcDecomposition, InertialConfig, objective
from idca.qp_solver import build_indca2_subproblem, solve_qp, QpSolution
from idca.utilities import as_vector, format_index_set

logger = logging.getLogger(__name__)

algo_indca1 = 'indca1'
algo_indca2 = 'indca2'
algorithms = {algo_indca1: variant_projection, algo_indca2: variant_proximal}

status_tolerance = 'tolerance_reached'
status_max_iter = 'max_iter_reached'
status_diverged = 'diverged'


@dataclass(frozen=True)
class TraceRecord:
    """
    One iterate x^k.  d is the inertial term gamma (x^{k-1} - x^{k-2}) that produced x^k, zero for k = 0 and 1.
    inclusion_residual is the distance certificate of the inclusion satisfied by x^k, zero for k = 0.
    """

    k: int
    x: np.ndarray
    d: np.ndarray
    f_val: float
    step_norm: float
    energy: float
    inclusion_residual: float
    active: Tuple[int, ...]

    @property
    def d_norm(self):
        return float(np.linalg.norm(self.d))


@dataclass
class SolveTrace:
    problem: IqpProblem
    algo: str
    records: List[TraceRecord] = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    @property
    def iterates(self) -> np.ndarray:
        return np.array([rec.x for rec in self.records])

    @property
    def objective_values(self) -> np.ndarray:
        return np.array([rec.f_val for rec in self.records])

    def to_dataset(self) -> xr.Dataset:
        """
        Export the trace as an xarray Dataset indexed by iteration k and coordinate index.

        Returns
        -------
        xr.Dataset
            data variables x, d, f, step_norm, d_norm, energy, inclusion_residual, active_set
        """

        k = [rec.k for rec in self.records]
        coords = {'k': k, 'coord': np.arange(self.problem.n)}
        data = {'x': (('k', 'coord'), self.iterates),
                'd': (('k', 'coord'), np.array([rec.d for rec in self.records])),
                'f': ('k', self.objective_values),
                'step_norm': ('k', np.array([rec.step_norm for rec in self.records])),
                'd_norm': ('k', np.array([rec.d_norm for rec in self.records])),
                'energy': ('k', np.array([rec.energy for rec in self.records])),
                'inclusion_residual': ('k', np.array([rec.inclusion_residual for rec in self.records])),
                'active_set': ('k', np.array([format_index_set(rec.active) for rec in self.records], dtype=object))}
        return xr.Dataset(data, coords=coords, attrs={'algo': self.algo, 'n': self.problem.n, 'm': self.problem.m})


@dataclass(frozen=True)
class SolveResult:
    trace: SolveTrace
    status: str
    final_point: np.ndarray
    final_objective: float
    kkt: KktCertificate = None
    x0_projected: bool = False
    iterations: int = 0


@dataclass(frozen=True)
class DiagnosticsReport:
    """
    max_energy_slack is the worst E_{k+1} - E_k + alpha1 ||x^k - x^{k-1}||^2 over the trace, partial_sum is
    alpha1 * sum ||x^{k+1} - x^k||^2 and sum_bound is f(x^0) - min_k f(x^k).
    """

    max_energy_slack: float
    worst_k: int
    partial_sum: float
    sum_bound: float
    last_step_norm: float
    tolerance: float = diagnostic_tolerance

    @property
    def energy_ok(self) -> bool:
        return self.max_energy_slack <= self.tolerance

    @property
    def summability_ok(self) -> bool:
        return self.partial_sum <= self.sum_bound + self.tolerance

    @property
    def passed(self) -> bool:
        return self.energy_ok and self.summability_ok


def _indca1_solution(p: IqpProblem, dc: DcDecomposition, x_k: np.ndarray, x_km1: np.ndarray, gamma: float,
                     working_set=None) -> QpSolution:
    u = (1.0 + gamma / dc.eta) * x_k - (gamma / dc.eta) * x_km1 - (p.Q @ x_k + p.q) / dc.eta
    return project_onto_C(p, u, x_start=x_k, working_set=working_set, return_solution=True)


def _indca2_solution(p: IqpProblem, dc: DcDecomposition, x_k: np.ndarray, x_km1: np.ndarray, gamma: float,
                     working_set=None) -> QpSolution:
    sub = build_indca2_subproblem(p, dc, x_k, x_km1, gamma)
    return solve_qp(sub, x_start=x_k, working_set=working_set)


def _check_variant(dc: DcDecomposition, expected: str, caller: str):
    if dc.variant != expected:
        raise VariantMismatchError('{}: decomposition variant is {}, expected {}'.format(caller, dc.variant, expected))


def indca1_step(p: IqpProblem, dc: DcDecomposition, x_k: np.ndarray, x_km1: np.ndarray, gamma: float) -> np.ndarray:
    """
    One InDCA1 iteration, P_C((1 + gamma/eta) x_k - (gamma/eta) x_km1 - (Q x_k + q) / eta).

    Parameters
    ----------
    p
        problem
    dc
        projection_a decomposition
    x_k
        current iterate, in C
    x_km1
        previous iterate, in C
    gamma
        inertial weight

    Returns
    -------
    np.ndarray
        next iterate
    """

    _check_variant(dc, variant_projection, 'indca1_step')
    x_k = as_vector(x_k, p.n, 'indca1_step x_k')
    x_km1 = as_vector(x_km1, p.n, 'indca1_step x_km1')
    return _indca1_solution(p, dc, x_k, x_km1, gamma).x_star


def indca2_step(p: IqpProblem, dc: DcDecomposition, x_k: np.ndarray, x_km1: np.ndarray, gamma: float) -> np.ndarray:
    """
    One InDCA2 iteration, the unique minimizer over C of the proximal subproblem built by build_indca2_subproblem
    """

    _check_variant(dc, variant_proximal, 'indca2_step')
    x_k = as_vector(x_k, p.n, 'indca2_step x_k')
    x_km1 = as_vector(x_km1, p.n, 'indca2_step x_km1')
    return _indca2_solution(p, dc, x_k, x_km1, gamma).x_star


def inclusion_residual(p: IqpProblem, dc: DcDecomposition, x_next: np.ndarray, x_k: np.ndarray, x_km1: np.ndarray,
                       gamma: float, act_tol: float = activity_tolerance) -> float:
    """
    Distance certificate of the inclusion satisfied by an exact step,

        projection_a:  gamma (x_k - x_km1) - eta (x_next - x_k) - (Q x_k + q)    in N_C(x_next)
        proximal_b:    gamma (x_k - x_km1) - eta (x_next - x_k) - (Q x_next + q) in N_C(x_next)

    Returns
    -------
    float
        distance from the left hand side to N_C(x_next)
    """

    linearized = x_k if dc.variant == variant_projection else x_next
    w = gamma * (x_k - x_km1) - dc.eta * (x_next - x_k) - (p.Q @ linearized + p.q)
    return normal_cone_residual(p, x_next, w, act_tol)


def _record(p: IqpProblem, cfg: InertialConfig, k: int, x: np.ndarray, x_prev: np.ndarray, d: np.ndarray,
            residual: float) -> TraceRecord:
    step = float(np.linalg.norm(x - x_prev))
    f_val = objective(p, x)
    act = active_set(p, x) if p.is_feasible(x) else ()
    return TraceRecord(k, x, d, f_val, step, f_val + cfg.alpha * step ** 2, residual, act)


def run(p: IqpProblem, dc: DcDecomposition, cfg: InertialConfig, x0: np.ndarray, algo: str = algo_indca1) -> SolveResult:
    """
    Run InDCA1 or InDCA2 from x0.

    Parameters
    ----------
    p
        problem
    dc
        decomposition, projection_a for indca1 and proximal_b for indca2
    cfg
        inertial configuration, gamma must lie in [0, dc.rho / 2)
    x0
        starting point, projected onto C (and flagged) if infeasible
    algo
        'indca1' or 'indca2'

    Returns
    -------
    SolveResult
        trace, status, final point x^k, its objective and (on tolerance_reached) its KKT certificate
    """

    if algo not in algorithms:
        raise ValueError('run: algo must be one of {}, found {}'.format(list(algorithms), algo))
    _check_variant(dc, algorithms[algo], 'run')
    gamma = cfg.gamma
    if not 0.0 <= gamma < dc.rho / 2.0:
        raise InvalidGammaError('run: gamma={} must be in [0, rho/2) = [0, {})'.format(gamma, dc.rho / 2.0))
    step_solution = _indca1_solution if algo == algo_indca1 else _indca2_solution

    x0 = as_vector(x0, p.n, 'run x0')
    x0_projected = False
    if not p.is_feasible(x0):
        logger.warning('run: x0 is not in C, projecting it onto C')
        x0 = project_onto_C(p, x0)
        x0_projected = True

    trace = SolveTrace(p, algo)
    trace.records.append(_record(p, cfg, 0, x0, x0, np.zeros(p.n), 0.0))
    x_k = x0
    x_km1 = x0
    working_set = None
    status = status_max_iter
    final_point = x0
    iterations = 0
    for k in range(cfg.max_iter):
        d_k = gamma * (x_k - x_km1)
        sol = step_solution(p, dc, x_k, x_km1, gamma, working_set)
        x_next = sol.x_star
        working_set = sol.working_set
        iterations += 1
        residual = inclusion_residual(p, dc, x_next, x_k, x_km1, gamma)
        if residual > inclusion_tolerance:
            logger.warning('run: step {} satisfies its inclusion only to {}'.format(k + 1, residual))
        trace.records.append(_record(p, cfg, k + 1, x_next, x_k, d_k, residual))
        step = trace.records[-1].step_norm
        logger.debug('run: k={} step={} d={} f={} residual={}'.format(k, step, np.linalg.norm(d_k),
                                                                      trace.records[-1].f_val, residual))
        if step <= cfg.tol and np.linalg.norm(d_k) <= cfg.tol:
            status = status_tolerance
            final_point = x_k
            break
        if np.linalg.norm(x_next) > cfg.divergence_norm_cap:
            logger.warning('run: ||x|| exceeded {} at k={}, the qualification condition may fail or f may be unbounded '
                           'below on C'.format(cfg.divergence_norm_cap, k + 1))
            status = status_diverged
            final_point = x_next
            break
        x_km1 = x_k
        x_k = x_next
        final_point = x_k

    kkt = kkt_certificate(p, final_point) if status == status_tolerance else None
    logger.info('run: {} finished with status {} after {} iterations'.format(algo, status, iterations))
    return SolveResult(trace, status, final_point, objective(p, final_point), kkt, x0_projected, iterations)


def diagnostics_check(trace: SolveTrace, cfg: InertialConfig, dc: DcDecomposition = None,
                      tolerance: float = diagnostic_tolerance) -> DiagnosticsReport:
    """
    Check the descent estimates along a trace.  Energies are recomputed from the stored iterates, so a trace edited
    after the fact is judged by its x values.

    Parameters
    ----------
    trace
        solve trace with at least two records
    cfg
        configuration used for the solve, provides alpha and alpha1
    dc
        optional, decomposition used for the solve, only used to cross check rho
    tolerance
        slack allowed on both estimates

    Returns
    -------
    DiagnosticsReport
        worst energy decrease slack, partial sum of squared steps and its bound, last step norm
    """

    if len(trace.records) < 2:
        raise TraceTooShortError('diagnostics_check: trace needs at least 2 records, found {}'.format(len(trace.records)))
    if dc is not None and abs(dc.rho - cfg.rho) > 1e-12 * max(1.0, abs(dc.rho)):
        logger.warning('diagnostics_check: config rho {} differs from decomposition rho {}'.format(cfg.rho, dc.rho))
    p = trace.problem
    xs = trace.iterates
    f_vals = np.array([objective(p, x) for x in xs])
    prev = np.vstack([xs[:1], xs[:-1]])
    sq_steps = ((xs - prev) ** 2).sum(axis=1)
    energy = f_vals + cfg.alpha * sq_steps
    slack = energy[1:] - energy[:-1] + cfg.alpha1 * sq_steps[:-1]
    worst = int(np.argmax(slack))
    partial_sum = float(cfg.alpha1 * sq_steps[1:].sum())
    bound = float(f_vals[0] - f_vals.min())
    return DiagnosticsReport(float(slack[worst]), worst, partial_sum, bound, float(np.sqrt(sq_steps[-1])), tolerance)
