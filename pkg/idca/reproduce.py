"""
Reproduction harness for the two dimensional worked example: five InDCA1 starting cases with eta = 3 and
gamma = 1/3, whose iterates are known exactly, plus InDCA2 runs from the same points, the QC verdict and the
component convergence of the cases that end on F1 and at (1/4, 0).
"""

import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np

from idca.certify import qc_check, component_convergence_check, distance_to_component, verdict_violated, qc_fails
from idca.convenience import example_file, solve_problem
from idca.engine import status_tolerance, algo_indca1, algo_indca2

logger = logging.getLogger(__name__)

example_eta = 3.0
example_gamma = 1.0 / 3.0
example_tol = 1e-8
iterate_tolerance = 1e-9
membership_tolerance = 1e-6

# known InDCA1 iterate prefixes, x^0 first
expected_prefixes = {
    'case2': [(1 / 4, 0.0), (1 / 4, 0.0)],
    'case3': [(1 / 4, 1 / 8), (1 / 4, 5 / 24), (1 / 4, 1 / 4), (109 / 432, 109 / 432)],
    'case4': [(1.0, 0.0), (1 / 3, 0.0), (1 / 4, 0.0), (1 / 4, 0.0)],
    'case5': [(1.0, 1 / 8), (1 / 3, 5 / 24), (1 / 4, 1 / 4), (1 / 4, 1 / 4), (1 / 4, 1 / 4)],
}
case1_points = ['case1_f1_t0', 'case1_f1_t1', 'case1_f2_t0', 'case1_f2_t1']
case3_limit_bound = 97 / 384


@dataclass(frozen=True)
class CheckRow:
    case: str
    check: str
    passed: bool
    detail: str = ''


@dataclass
class ReproductionReport:
    rows: List[CheckRow] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(row.passed for row in self.rows)

    def add(self, case: str, check: str, passed: bool, detail: str = ''):
        self.rows.append(CheckRow(case, check, bool(passed), detail))
        if not passed:
            logger.warning('reproduce: {} {} failed {}'.format(case, check, detail))

    def render(self) -> str:
        width = max([len(r.case) + len(r.check) for r in self.rows] + [10]) + 3
        lines = ['{:<{}} {}'.format('case / check', width, 'result')]
        for row in self.rows:
            lines.append('{:<{}} {} {}'.format(row.case + ' / ' + row.check, width, 'PASS' if row.passed else 'FAIL',
                                                row.detail).rstrip())
        lines.append('{} of {} checks passed'.format(sum(r.passed for r in self.rows), len(self.rows)))
        return '\n'.join(lines)


def _matches_prefix(trace, expected) -> (bool, str):
    xs = trace.iterates
    if len(xs) < len(expected):
        return False, 'trace has {} iterates, expected at least {}'.format(len(xs), len(expected))
    err = float(np.abs(xs[:len(expected)] - np.array(expected)).max())
    return err <= iterate_tolerance, 'max error {:.3e}'.format(err)


def _solve(pf, name: str, algo: str):
    _, _, result = solve_problem(pf.problem, pf.starting_points[name], algo=algo, eta=example_eta, gamma=example_gamma,
                                 tol=example_tol)
    return result


def reproduce_example() -> ReproductionReport:
    """
    Run every check of the worked example.

    Returns
    -------
    ReproductionReport
        one row per check, all_passed is True iff the example is reproduced
    """

    pf = example_file()
    report = ReproductionReport()
    kkt_set = list(pf.components.values())

    for name in case1_points:
        result = _solve(pf, name, algo_indca1)
        x0 = pf.starting_points[name]
        ok = result.status == status_tolerance and np.abs(result.trace.iterates[1] - x0).max() <= iterate_tolerance
        report.add('case 1', '{} fixed point'.format(name), ok, 'status {}'.format(result.status))

    result = _solve(pf, 'case2', algo_indca1)
    report.add('case 2', 'iterates', *_matches_prefix(result.trace, expected_prefixes['case2']))
    report.add('case 2', 'kkt at (1/4, 0)', result.kkt is not None and result.kkt.is_kkt and
               np.abs(result.final_point - np.array([0.25, 0.0])).max() <= iterate_tolerance)

    case3 = _solve(pf, 'case3', algo_indca1)
    report.add('case 3', 'iterates', *_matches_prefix(case3.trace, expected_prefixes['case3']))
    t = case3.trace.iterates[:, 0]
    on_f1 = bool(np.abs(case3.trace.iterates[2:, 0] - case3.trace.iterates[2:, 1]).max() <= iterate_tolerance)
    report.add('case 3', 'iterates stay on F1 from k=2', on_f1)
    recurrence = [abs(t[k + 1] - (10 / 9 * t[k] - 1 / 9 * t[k - 1])) for k in range(3, len(t) - 1)]
    worst = max(recurrence) if recurrence else 0.0
    report.add('case 3', 'recurrence t(k+1) = 10/9 t(k) - 1/9 t(k-1)', bool(recurrence) and worst <= iterate_tolerance,
               'max error {:.3e} over {} steps'.format(worst, len(recurrence)))
    report.add('case 3', 'limit below 97/384', case3.status == status_tolerance and
               case3.final_point[0] <= case3_limit_bound + iterate_tolerance,
               'final t {:.12f}'.format(case3.final_point[0]))

    case4 = _solve(pf, 'case4', algo_indca1)
    report.add('case 4', 'iterates', *_matches_prefix(case4.trace, expected_prefixes['case4']))
    report.add('case 4', 'kkt at (1/4, 0)', case4.kkt is not None and case4.kkt.is_kkt and
               np.abs(case4.final_point - np.array([0.25, 0.0])).max() <= iterate_tolerance)

    case5 = _solve(pf, 'case5', algo_indca1)
    report.add('case 5', 'iterates', *_matches_prefix(case5.trace, expected_prefixes['case5']))
    report.add('case 5', 'global solution (1/4, 1/4)', case5.status == status_tolerance and
               np.abs(case5.final_point - np.array([0.25, 0.25])).max() <= iterate_tolerance)

    for name in case1_points + ['case2', 'case3', 'case4', 'case5']:
        result = _solve(pf, name, algo_indca2)
        dist = min(distance_to_component(comp, result.final_point) for comp in kkt_set)
        ok = result.status == status_tolerance and result.kkt.is_kkt and dist <= membership_tolerance
        report.add('indca2', '{} ends in the KKT set'.format(name), ok, 'distance {:.3e}'.format(dist))

    qc = qc_check(pf.problem)
    report.add('qc', 'overall fails', qc.overall == qc_fails)
    for alpha, direction in (((0,), np.array([1.0, 1.0])), ((1,), np.array([1.0, -1.0]))):
        face = qc.verdict_for(alpha)
        ok = face.verdict == verdict_violated and face.witness is not None and \
            np.abs(face.witness - direction * face.witness[0]).max() <= iterate_tolerance
        report.add('qc', 'face {} violated along {}'.format(alpha, tuple(direction)), ok)

    for case, result, expected in (('case 3', case3, 'F1'), ('case 4', case4, 'P')):
        conv = component_convergence_check(result.trace, kkt_set)
        report.add(case, 'converges to {}'.format(expected), conv.closest == expected and conv.converged,
                   'closest {} at {:.3e}'.format(conv.closest, conv.final_distance))
    return report
