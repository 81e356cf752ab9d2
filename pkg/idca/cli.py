"""
Command line surface.

    idca solve PROBLEM.json [--algo indca1|indca2] [--eta auto|<real>] [--gamma <real>|frac:<theta>] [--tol <real>]
                            [--max-iter <int>] [--x0 <name>|<comma vector>] [--trace out.csv] [--components F1,F2]
    idca qc PROBLEM.json [--dask]
    idca reproduce

Exit codes: 0 success, 1 QC fails or reproduction mismatch, 2 usage or parse error, 3 numerical failure.
Set IDCA_LOG to DEBUG, INFO, WARNING or ERROR for log verbosity.
"""

import sys
import logging
import argparse

import numpy as np

from idca.__version__ import __version__
from idca.certify import qc_check, component_convergence_check, qc_holds
from idca.convenience import solve_problem
from idca.engine import algorithms, algo_indca1, status_diverged
from idca.idca_variables import default_tol, exit_ok, exit_failed_check, exit_usage, exit_numerical
from idca.problem_file import load_problem_file, write_trace_csv
from idca.reproduce import reproduce_example
from idca.utilities import configure_logging, parse_number, format_vector, format_index_set

logger = logging.getLogger(__name__)


def parse_gamma(text: str):
    """
    Split a --gamma value into (gamma, gamma_fraction).  'frac:0.5' is half the admissible bound rho / 2, anything
    else is an absolute weight.
    """

    if text is None:
        return None, None
    text = text.strip()
    if text.lower().startswith('frac:'):
        return None, parse_number(text[5:])
    return parse_number(text), None


def parse_eta(text: str):
    if text is None or text.strip().lower() == 'auto':
        return 'auto'
    return parse_number(text)


def resolve_x0(pf, x0: str) -> np.ndarray:
    """
    x0 is a starting point name from the problem file or a comma separated vector, ex: '1/4,1/8'.  Without x0 the
    first named starting point is used, or the origin (projected onto C by the solver).
    """

    n = pf.problem.n
    if x0 is None:
        if pf.starting_points:
            return next(iter(pf.starting_points.values()))
        return np.zeros(n)
    if x0 in pf.starting_points:
        return pf.starting_points[x0]
    values = np.array([parse_number(v) for v in x0.split(',')])
    if values.size != n:
        raise ValueError('--x0: expected a starting point name or {} comma separated numbers, found {!r}'.format(n, x0))
    return values


def cmd_solve(file: str, algo: str = algo_indca1, eta: str = 'auto', gamma: str = None, tol: float = default_tol,
              max_iter: int = None, x0: str = None, trace_out: str = None, components: str = None) -> int:
    """
    Solve a problem file and print the final point, objective, status and KKT verdict.

    Parameters
    ----------
    file
        path to the JSON problem file
    algo
        'indca1' or 'indca2'
    eta
        'auto' or a number
    gamma
        absolute weight or 'frac:theta', default 0.45 rho
    tol
        stopping tolerance
    max_iter
        iteration cap
    x0
        starting point name or comma separated vector
    trace_out
        optional path for the per iteration trace csv
    components
        optional comma separated component names from the problem file, enables the component convergence check

    Returns
    -------
    int
        exit code
    """

    pf = load_problem_file(file)
    comps = []
    if components:
        for name in components.split(','):
            if name.strip() not in pf.components:
                raise ValueError('--components: {} is not a component of {}'.format(name.strip(), file))
            comps.append(pf.components[name.strip()])
    gamma_value, gamma_fraction = parse_gamma(gamma)
    start = resolve_x0(pf, x0)
    dc, cfg, result = solve_problem(pf.problem, start, algo=algo, eta=parse_eta(eta), gamma=gamma_value,
                                    gamma_fraction=gamma_fraction, tol=tol, max_iter=max_iter)

    print('algorithm: {}  eta={:.10g}  rho={:.10g}  gamma={:.10g}'.format(algo, dc.eta, dc.rho, cfg.gamma))
    if result.x0_projected:
        print('x0 was outside C and has been projected onto C')
    print('status: {}  iterations: {}'.format(result.status, result.iterations))
    print('final point: {}'.format(format_vector(result.final_point)))
    print('objective: {:.12g}'.format(result.final_objective))
    if result.kkt is not None:
        print('kkt: {}  multipliers: {}  stationarity residual: {:.3e}'.format(result.kkt.is_kkt,
                                                                               format_vector(result.kkt.multipliers),
                                                                               result.kkt.stationarity_residual))
    if trace_out:
        write_trace_csv(result.trace, trace_out)
        print('trace written to {}'.format(trace_out))
    if comps:
        conv = component_convergence_check(result.trace, comps)
        print('closest component: {}  distance: {:.3e}  converged: {}'.format(conv.closest, conv.final_distance,
                                                                             conv.converged))
    if result.status == status_diverged:
        print('iterates diverged, the qualification condition may fail or f may be unbounded below on C')
        return exit_numerical
    return exit_ok


def cmd_qc(file: str, use_dask: bool = False) -> int:
    """
    Print the QC verdict of every nonempty pseudo-face, exit 0 if QC holds and 1 if it fails
    """

    pf = load_problem_file(file)
    report = qc_check(pf.problem, use_dask=use_dask)
    for face in report.per_face:
        line = 'alpha=[{}]  {}'.format(format_index_set(face.alpha), face.verdict)
        if face.witness is not None:
            line += '  witness v={}'.format(format_vector(face.witness))
        print(line)
    print('QC {}'.format(report.overall))
    return exit_ok if report.overall == qc_holds else exit_failed_check


def cmd_reproduce_example() -> int:
    report = reproduce_example()
    print(report.render())
    return exit_ok if report.all_passed else exit_failed_check


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='idca', description='Inertial DC algorithms for indefinite quadratic programs')
    parser.add_argument('--version', action='version', version='idca {}'.format(__version__))
    sub = parser.add_subparsers(dest='command')

    solve = sub.add_parser('solve', help='run InDCA1 or InDCA2 on a problem file')
    solve.add_argument('file', help='JSON problem file')
    solve.add_argument('--algo', choices=list(algorithms), default=algo_indca1)
    solve.add_argument('--eta', default='auto', help='auto or a number above the spectral bound')
    solve.add_argument('--gamma', default=None, help='absolute inertial weight or frac:theta with theta in [0, 1)')
    solve.add_argument('--tol', type=parse_number, default=default_tol)
    solve.add_argument('--max-iter', type=int, default=None)
    solve.add_argument('--x0', default=None, help='starting point name or comma separated vector')
    solve.add_argument('--trace', default=None, help='write the per iteration trace to this csv')
    solve.add_argument('--components', default=None, help='comma separated component names to track')

    qc = sub.add_parser('qc', help='check the qualification condition over all pseudo-faces')
    qc.add_argument('file', help='JSON problem file')
    qc.add_argument('--dask', action='store_true', help='evaluate the faces concurrently')

    sub.add_parser('reproduce', help='reproduce the worked two dimensional example')
    return parser


def main(argv=None) -> int:
    configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return exit_ok if e.code in (0, None) else exit_usage
    if args.command is None:
        parser.print_help()
        return exit_usage
    try:
        if args.command == 'solve':
            return cmd_solve(args.file, args.algo, args.eta, args.gamma, args.tol, args.max_iter, args.x0, args.trace,
                             args.components)
        if args.command == 'qc':
            return cmd_qc(args.file, args.dask)
        return cmd_reproduce_example()
    except (RuntimeError, np.linalg.LinAlgError) as e:
        print('idca: numerical failure: {}'.format(e), file=sys.stderr)
        return exit_numerical
    except (ValueError, ZeroDivisionError) as e:
        print('idca: error: {}'.format(e), file=sys.stderr)
        return exit_usage


if __name__ == '__main__':
    sys.exit(main())
