from typing import Union

import numpy as np

from idca.certify import make_component, make_piece
from idca.engine import run, algorithms, algo_indca1
from idca.idca_variables import default_tol
from idca.model import build_problem, make_decomposition, make_config, IqpProblem
from idca.problem_file import parse_problem_document, ProblemFile

# The two dimensional worked example: minimize x1^2 - x2^2 subject to
#   row 0: x1 - x2 >= 0,  row 1: x1 + x2 >= 0,  row 2: x1 >= 1/4
# Its KKT set is F1 u F2 u {(1/4, 0)} with F1 = {x1 = x2 >= 1/4} and F2 = {x1 = -x2 >= 1/4}.
example_document = {
    'n': 2,
    'm': 3,
    'Q': [[2, 0], [0, -2]],
    'q': [0, 0],
    'A': [[1, -1], [1, 1], [1, 0]],
    'b': [0, 0, '1/4'],
    'starting_points': {
        'case1_f1_t0': ['1/4', '1/4'],
        'case1_f1_t1': ['5/4', '5/4'],
        'case1_f2_t0': ['1/4', '-1/4'],
        'case1_f2_t1': ['5/4', '-5/4'],
        'case2': ['1/4', 0],
        'case3': ['1/4', '1/8'],
        'case4': [1, 0],
        'case5': [1, '1/8'],
    },
    'components': {
        'F1': [{'Aeq': [[1, -1]], 'beq': [0], 'Aineq': [[1, 1], [1, 0]], 'bineq': [0, '1/4']}],
        'F2': [{'Aeq': [[1, 1]], 'beq': [0], 'Aineq': [[1, -1], [1, 0]], 'bineq': [0, '1/4']}],
        'P': [{'Aeq': [[1, 0], [0, 1]], 'beq': ['1/4', 0]}],
    },
}


def example_file() -> ProblemFile:
    """
    The worked example with its named starting points and its three KKT components F1, F2 and P = {(1/4, 0)}
    """

    return parse_problem_document(example_document)


def example_problem() -> IqpProblem:
    return example_file().problem


def example_components() -> list:
    return list(example_file().components.values())


def box_problem(Q=None, q=None) -> IqpProblem:
    """
    The unit box [0, 1]^2, A = [I; -I], b = (0, 0, -1, -1), with an indefinite objective unless Q is given
    """

    Q = np.array([[1.0, 2.0], [2.0, -1.0]]) if Q is None else Q
    q = np.array([0.5, -0.25]) if q is None else q
    A = np.vstack([np.eye(2), -np.eye(2)])
    return build_problem(2, 4, Q, q, A, [0.0, 0.0, -1.0, -1.0])


def point_component(x, name: str = ''):
    """
    Single point component {x}
    """

    x = np.asarray(x, dtype=np.float64).reshape(-1)
    return make_component([make_piece(x.size, np.eye(x.size), x)], name)


def solve_problem(p: IqpProblem, x0, algo: str = algo_indca1, eta: Union[str, float] = 'auto', gamma: float = None,
                  gamma_fraction: float = None, tol: float = default_tol, max_iter: int = None,
                  bounds_method: str = 'jacobi'):
    """
    Build the decomposition matching algo, the inertial configuration, and run the solve.

    Parameters
    ----------
    p
        problem
    x0
        starting point
    algo
        'indca1' or 'indca2'
    eta
        'auto' or an explicit decomposition parameter
    gamma
        optional absolute inertial weight
    gamma_fraction
        optional, gamma as a fraction of rho / 2
    tol
        stopping tolerance
    max_iter
        iteration cap
    bounds_method
        'jacobi' or 'gershgorin'

    Returns
    -------
    DcDecomposition
        decomposition used
    InertialConfig
        configuration used
    SolveResult
        result of the solve
    """

    if algo not in algorithms:
        raise ValueError('solve_problem: algo must be one of {}, found {}'.format(list(algorithms), algo))
    dc = make_decomposition(p, algorithms[algo], eta, bounds_method)
    cfg = make_config(dc, gamma=gamma, gamma_fraction=gamma_fraction, tol=tol, max_iter=max_iter)
    return dc, cfg, run(p, dc, cfg, x0, algo)
