"""
Problem files and trace export.

A problem file is a JSON document:

    {"n": 2, "m": 3,
     "Q": [[2, 0], [0, -2]],          nested rows or a flat row-major list
     "q": [0, 0],
     "A": [[1, -1], [1, 1], [1, 0]],
     "b": [0, 0, "1/4"],
     "starting_points": {"case3": ["1/4", "1/8"]},                               optional
     "components": {"F1": [{"Aeq": [[1, -1]], "beq": [0],
                            "Aineq": [[1, 1], [1, 0]], "bineq": [0, "1/4"]}]}}   optional

Every number may be a JSON number or a string in decimal or rational "p/q" notation, converted to the nearest double.
Saving writes shortest round-trip float literals, so load -> save -> load is bitwise identical.
"""

import os
import json
import logging
from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from idca.certify import ComponentDescription, make_component, make_piece
from idca.engine import SolveTrace
from idca.exceptions import ProblemFileError, DimensionMismatchError
from idca.model import IqpProblem, build_problem
from idca.utilities import parse_number, format_index_set

logger = logging.getLogger(__name__)

required_keys = ['n', 'm', 'Q', 'q', 'A', 'b']
piece_keys = ['Aeq', 'beq', 'Aineq', 'bineq']


@dataclass
class ProblemFile:
    problem: IqpProblem
    starting_points: Dict[str, np.ndarray] = field(default_factory=dict)
    components: Dict[str, ComponentDescription] = field(default_factory=dict)


def _numbers(values, where: str):
    """
    Recursively convert a (nested) list of JSON numbers / numeric strings to floats
    """

    if isinstance(values, list):
        return [_numbers(v, where) for v in values]
    try:
        return parse_number(values)
    except (ValueError, ZeroDivisionError) as e:
        raise ProblemFileError('{}: unable to parse number {!r} ({})'.format(where, values, e))


def _matrix(values, cols: int, where: str) -> np.ndarray:
    arr = np.asarray(_numbers(values, where), dtype=np.float64)
    if arr.size == 0:
        return np.zeros((0, cols))
    if arr.ndim == 1:
        if arr.size % cols:
            raise ProblemFileError('{}: {} entries is not a whole number of rows of length {}'.format(where, arr.size, cols))
        arr = arr.reshape(-1, cols)
    if arr.ndim != 2 or arr.shape[1] != cols:
        raise ProblemFileError('{}: expected rows of length {}, found shape {}'.format(where, cols, arr.shape))
    return arr


def parse_problem_document(doc: dict) -> ProblemFile:
    """
    Build a ProblemFile from a decoded JSON document.

    Parameters
    ----------
    doc
        decoded problem document, see the module docstring for the layout

    Returns
    -------
    ProblemFile
        validated problem with its optional starting points and components
    """

    if not isinstance(doc, dict):
        raise ProblemFileError('problem file: top level must be an object')
    missing = [k for k in required_keys if k not in doc]
    if missing:
        raise ProblemFileError('problem file: missing required keys {}'.format(missing))
    n, m = doc['n'], doc['m']
    if not isinstance(n, int) or not isinstance(m, int) or isinstance(n, bool) or isinstance(m, bool):
        raise ProblemFileError('problem file: n and m must be integers, found {!r}, {!r}'.format(n, m))
    try:
        problem = build_problem(n, m, _numbers(doc['Q'], 'Q'), _numbers(doc['q'], 'q'), _numbers(doc['A'], 'A'),
                                _numbers(doc['b'], 'b'))
    except DimensionMismatchError as e:
        raise ProblemFileError('problem file: {}'.format(e))

    starting_points = {}
    sections = {}
    for section in ('starting_points', 'components'):
        sections[section] = doc.get(section, {})
        if not isinstance(sections[section], dict):
            raise ProblemFileError('problem file: {} must be an object keyed by name'.format(section))
    for name, values in sections['starting_points'].items():
        point = np.asarray(_numbers(values, 'starting point {}'.format(name)), dtype=np.float64).reshape(-1)
        if point.size != n:
            raise ProblemFileError('problem file: starting point {} has {} entries, expected {}'.format(name, point.size, n))
        starting_points[name] = point

    components = {}
    for name, pieces in sections['components'].items():
        if not isinstance(pieces, list):
            raise ProblemFileError('problem file: component {} must be a list of pieces'.format(name))
        built = []
        for i, piece in enumerate(pieces):
            where = 'component {} piece {}'.format(name, i)
            if not isinstance(piece, dict):
                raise ProblemFileError('{}: must be an object'.format(where))
            unknown = set(piece) - set(piece_keys)
            if unknown:
                raise ProblemFileError('{}: unknown keys {}'.format(where, sorted(unknown)))
            Aeq = _matrix(piece.get('Aeq', []), n, where + ' Aeq')
            Aineq = _matrix(piece.get('Aineq', []), n, where + ' Aineq')
            beq = np.asarray(_numbers(piece.get('beq', []), where + ' beq'), dtype=np.float64).reshape(-1)
            bineq = np.asarray(_numbers(piece.get('bineq', []), where + ' bineq'), dtype=np.float64).reshape(-1)
            try:
                built.append(make_piece(n, Aeq, beq, Aineq, bineq))
            except DimensionMismatchError as e:
                raise ProblemFileError('{}: {}'.format(where, e))
        components[name] = make_component(built, name)
    return ProblemFile(problem, starting_points, components)


def load_problem_file(path: str) -> ProblemFile:
    """
    Read and validate a JSON problem file
    """

    if not os.path.exists(path):
        raise ProblemFileError('Unable to load problem file from {}, does not exist'.format(path))
    with open(path, 'r') as pf:
        try:
            doc = json.load(pf)
        except json.JSONDecodeError as e:
            raise ProblemFileError('Unable to decode problem file {}: {}'.format(path, e))
    return parse_problem_document(doc)


def problem_document(problem: IqpProblem, starting_points: dict = None, components: dict = None) -> dict:
    """
    JSON ready document for a problem, floats are written as shortest round-trip literals
    """

    doc = {'n': problem.n, 'm': problem.m, 'Q': problem.Q.tolist(), 'q': problem.q.tolist(), 'A': problem.A.tolist(),
           'b': problem.b.tolist()}
    if starting_points:
        doc['starting_points'] = {name: np.asarray(pt, dtype=np.float64).tolist() for name, pt in starting_points.items()}
    if components:
        doc['components'] = {name: [{'Aeq': pc.Aeq.tolist(), 'beq': pc.beq.tolist(), 'Aineq': pc.Aineq.tolist(),
                                     'bineq': pc.bineq.tolist()} for pc in comp.pieces]
                             for name, comp in components.items()}
    return doc


def save_problem_file(path: str, problem: IqpProblem, starting_points: dict = None, components: dict = None):
    """
    Write a problem (and optional starting points / components) as a JSON problem file
    """

    folder = os.path.dirname(os.path.abspath(path))
    if not os.path.exists(folder):
        raise ProblemFileError('Unable to save problem file to {}, does not exist'.format(folder))
    with open(path, 'w') as pf:
        json.dump(problem_document(problem, starting_points, components), pf, indent=2)


def trace_header(n: int) -> list:
    return ['k'] + ['x_{}'.format(i) for i in range(n)] + ['step_norm', 'd_norm', 'f', 'energy', 'inclusion_residual',
                                                           'active_set']


def write_trace_csv(trace: SolveTrace, path: str):
    """
    Write one row per trace record (k = 0 included) to a comma separated file with a fixed header.  Floats use
    repr, so the output is locale independent, and the line endings are LF.

    Parameters
    ----------
    trace
        solve trace
    path
        output csv path
    """

    header = trace_header(trace.problem.n)
    rows = []
    for rec in trace.records:
        rows.append([str(rec.k)] + [repr(float(v)) for v in rec.x] +
                    [repr(float(v)) for v in (rec.step_norm, rec.d_norm, rec.f_val, rec.energy, rec.inclusion_residual)] +
                    [format_index_set(rec.active)])
    data = np.array(rows, dtype=object).reshape(len(rows), len(header))
    np.savetxt(path, data, fmt='%s', delimiter=',', header=','.join(header), comments='', newline='\n')
    logger.info('write_trace_csv: wrote {} rows to {}'.format(len(rows), path))
