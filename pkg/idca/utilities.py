import os
import logging
from fractions import Fraction
from typing import Union

import numpy as np

from idca.exceptions import DimensionMismatchError

log_environment_variable = 'IDCA_LOG'
log_format = '%(asctime)s %(levelname)s %(name)s: %(message)s'


def configure_logging(level: str = None):
    """
    Configure the idca logger hierarchy.  The level comes from the argument, else from the IDCA_LOG environment
    variable, else WARNING.

    Parameters
    ----------
    level
        optional, one of DEBUG, INFO, WARNING, ERROR

    Returns
    -------
    logging.Logger
        the root idca logger
    """

    if level is None:
        level = os.environ.get(log_environment_variable, 'WARNING')
    numeric_level = logging.getLevelName(str(level).upper())
    if not isinstance(numeric_level, int):
        numeric_level = logging.WARNING
    logger = logging.getLogger('idca')
    logger.setLevel(numeric_level)
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(log_format))
        logger.addHandler(handler)
    return logger


def parse_number(value: Union[str, int, float]) -> float:
    """
    Convert a number given as int, float, decimal string or rational 'p/q' string to the nearest double.

    Parameters
    ----------
    value
        number to convert, ex: 0.25, '0.25', '1/4', '-109/432'

    Returns
    -------
    float
        nearest double to value
    """

    if isinstance(value, bool):
        raise ValueError('parse_number: booleans are not numbers')
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        # Fraction does exact rational arithmetic, float() of it rounds to nearest
        return float(Fraction(value.strip()))
    raise ValueError('parse_number: unable to parse {} as a number'.format(value))


def as_vector(values, size: int = None, name: str = 'vector') -> np.ndarray:
    """
    Return values as a 1d float64 array, checking the length if size is given
    """

    arr = np.asarray(values, dtype=np.float64).reshape(-1)
    if size is not None and arr.size != size:
        raise DimensionMismatchError('{}: expected {} entries, found {}'.format(name, size, arr.size))
    return arr


def as_matrix(values, rows: int, cols: int, name: str = 'matrix') -> np.ndarray:
    """
    Return values as a rows x cols float64 array.  Accepts nested row lists or a flat row-major list.
    """

    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 1 and arr.size == rows * cols:
        arr = arr.reshape(rows, cols)
    elif arr.size == 0 and rows * cols == 0:
        arr = arr.reshape(rows, cols)
    if arr.shape != (rows, cols):
        raise DimensionMismatchError('{}: expected shape ({}, {}), found {}'.format(name, rows, cols, arr.shape))
    return arr


def read_only(arr: np.ndarray) -> np.ndarray:
    """
    Return a private read-only copy of arr
    """

    arr = np.array(arr, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


def format_index_set(indices) -> str:
    """
    Render an index set for reports and the trace csv, ex: (0, 2) -> '0;2', () -> ''
    """

    return ';'.join(str(int(i)) for i in indices)


def format_vector(x: np.ndarray, precision: int = 10) -> str:
    return '(' + ', '.join('{:.{}g}'.format(float(v), precision) for v in np.asarray(x).reshape(-1)) + ')'
