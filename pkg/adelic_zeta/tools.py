__all__ = ['LOGGER_NAME', 'THREADS_ENV_VAR', 'Timer', 'complex_fsum', 'parse_decimal', 'parse_matrix', 'thread_cap']

import math
import os
import time
from decimal import Decimal, InvalidOperation

import numpy as np
import numpy.typing as npt

from typing import Optional, Iterable, Any, Union

LOGGER_NAME = 'adelic_zeta'
THREADS_ENV_VAR = 'ADELIC_ZETA_THREADS'


class Timer:
    """Monotonic stopwatch used to report evaluation times in the logs"""
    start_time: Optional[int]

    def __init__(self) -> None:
        self.start_time = None

    def start(self) -> "Timer":
        self.start_time = time.perf_counter_ns()
        return self

    def elapsed_ns(self) -> int:
        if self.start_time is None:
            return 0
        return time.perf_counter_ns() - self.start_time

    def elapsed(self) -> float:
        return float(self.elapsed_ns()) / 1.0e9


def complex_fsum(values: Iterable[Union[complex, float]]) -> complex:
    """Compensated sum of complex values. Real and imaginary parts are each summed with :func:`math.fsum`"""
    re = []
    im = []
    for v in values:
        c = complex(v)
        re.append(c.real)
        im.append(c.imag)
    return complex(math.fsum(re), math.fsum(im))


def parse_decimal(text: Any, what: str) -> float:
    """
    Converts a decimal string (or a JSON number) to a float. Strings go through :class:`decimal.Decimal`
    so that long digit expansions are rounded once.

    :raises ValueError: If the value is not a finite decimal
    """
    if isinstance(text, bool):
        raise ValueError('%s must be a decimal string, got a boolean' % what)
    if isinstance(text, (int, float)):
        val = float(text)
    elif isinstance(text, str):
        try:
            val = float(Decimal(text.strip()))
        except (InvalidOperation, ValueError):
            raise ValueError('%s is not a decimal string: %r' % (what, text))
    else:
        raise ValueError('%s must be a decimal string, got %s' % (what, type(text).__name__))
    if not math.isfinite(val):
        raise ValueError('%s must be finite' % what)
    return val


def parse_matrix(rows: Any, what: str, nrows: Optional[int] = None, ncols: Optional[int] = None) -> npt.NDArray[np.float64]:
    """Converts a row-major list of decimal strings into a float matrix, checking its shape"""
    if not isinstance(rows, list) or len(rows) == 0:
        raise ValueError('%s must be a non-empty list of rows' % what)
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, list):
            raise ValueError('%s row %d is not a list' % (what, i))
        out.append([parse_decimal(x, '%s[%d][%d]' % (what, i, j)) for j, x in enumerate(row)])
    width = len(out[0])
    if any(len(r) != width for r in out):
        raise ValueError('%s is not rectangular' % what)
    if nrows is not None and len(out) != nrows:
        raise ValueError('%s must have %d rows, got %d' % (what, nrows, len(out)))
    if ncols is not None and width != ncols:
        raise ValueError('%s must have %d columns, got %d' % (what, ncols, width))
    return np.array(out, dtype=np.float64)


def thread_cap(default: int = 4) -> int:
    """Number of worker threads allowed, read from ``ADELIC_ZETA_THREADS``"""
    env = os.environ.get(THREADS_ENV_VAR)
    if env is None or env.strip() == '':
        return max(1, min(default, os.cpu_count() or 1))
    try:
        val = int(env)
    except ValueError:
        raise ValueError('%s must be an integer, got %r' % (THREADS_ENV_VAR, env))
    if val < 1:
        raise ValueError('%s must be at least 1' % THREADS_ENV_VAR)
    return val
