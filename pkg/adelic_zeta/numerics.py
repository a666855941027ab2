__all__ = [
    'QuadratureResult',
    'VectorQuadratureResult',
    'ChartRule',
    'gauss_legendre',
    'quad_1d',
    'quad_1d_vector',
    'chart_gauss_nodes',
    'chart_monte_carlo_nodes',
    'quad_chart',
    'upper_gamma_bound',
    'power_tail',
    'exponential_tail',
    'gaussian_tail',
    'CHART_VOLUME'
]

import math
import heapq
import logging
import functools
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from scipy import special

from adelic_zeta.errors import NonConvergenceError
from adelic_zeta.tools import LOGGER_NAME, complex_fsum

from typing import Callable, List, Optional, Tuple, Union, Any

FloatArray = npt.NDArray[np.float64]
ComplexArray = npt.NDArray[np.complex128]

ScalarIntegrand = Callable[[FloatArray], Any]
VectorIntegrand = Callable[[FloatArray], Any]
ChartIntegrand = Callable[[FloatArray, FloatArray], Any]
TailBound = Callable[[float], float]

CHART_VOLUME = math.pi / 3.0 - 1.0
_SQRT3_2 = math.sqrt(3.0) / 2.0
_MAX_CUT = 1e300

logger = logging.getLogger(LOGGER_NAME)


class ChartRule:
    GAUSS_LEGENDRE = 'gauss-legendre'
    MONTE_CARLO = 'monte-carlo'

    ALL = (GAUSS_LEGENDRE, MONTE_CARLO)


@dataclass(frozen=True)
class QuadratureResult:
    """Outcome of a scalar quadrature. ``converged`` is False only when the caller asked not to raise on failure"""
    __slots__ = ('value', 'err', 'evaluations', 'converged')

    value: complex
    err: float
    evaluations: int
    converged: bool

    def __repr__(self) -> str:
        return '<%s %s ± %.2e (%d evaluations%s)>' % (self.__class__.__name__, self.value, self.err, self.evaluations, '' if self.converged else ', NOT converged')


@dataclass(frozen=True)
class VectorQuadratureResult:
    """Same as :class:`QuadratureResult` for an integrand returning several components at once. ``err`` is per component"""
    __slots__ = ('value', 'err', 'evaluations', 'converged')

    value: ComplexArray
    err: FloatArray
    evaluations: int
    converged: bool


@functools.lru_cache(maxsize=64)
def gauss_legendre(n: int) -> Tuple[FloatArray, FloatArray]:
    """Gauss–Legendre nodes and weights on [-1, 1]. Arrays are read-only and shared"""
    if n < 1:
        raise ValueError('Gauss-Legendre order must be positive')
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


_PANEL_ORDER = 12


class _Panel:
    __slots__ = ('a', 'b', 'value', 'err')

    a: float
    b: float
    value: ComplexArray
    err: float

    def __init__(self, a: float, b: float, value: ComplexArray, err: float) -> None:
        self.a = a
        self.b = b
        self.value = value
        self.err = err

    def __lt__(self, other: "_Panel") -> bool:
        # heapq is a min-heap, the worst panel must come out first. Ties resolve on position.
        if self.err != other.err:
            return self.err > other.err
        return self.a < other.a


def _as_components(values: Any, nnodes: int) -> ComplexArray:
    arr = np.asarray(values, dtype=np.complex128)
    if arr.ndim == 0:
        arr = np.full(nnodes, complex(arr), dtype=np.complex128)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.shape[-1] != nnodes:
        raise ValueError('Integrand returned %d values for %d nodes' % (arr.shape[-1], nnodes))
    if not np.all(np.isfinite(arr)):
        raise ValueError('Integrand is not finite on the integration interval')
    return arr


def _integrate_panel(f: VectorIntegrand, a: float, b: float) -> Tuple[_Panel, int]:
    x1, w1 = gauss_legendre(_PANEL_ORDER)
    x2, w2 = gauss_legendre(2 * _PANEL_ORDER)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    nodes = np.concatenate((mid + half * x1, mid + half * x2))
    vals = _as_components(f(nodes), len(nodes))
    coarse = (vals[:, :_PANEL_ORDER] @ w1) * half
    fine = (vals[:, _PANEL_ORDER:] @ w2) * half
    err = float(np.max(np.abs(fine - coarse)))
    return _Panel(a, b, fine, err), len(nodes)


def _adaptive(f: VectorIntegrand, a: float, b: float, tol: float, max_panels: int, initial_panels: int) -> Tuple[ComplexArray, float, int, bool]:
    """Adaptive bisection of the worst panel. Returns (value, err, evaluations, converged)"""
    edges = np.linspace(a, b, initial_panels + 1)
    heap: List[_Panel] = []
    evaluations = 0
    for i in range(initial_panels):
        panel, n = _integrate_panel(f, float(edges[i]), float(edges[i + 1]))
        evaluations += n
        heapq.heappush(heap, panel)

    def total_err() -> float:
        return math.fsum(p.err for p in heap)

    min_width = 64 * np.finfo(np.float64).eps * max(abs(a), abs(b), 1.0)
    converged = total_err() <= tol
    while not converged and len(heap) < max_panels:
        worst = heapq.heappop(heap)
        mid = 0.5 * (worst.a + worst.b)
        if worst.b - worst.a < min_width:
            heapq.heappush(heap, worst)
            break
        left, n1 = _integrate_panel(f, worst.a, mid)
        right, n2 = _integrate_panel(f, mid, worst.b)
        evaluations += n1 + n2
        heapq.heappush(heap, left)
        heapq.heappush(heap, right)
        converged = total_err() <= tol

    panels = sorted(heap, key=lambda p: p.a)
    ncomp = panels[0].value.shape[0]
    value = np.array([complex_fsum(p.value[k] for p in panels) for k in range(ncomp)], dtype=np.complex128)
    return value, total_err(), evaluations, converged


def _semi_infinite(f: VectorIntegrand, a: float, tol: float, max_panels: int, initial_panels: int, scale: float,
                   tail: Optional[TailBound]) -> Tuple[ComplexArray, float, int, bool]:
    """
    Integrates over [a, inf) through ``x = a + scale (e^u - 1)``. The upper end is cut at the first
    ``X = a + scale 2^k`` where ``tail(X) <= tol / 4``; that remainder bound is added to the error, never to the value.
    """
    if tail is None:
        raise ValueError('An infinite upper limit needs a tail bound on the integrand')
    if not scale > 0 or not math.isfinite(scale):
        raise ValueError('scale must be a positive finite number')
    budget = 0.25 * tol
    width = scale
    remainder = _checked_tail(tail, a + width)
    while remainder > budget and width < _MAX_CUT:
        width *= 2.0
        remainder = _checked_tail(tail, a + width)
    if remainder > budget:
        sample = _as_components(f(np.array([a], dtype=np.float64)), 1)
        return np.zeros(sample.shape[0], dtype=np.complex128), math.inf, 1, False

    def mapped(u: FloatArray) -> ComplexArray:
        x = a + scale * np.expm1(u)
        return _as_components(f(x), len(u)) * (scale * np.exp(u))

    span = math.log1p(width / scale)
    panels = min(max(initial_panels, int(math.ceil(span))), max_panels)
    value, err, n, ok = _adaptive(mapped, 0.0, span, tol - budget, max_panels, panels)
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug('Semi-infinite quadrature from %g cut at %g, remainder <= %.2e', a, a + width, remainder)
    return value, err + remainder, n, ok


def _checked_tail(tail: TailBound, x: float) -> float:
    bound = float(tail(x))
    if math.isnan(bound) or bound < 0:
        raise ValueError('Tail bound must be a non-negative number, got %r at %g' % (bound, x))
    return bound


def power_tail(c: float, p: float) -> TailBound:
    """Remainder bound for ``|f(x)| <= c x^-p`` with p > 1: ``c X^(1-p) / (p-1)``"""
    if not p > 1 or not c >= 0:
        raise ValueError('A power tail needs p > 1 and c >= 0')

    def bound(x: float) -> float:
        if x <= 0:
            return math.inf
        return c * x ** (1.0 - p) / (p - 1.0)
    return bound


def exponential_tail(c: float, rate: float, power: float = 0.0) -> TailBound:
    """Remainder bound for ``|f(x)| <= c x^power e^(-rate x)``: ``c rate^-(power+1) Γ(power+1, rate X)``"""
    if not rate > 0 or not c >= 0 or not power > -1:
        raise ValueError('An exponential tail needs rate > 0, c >= 0 and power > -1')

    def bound(x: float) -> float:
        if x <= 0:
            return math.inf
        return c * rate ** (-(power + 1.0)) * float(upper_gamma_bound(power + 1.0, rate * x)[0])
    return bound


def gaussian_tail(c: float, rate: float) -> TailBound:
    """Remainder bound for ``|f(x)| <= c e^(-rate x^2)``: ``c Γ(1/2, rate X^2) / (2 sqrt(rate))``"""
    if not rate > 0 or not c >= 0:
        raise ValueError('A Gaussian tail needs rate > 0 and c >= 0')

    def bound(x: float) -> float:
        if x <= 0:
            return math.inf
        return c * float(upper_gamma_bound(0.5, rate * x * x)[0]) / (2.0 * math.sqrt(rate))
    return bound


def _run(f: VectorIntegrand, a: float, b: float, tol: float, max_panels: int, initial_panels: int, scale: float,
         tail: Optional[TailBound] = None) -> Tuple[ComplexArray, float, int, bool]:
    if not tol > 0:
        raise ValueError('tol must be positive')
    if max_panels < 1 or initial_panels < 1:
        raise ValueError('Panel budget must be positive')
    if math.isnan(a) or math.isnan(b) or math.isinf(a):
        raise ValueError('Lower limit must be finite')
    if b == a:
        sample = _as_components(f(np.array([a], dtype=np.float64)), 1)
        return np.zeros(sample.shape[0], dtype=np.complex128), 0.0, 1, True
    if b < a:
        value, err, n, ok = _run(f, b, a, tol, max_panels, initial_panels, scale, tail)
        return -value, err, n, ok
    if math.isinf(b):
        return _semi_infinite(f, a, tol, max_panels, initial_panels, scale, tail)
    return _adaptive(f, a, b, tol, max_panels, initial_panels)


def quad_1d(f: ScalarIntegrand,
            a: float,
            b: float,
            tol: float = 1e-10,
            max_panels: int = 2000,
            initial_panels: int = 1,
            scale: float = 1.0,
            raise_on_failure: bool = True,
            tail: Optional[TailBound] = None
            ) -> QuadratureResult:
    """
    Adaptive Gauss–Legendre integration of a vectorized integrand.

    :param f: Callable receiving a numpy array of abscissae and returning the values (real or complex) at those points
    :param a: Finite lower limit
    :param b: Upper limit, may be ``math.inf``
    :param tol: Absolute tolerance on the reported error
    :param max_panels: Panel budget of each adaptive run
    :param initial_panels: Number of equal panels to start from on a finite interval
    :param scale: Length scale of the exponential substitution on a semi-infinite interval
    :param tail: Required when ``b`` is infinite. ``tail(X)`` must bound ``|∫_X^∞ f|``, see :func:`power_tail`,
        :func:`exponential_tail` and :func:`gaussian_tail`
    :param raise_on_failure: When False, a budget exhaustion returns a result flagged ``converged=False``

    :raises NonConvergenceError: If the budget is exhausted and ``raise_on_failure`` is True
    :raises ValueError: If ``b`` is infinite and no ``tail`` is given
    """
    value, err, n, ok = _run(f, a, b, tol, max_panels, initial_panels, scale, tail)
    if value.shape[0] != 1:
        raise ValueError('quad_1d expects a scalar integrand, use quad_1d_vector')
    if not ok:
        if raise_on_failure:
            raise NonConvergenceError('Quadrature on [%g, %g] did not reach tol=%.2e (err=%.2e)' % (a, b, tol, err), complex(value[0]), err)
        logger.warning('Quadrature on [%g, %g] stopped with err=%.2e above tol=%.2e', a, b, err, tol)
    return QuadratureResult(value=complex(value[0]), err=err, evaluations=n, converged=ok)


def quad_1d_vector(f: VectorIntegrand,
                   a: float,
                   b: float,
                   tol: float = 1e-10,
                   max_panels: int = 2000,
                   initial_panels: int = 1,
                   scale: float = 1.0,
                   raise_on_failure: bool = True,
                   tail: Optional[TailBound] = None
                   ) -> VectorQuadratureResult:
    """
    Same as :func:`quad_1d` for an integrand returning an array of shape (components, nodes).
    Panels are refined on the largest component error.
    """
    value, err, n, ok = _run(f, a, b, tol, max_panels, initial_panels, scale, tail)
    if not ok:
        if raise_on_failure:
            raise NonConvergenceError('Quadrature on [%g, %g] did not reach tol=%.2e (err=%.2e)' % (a, b, tol, err), value, err)
        logger.warning('Quadrature on [%g, %g] stopped with err=%.2e above tol=%.2e', a, b, err, tol)
    return VectorQuadratureResult(value=value, err=np.full(value.shape, err), evaluations=n, converged=ok)


def chart_gauss_nodes(n: int) -> Tuple[FloatArray, FloatArray, FloatArray]:
    """
    Product Gauss–Legendre rule on the truncated fundamental domain
    ``|x| <= 1/2, x^2 + y^2 >= 1, y <= 1``. The hyperbolic density ``1/y^2`` is folded into the weights.

    :returns: (x, y, weights), each of length n*n
    """
    if n < 1:
        raise ValueError('Chart rule needs at least one point per axis')
    xi, wxi = gauss_legendre(n)
    eta, weta = gauss_legendre(n)
    x = 0.5 * xi
    wx = 0.5 * wxi
    y0 = np.sqrt(1.0 - x * x)
    half = 0.5 * (1.0 - y0)
    xs = np.repeat(x, n)
    ys = (y0[:, None] + half[:, None] * (eta[None, :] + 1.0)).ravel()
    ws = (wx[:, None] * half[:, None] * weta[None, :]).ravel() / (ys * ys)
    return xs, ys, ws


def chart_monte_carlo_nodes(samples: int, seed: int) -> Tuple[FloatArray, FloatArray, FloatArray, float]:
    """
    Uniform samples of the box ``[-1/2, 1/2] x [sqrt(3)/2, 1]`` kept when inside the chart.
    Weights estimate the hyperbolic integral; the box area is returned for the error estimate.
    """
    if samples < 2:
        raise ValueError('Monte-Carlo rule needs at least two samples')
    rng = np.random.default_rng(seed)
    x = rng.uniform(-0.5, 0.5, samples)
    y = rng.uniform(_SQRT3_2, 1.0, samples)
    area = 1.0 - _SQRT3_2
    inside = x * x + y * y >= 1.0
    w = np.where(inside, area / samples / (y * y), 0.0)
    return x, y, w, area


def quad_chart(f: ChartIntegrand,
               rule: str = ChartRule.GAUSS_LEGENDRE,
               tol: float = 1e-12,
               points: int = 12,
               seed: int = 0,
               max_points: int = 512,
               raise_on_failure: bool = True
               ) -> QuadratureResult:
    """
    Integral of ``f(x, y)`` against ``dx dy / y^2`` over the truncated fundamental domain.

    With the Gauss–Legendre rule the order per axis doubles until two successive orders agree within ``tol``.
    With the Monte-Carlo rule ``points`` samples are drawn once and ``err`` is one standard error.
    """
    if rule == ChartRule.MONTE_CARLO:
        x, y, w, area = chart_monte_carlo_nodes(points, seed)
        inside = w > 0
        vals = np.zeros(points, dtype=np.complex128)
        if np.any(inside):
            vals[inside] = np.asarray(f(x[inside], y[inside]), dtype=np.complex128)
        contrib = vals * w * points
        mean = complex(np.mean(contrib))
        stderr = float(np.std(contrib, ddof=1) / math.sqrt(points))
        return QuadratureResult(value=mean, err=stderr, evaluations=points, converged=True)

    if rule != ChartRule.GAUSS_LEGENDRE:
        raise ValueError('Unknown chart rule %r' % rule)
    if not tol > 0:
        raise ValueError('tol must be positive')

    def apply(order: int) -> complex:
        x, y, w = chart_gauss_nodes(order)
        vals = np.asarray(f(x, y), dtype=np.complex128)
        if vals.ndim == 0:
            vals = np.full(len(x), complex(vals))
        return complex_fsum(vals * w)

    n = max(2, points)
    evaluations = n * n
    previous = apply(n)
    while True:
        n2 = 2 * n
        current = apply(n2)
        evaluations += n2 * n2
        err = abs(current - previous)
        if err <= tol:
            return QuadratureResult(value=current, err=err, evaluations=evaluations, converged=True)
        if n2 >= max_points:
            if raise_on_failure:
                raise NonConvergenceError('Chart quadrature did not reach tol=%.2e (err=%.2e)' % (tol, err), current, err)
            logger.warning('Chart quadrature stopped with err=%.2e above tol=%.2e', err, tol)
            return QuadratureResult(value=current, err=err, evaluations=evaluations, converged=False)
        previous = current
        n = n2


def upper_gamma_bound(a: float, x: Union[float, FloatArray]) -> FloatArray:
    """
    Upper bound on the upper incomplete gamma function Γ(a, x) for x > 0.

    For a <= 1 this is x^(a-1) e^(-x). For a > 1 the exact value is used, or
    x^(a-1) e^(-x) x / (x - a + 1) once x > 2(a - 1) where the exact value underflows first.
    """
    xa = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if np.any(xa <= 0):
        raise ValueError('upper_gamma_bound needs x > 0')
    log_lead = (a - 1.0) * np.log(xa) - xa
    if a <= 1.0:
        return np.asarray(np.exp(log_lead), dtype=np.float64)
    out = np.empty_like(xa)
    far = xa > 2.0 * (a - 1.0)
    out[far] = np.exp(log_lead[far]) * xa[far] / (xa[far] - a + 1.0)
    near = ~far
    if np.any(near):
        out[near] = special.gammaincc(a, xa[near]) * special.gamma(a)
    return out
