__all__ = [
    'Method',
    'ZetaSpec',
    'ZetaPoint',
    'Residues',
    'FEScan',
    'ZetaFunction',
    'zeta_direct',
    'I_integral',
    'zeta_continued',
    'residues',
    'fe_scan',
    'POLE_DISTANCE'
]

import math
import cmath
import logging
import threading
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from adelic_zeta.errors import CompatibilityError, PoleError, ZetaDomainError
from adelic_zeta.field_data import NumberFieldData
from adelic_zeta.lattice import MetrizedLattice, shell_tail_bound
from adelic_zeta.moduli import ModuliChart, QuadratureSpec, build_chart
from adelic_zeta.numerics import quad_1d_vector, upper_gamma_bound
from adelic_zeta.tools import LOGGER_NAME, Timer, complex_fsum

from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

FloatArray = npt.NDArray[np.float64]
ComplexArray = npt.NDArray[np.complex128]
Number = Union[complex, float, int]

POLE_DISTANCE = 1e-12
_FIT_NODES = 16
_FIT_RADIUS = 0.25


class Method:
    DIRECT = 'direct'
    CONTINUED = 'continued'
    COMPACT = 'I'
    BOTH = 'both'


@dataclass(frozen=True)
class ZetaSpec:
    """
    Which zeta function to evaluate: ``Z_{F,r;A,B,C}`` with the subtracted-term exponents ``alpha, beta``.
    Left unset, alpha and beta take the compatible values B and C; any other pair has no continuation.
    """
    field: NumberFieldData
    rank: int
    A: float = 1.0
    B: float = -1.0
    C: float = 0.0
    alpha: Optional[float] = None
    beta: Optional[float] = None
    quadrature: Optional[QuadratureSpec] = None
    tol: float = 1e-11

    def validate(self) -> None:
        if isinstance(self.rank, bool) or not isinstance(self.rank, int) or self.rank < 1:
            raise ValueError('rank must be a positive integer')
        if not isinstance(self.A, (int, float)) or not math.isfinite(self.A) or self.A <= 0:
            raise ValueError('A must be a positive real number')
        if not isinstance(self.B, (int, float)) or not math.isfinite(self.B) or self.B == 0:
            raise ValueError('B must be a nonzero real number')
        if not isinstance(self.C, (int, float)) or not math.isfinite(self.C):
            raise ValueError('C must be a real number')
        if not self.tol > 0:
            raise ValueError('tol must be positive')
        if self.alpha is not None and self.alpha != self.B:
            raise CompatibilityError('alpha=%r differs from B=%r: the subtracted term does not match and no continuation exists' % (self.alpha, self.B))
        if self.beta is not None and self.beta != self.C:
            raise CompatibilityError('beta=%r differs from C=%r: the subtracted term does not match and no continuation exists' % (self.beta, self.C))

    def key(self) -> Tuple[Any, ...]:
        """Hashable by value, the quadrature settings included"""
        q = self.quadrature
        return (self.field, self.rank, float(self.A), float(self.B), float(self.C), self.alpha, self.beta, float(self.tol),
                None if q is None else q.key() + (q.logger_name,))

    def fe_image(self, s: Number) -> complex:
        """The point paired with s by the functional equation"""
        return -complex(s) - (self.A + 2.0 * self.C) / self.B

    def poles(self) -> Tuple[complex, complex]:
        return complex(-self.C / self.B), complex(-(self.A + self.C) / self.B)


@dataclass(frozen=True)
class ZetaPoint:
    __slots__ = ('s', 'value', 'err', 'method')

    s: complex
    value: complex
    err: float
    method: str

    def to_dict(self) -> Dict[str, Any]:
        return {'s': [self.s.real, self.s.imag], 'value': [self.value.real, self.value.imag], 'err': self.err, 'method': self.method}

    def __repr__(self) -> str:
        return '<%s Z(%s) = %s ± %.2e [%s]>' % (self.__class__.__name__, self.s, self.value, self.err, self.method)


@dataclass(frozen=True)
class Residues:
    """Closed-form residues at both poles, and the values fitted from contour integrals of the continued function"""
    __slots__ = ('pole0', 'res0', 'poleA', 'resA', 'fit0', 'fitA', 'fit_err')

    pole0: complex
    res0: float
    poleA: complex
    resA: float
    fit0: complex
    fitA: complex
    fit_err: float

    def as_tuple(self) -> Tuple[float, float]:
        return (self.res0, self.resA)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'poles': [[self.pole0.real, self.pole0.imag], [self.poleA.real, self.poleA.imag]],
            'residues': [self.res0, self.resA],
            'fitted': [[self.fit0.real, self.fit0.imag], [self.fitA.real, self.fitA.imag]],
            'fit_err': self.fit_err,
        }


@dataclass(frozen=True)
class FEScan:
    """
    ``symmetry_residual``: max of ``|Z(s) - Z(s')|`` over the grid, s' the functional-equation image.
    ``path_residual``: max of ``|direct - continued|`` over the grid points inside the convergence half-plane,
    with ``combined_err`` the largest sum of the two reported errors there.
    """
    __slots__ = ('symmetry_residual', 'relative_symmetry_residual', 'path_residual', 'combined_err', 'points', 'path_points')

    symmetry_residual: float
    relative_symmetry_residual: float
    path_residual: Optional[float]
    combined_err: Optional[float]
    points: int
    path_points: int

    @property
    def max_residual(self) -> float:
        return max(self.symmetry_residual, self.path_residual or 0.0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'max_residual': self.max_residual,
            'symmetry_residual': self.symmetry_residual,
            'relative_symmetry_residual': self.relative_symmetry_residual,
            'path_residual': self.path_residual,
            'combined_err': self.combined_err,
            'points': self.points,
            'path_points': self.path_points,
        }


class _Spectrum:
    """
    Nonzero squared norms ``q`` (with multiplicity ``m``) of every chart node lattice, concatenated node after node.
    Vectors left out are covered by one pseudo-term ``omitted_mass * exp(-pi cut_q (w - w_ref))`` valid for ``w >= w_ref``.
    """
    __slots__ = ('q', 'm', 'starts', 'empty', 'fine', 'coarse', 'entry_weight', 'cut_q', 'omitted_mass', 'w_ref')

    q: FloatArray
    m: FloatArray
    starts: npt.NDArray[np.intp]
    empty: npt.NDArray[np.bool_]
    fine: FloatArray
    coarse: FloatArray
    entry_weight: FloatArray
    cut_q: float
    omitted_mass: float
    w_ref: float

    def __init__(self, qs: List[FloatArray], ms: List[FloatArray], fine: FloatArray, coarse: FloatArray,
                 cut_q: float, omitted_mass: float, w_ref: float) -> None:
        counts = np.array([len(q) for q in qs], dtype=np.intp)
        self.q = np.concatenate(qs) if len(qs) > 0 else np.zeros(0)
        self.m = np.concatenate(ms) if len(ms) > 0 else np.zeros(0)
        self.empty = counts == 0
        self.starts = np.concatenate(([0], np.cumsum(counts)[:-1])).astype(np.intp)[~self.empty]
        self.fine = fine
        self.coarse = coarse
        self.entry_weight = np.repeat(np.maximum(np.abs(fine), np.abs(coarse)), counts)
        self.cut_q = cut_q
        self.omitted_mass = omitted_mass
        self.w_ref = w_ref

    def excess(self, w: FloatArray) -> FloatArray:
        """theta - 1 of every node lattice dilated so that squared norms scale by w, shape (len(w), nodes)"""
        if len(self.q) == 0:
            return np.zeros((len(w), len(self.fine)))
        terms = np.exp(-math.pi * np.outer(w, self.q)) * self.m
        out = np.zeros((len(w), len(self.fine)))
        out[:, ~self.empty] = np.add.reduceat(terms, self.starts, axis=1)
        return out


class _Tables:
    __slots__ = ('upper', 'full', 'v_cut', 'dual_excess', 'theta_upper', 'theta_cut', 'w_fine', 'w_coarse')

    upper: _Spectrum
    full: _Spectrum
    v_cut: float
    dual_excess: float
    theta_upper: float
    theta_cut: float
    w_fine: float
    w_coarse: float


class ZetaFunction:
    """
    Evaluator of one zeta function. Built from a :class:`ZetaSpec`, reused for every point.

    The work variable is ``t = -B s - C``: ``Z_{A,B,C}(s) = |disc|^(rC/2) Z_A(t)`` with
    ``Z_A(t) = ∫ (theta^A - 1) V^t dμ`` over the moduli chart times the degree line (``dV/V``), V the covolume.

    Node lattices and their theta spectra are computed once, on first use, under a lock.
    The evaluator is safe to share between threads.
    """
    LOGGER_NAME = LOGGER_NAME
    COMPACT_CACHE_SIZE = 256

    spec: ZetaSpec
    quadrature: QuadratureSpec
    chart: ModuliChart
    W: float
    logger: logging.Logger

    def __init__(self, spec: ZetaSpec) -> None:
        spec.validate()
        self.spec = spec
        self.quadrature = spec.quadrature.copy() if spec.quadrature is not None else QuadratureSpec()
        self.logger = logging.getLogger(self.quadrature.logger_name)
        self.chart = build_chart(spec.field, spec.rank)
        self.W = self.chart.total_volume
        self.A = float(spec.A)
        self.dimension = spec.rank * spec.field.degree
        self.prefactor = math.exp(0.5 * spec.rank * spec.C * spec.field.log_abs_discriminant)
        self.tol = float(spec.tol)
        self._lock = threading.Lock()
        self._tables: Optional[_Tables] = None
        self._compact_cache: "OrderedDict[complex, Tuple[complex, float]]" = OrderedDict()

    # ---- parametrization -------------------------------------------------

    def to_t(self, s: Number) -> complex:
        return -self.spec.B * complex(s) - self.spec.C

    # ---- precomputation --------------------------------------------------

    def _get_tables(self) -> _Tables:
        with self._lock:
            if self._tables is None:
                timer = Timer().start()
                self._tables = self._build_tables()
                self.logger.debug('Zeta tables for rank %d over %s ready in %.3fs: %d/%d spectrum entries, V_cut=%g',
                                  self.spec.rank, self.spec.field.name or '?', timer.elapsed(), len(self._tables.upper.q), len(self._tables.full.q), self._tables.v_cut)
            return self._tables

    def _build_tables(self) -> _Tables:
        nodes = self.chart.nodes(self.quadrature)
        n = self.dimension
        fine = np.array([node.weight for node in nodes], dtype=np.float64)
        coarse = np.array([node.coarse_weight for node in nodes], dtype=np.float64)
        tail_tol = self.tol * 1e-4
        dual_shortest = [node.lattice.dual().shortest_vector_bound for node in nodes]

        # Below V_cut the dual excess is negligible and the integral has a closed form
        v_cut = 0.5
        for _ in range(80):
            c = v_cut ** (-1.0 / n)
            eps = max(shell_tail_bound(c * lam, n, 0.999 * c * lam) for lam in dual_shortest)
            if eps <= self.tol * 1e-3:
                break
            v_cut *= 0.5

        w_cut = v_cut ** (2.0 / n)
        full_q: List[FloatArray] = []
        full_m: List[FloatArray] = []
        up_q: List[FloatArray] = []
        up_m: List[FloatArray] = []
        full_cut = math.inf
        up_cut = math.inf
        full_mass = 0.0
        up_mass = 0.0
        theta_upper = 1.0
        theta_cut = 1.0
        for node, wmax in zip(nodes, np.maximum(np.abs(fine), np.abs(coarse))):
            lat: MetrizedLattice = node.lattice
            dense = lat.bv_twist(0.5 * math.log(w_cut))
            r_dense, tail_dense = dense.theta_radius(tail_tol)
            r_full = r_dense / math.sqrt(w_cut)
            r_up, tail_up = lat.theta_radius(tail_tol)
            r_up = min(r_up, r_full)
            pts = lat.enumerate(r_full)
            norms = pts.norms2[np.any(pts.coefficients != 0, axis=1)]
            q, m = np.unique(norms, return_counts=True)
            m = m.astype(np.float64)
            keep = q <= r_up * r_up * (1.0 + 1e-12)
            full_q.append(q)
            full_m.append(m)
            up_q.append(q[keep])
            up_m.append(m[keep])
            full_cut = min(full_cut, r_full * r_full)
            up_cut = min(up_cut, r_up * r_up)
            full_mass += float(wmax) * tail_dense
            up_mass += float(wmax) * tail_up
            theta_upper = max(theta_upper, 1.0 + float(np.sum(m[keep] * np.exp(-math.pi * q[keep]))) + tail_up)
            theta_cut = max(theta_cut, 1.0 + float(np.sum(m * np.exp(-math.pi * w_cut * q))) + tail_dense)

        tables = _Tables()
        tables.upper = _Spectrum(up_q, up_m, fine, coarse, up_cut, up_mass, 1.0)
        tables.full = _Spectrum(full_q, full_m, fine, coarse, full_cut, full_mass, w_cut)
        tables.v_cut = v_cut
        tables.dual_excess = eps
        tables.theta_upper = theta_upper
        tables.theta_cut = theta_cut
        tables.w_fine = math.fsum(fine.tolist())
        tables.w_coarse = math.fsum(coarse.tolist())
        return tables

    # ---- integrands and bounds ------------------------------------------

    def _integrand(self, spectrum: _Spectrum, t: complex) -> Any:
        n = self.dimension
        A = self.A

        def f(u: FloatArray) -> ComplexArray:
            w = np.exp(2.0 * u / n)
            eps = spectrum.excess(w)
            g = np.expm1(A * np.log1p(eps))
            weight = np.exp(t * u)
            return np.stack([(g @ spectrum.fine) * weight, (g @ spectrum.coarse) * weight])
        return f

    def _power_factor(self, theta_max: float) -> float:
        # theta^A - 1 <= A theta^max(A-1, 0) (theta - 1)
        return self.A * theta_max ** max(self.A - 1.0, 0.0)

    def _gamma_tail(self, spectrum: _Spectrum, sigma: float, w_from: float, theta_max: float) -> float:
        """Bound on the integral over ``u >= (N/2) log w_from`` of the weighted integrand, spectrum and omitted part"""
        n = self.dimension
        a = 0.5 * n * sigma
        total = 0.0
        if len(spectrum.q) > 0:
            x = math.pi * spectrum.q
            with np.errstate(divide='ignore', over='ignore'):
                log_g = np.log(upper_gamma_bound(a, x * w_from))
                terms = np.exp(np.log(spectrum.m * spectrum.entry_weight) - a * np.log(x) + log_g)
            total += math.fsum(terms.tolist())
        total += self._omitted_tail(spectrum, sigma, w_from)
        return self._power_factor(theta_max) * 0.5 * n * total

    def _omitted_tail(self, spectrum: _Spectrum, sigma: float, w_from: float) -> float:
        if spectrum.omitted_mass == 0.0 or not math.isfinite(spectrum.cut_q):
            return 0.0
        a = 0.5 * self.dimension * sigma
        x = math.pi * spectrum.cut_q
        with np.errstate(divide='ignore', over='ignore'):
            log_g = float(np.log(upper_gamma_bound(a, x * w_from))[0])
        return math.exp(math.log(spectrum.omitted_mass) + x * spectrum.w_ref - a * math.log(x) + log_g)

    # ---- the three integrals --------------------------------------------

    def _compact(self, t: complex) -> Tuple[complex, float]:
        """``∫_{V >= 1}`` part, entire in t. Returns (value, err)"""
        with self._lock:
            if t in self._compact_cache:
                self._compact_cache.move_to_end(t)
                return self._compact_cache[t]
        tables = self._get_tables()
        spectrum = tables.upper
        n = self.dimension
        sigma = t.real
        budget = 0.1 * self.tol
        if self.quadrature.v_max is not None:
            u_max = math.log(self.quadrature.v_max)
        else:
            u_max = 0.5
            while u_max < 200.0 and self._gamma_tail(spectrum, sigma, math.exp(2.0 * u_max / n), tables.theta_upper) > budget:
                u_max += 0.5
        tail = self._gamma_tail(spectrum, sigma, math.exp(2.0 * u_max / n), tables.theta_upper)
        # omitted vectors over the whole range, not only past u_max
        omitted = self._power_factor(tables.theta_upper) * 0.5 * n * self._omitted_tail(spectrum, sigma, 1.0)
        res = quad_1d_vector(self._integrand(spectrum, t), 0.0, u_max, tol=0.25 * self.tol,
                             max_panels=self.quadrature.max_panels, initial_panels=self.quadrature.v_panels)
        value = complex(res.value[0])
        err = float(res.err[0]) + abs(complex(res.value[0]) - complex(res.value[1])) + tail + omitted
        if self.logger.isEnabledFor(logging.DEBUG):
            self.logger.debug('I(%s): u_max=%.2f, %d evaluations, err=%.2e', t, u_max, res.evaluations, err)
        with self._lock:
            self._compact_cache[t] = (value, err)
            while len(self._compact_cache) > self.COMPACT_CACHE_SIZE:
                self._compact_cache.popitem(last=False)
        return value, err

    def _lower(self, t: complex) -> Tuple[complex, float]:
        """``∫_{V_cut <= V <= 1}`` by quadrature plus the closed form below V_cut"""
        tables = self._get_tables()
        spectrum = tables.full
        sigma = t.real
        A = self.A
        u_cut = math.log(tables.v_cut)
        res = quad_1d_vector(self._integrand(spectrum, t), u_cut, 0.0, tol=0.25 * self.tol,
                             max_panels=self.quadrature.max_panels, initial_panels=self.quadrature.v_panels)
        value = complex(res.value[0])
        err = float(res.err[0]) + abs(complex(res.value[0]) - complex(res.value[1]))
        err += self._power_factor(tables.theta_cut) * spectrum.omitted_mass * abs(u_cut) * max(1.0, tables.v_cut ** sigma)

        bracket = cmath.exp((t - A) * u_cut) / (t - A) - cmath.exp(t * u_cut) / t
        closed = self.W * bracket
        eps = tables.dual_excess
        remainder = max(self.W, tables.w_fine) * A * (1.0 + eps) ** max(A - 1.0, 0.0) * eps * tables.v_cut ** (sigma - A) / (sigma - A)
        err += remainder + (abs(tables.w_fine - tables.w_coarse) + abs(tables.w_fine - self.W)) * abs(bracket)
        return value + closed, err

    def _direct_t(self, t: complex) -> Tuple[complex, float]:
        if not t.real > self.A:
            raise ZetaDomainError('The defining integral converges only for Re(-B s - C) > A = %g, got %g' % (self.A, t.real))
        low, low_err = self._lower(t)
        high, high_err = self._compact(t)
        return low + high, low_err + high_err

    def _continued_t(self, t: complex) -> Tuple[complex, float]:
        A = self.A
        if abs(t) <= POLE_DISTANCE or abs(t - A) <= POLE_DISTANCE:
            raise PoleError('Z has a pole at %s' % (t,))
        i1, e1 = self._compact(t)
        i2, e2 = self._compact(A - t)
        value = complex_fsum([i1, i2, -self.W / t, -self.W / (A - t)])
        rounding = 4.0 * 2.0**-52 * (abs(i1) + abs(i2) + abs(self.W / t) + abs(self.W / (A - t)))
        return value, e1 + e2 + rounding

    # ---- public evaluation ----------------------------------------------

    def _point(self, s: Number, value: complex, err: float, method: str, timer: Timer) -> ZetaPoint:
        point = ZetaPoint(s=complex(s), value=self.prefactor * value, err=self.prefactor * err, method=method)
        self.logger.info('Z(%s) = %s ± %.2e [%s] in %.3fs', point.s, point.value, point.err, method, timer.elapsed())
        return point

    def direct(self, s: Number) -> ZetaPoint:
        """
        The defining integral, valid in the convergence half-plane.

        :raises ZetaDomainError: Outside the half-plane
        """
        timer = Timer().start()
        value, err = self._direct_t(self.to_t(s))
        return self._point(s, value, err, Method.DIRECT, timer)

    def compact(self, s: Number) -> ZetaPoint:
        """The entire part ``I``: the integral over the lattices of covolume at least 1"""
        timer = Timer().start()
        value, err = self._compact(self.to_t(s))
        return self._point(s, value, err, Method.COMPACT, timer)

    def continued(self, s: Number) -> ZetaPoint:
        """
        ``I(t) + I(A - t) - W/t - W/(A - t)``, valid everywhere except at the two poles.

        :raises PoleError: At a pole
        """
        timer = Timer().start()
        value, err = self._continued_t(self.to_t(s))
        return self._point(s, value, err, Method.CONTINUED, timer)

    def evaluate(self, s: Number, method: str = Method.CONTINUED) -> List[ZetaPoint]:
        if method == Method.DIRECT:
            return [self.direct(s)]
        if method == Method.CONTINUED:
            return [self.continued(s)]
        if method == Method.COMPACT:
            return [self.compact(s)]
        if method == Method.BOTH:
            return [self.direct(s), self.continued(s)]
        raise ValueError('Unknown method %r' % method)

    def closed_residues(self) -> Tuple[float, float]:
        """Residues at the poles ``-C/B`` and ``-(A + C)/B``: ``K W / B`` and ``-K W / B``, ``K = |disc|^(rC/2)``"""
        r = self.prefactor * self.W / self.spec.B
        return r, -r

    def residues(self) -> Residues:
        """Closed-form residues, with the values fitted by a trapezoid contour integral around each pole"""
        pole0, poleA = self.spec.poles()
        res0, resA = self.closed_residues()
        radius = min(_FIT_RADIUS, 0.25 * abs(poleA - pole0))
        fits = []
        fit_err = 0.0
        for pole in (pole0, poleA):
            samples = []
            worst = 0.0
            for k in range(_FIT_NODES):
                offset = radius * cmath.exp(2j * math.pi * k / _FIT_NODES)
                point = self.continued(pole + offset)
                samples.append(offset * point.value)
                worst = max(worst, point.err)
            fine = complex_fsum(samples) / _FIT_NODES
            coarse = complex_fsum(samples[::2]) / (_FIT_NODES // 2)
            fits.append(fine)
            fit_err = max(fit_err, abs(fine - coarse) + radius * worst)
        return Residues(pole0=pole0, res0=res0, poleA=poleA, resA=resA, fit0=fits[0], fitA=fits[1], fit_err=fit_err)

    def fe_scan(self, grid: Iterable[Number]) -> FEScan:
        """Functional-equation residual of the continued path, and direct-versus-continued agreement where both apply"""
        sym = 0.0
        rel = 0.0
        path: Optional[float] = None
        combined: Optional[float] = None
        count = 0
        path_count = 0
        for s in grid:
            count += 1
            z = self.continued(s)
            z_image = self.continued(self.spec.fe_image(s))
            d = abs(z.value - z_image.value)
            sym = max(sym, d)
            rel = max(rel, d / max(1.0, abs(z.value)))
            if self.to_t(s).real > self.A:
                direct = self.direct(s)
                path_count += 1
                path = max(path or 0.0, abs(direct.value - z.value))
                combined = max(combined or 0.0, direct.err + z.err)
        return FEScan(symmetry_residual=sym, relative_symmetry_residual=rel, path_residual=path, combined_err=combined, points=count, path_points=path_count)


_EVALUATOR_CACHE_SIZE = 32
_evaluators: "OrderedDict[Tuple[Any, ...], ZetaFunction]" = OrderedDict()
_evaluators_lock = threading.Lock()


def _evaluator(spec: ZetaSpec) -> ZetaFunction:
    spec.validate()
    key = spec.key()
    with _evaluators_lock:
        fn = _evaluators.get(key)
        if fn is not None:
            _evaluators.move_to_end(key)
            return fn
    fn = ZetaFunction(spec)
    with _evaluators_lock:
        fn = _evaluators.setdefault(key, fn)
        _evaluators.move_to_end(key)
        while len(_evaluators) > _EVALUATOR_CACHE_SIZE:
            _evaluators.popitem(last=False)
    return fn


def zeta_direct(spec: ZetaSpec, s: Number) -> ZetaPoint:
    """Defining integral of the zeta function at s. Raises :class:`ZetaDomainError` outside the convergence half-plane"""
    return _evaluator(spec).direct(s)


def I_integral(spec: ZetaSpec, s: Number) -> ZetaPoint:
    """The entire part I at s (the lattices of covolume at least 1)"""
    return _evaluator(spec).compact(s)


def zeta_continued(spec: ZetaSpec, s: Number) -> ZetaPoint:
    """Meromorphic continuation through ``I(s) + I(A - s) - W/s - W/(A - s)``. Raises :class:`PoleError` at the poles"""
    return _evaluator(spec).continued(s)


def residues(spec: ZetaSpec) -> Residues:
    return _evaluator(spec).residues()


def fe_scan(spec: ZetaSpec, grid: Iterable[Number]) -> FEScan:
    return _evaluator(spec).fe_scan(grid)
