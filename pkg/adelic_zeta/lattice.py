__all__ = [
    'MetrizedLattice',
    'ThetaValue',
    'Enumeration',
    'shell_tail_bound',
    'standard_lattice',
    'kappa_lattice',
    'adelic_lattice',
    'load_lattice',
    'lattice_from_dict',
    'lll_reduce',
    'column_reduce',
    'saturation_basis',
    'complete_to_basis',
    'integer_kernel',
    'canonical_basis'
]

import os
import json
import math
import logging
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from adelic_zeta.errors import CapacityError, DegenerateLatticeError, LatticeDataError
from adelic_zeta.field_data import NumberFieldData, rationals, builtin_field, load_field, BUILTIN_FIELDS
from adelic_zeta.tools import LOGGER_NAME, parse_matrix

from typing import Any, Dict, List, Optional, Sequence, Tuple

FloatArray = npt.NDArray[np.float64]
IntArray = npt.NDArray[np.int64]
IntMatrix = List[List[int]]

_BOUNDARY_SLACK = 1e-12
_DEGENERACY_THRESHOLD = 1e-12


# ---------------------------------------------------------------------------
# Exact integer matrix helpers. Python integers, no overflow.
# ---------------------------------------------------------------------------

def column_reduce(rows: Sequence[Sequence[int]]) -> Tuple[IntMatrix, IntMatrix, IntMatrix]:
    """
    Unimodular column reduction of a full-row-rank integer matrix R (k x N).

    :returns: (T, U, Uinv) with ``R @ U = [T | 0]``, T lower triangular k x k, U unimodular and Uinv its inverse
    :raises ValueError: If the rows are linearly dependent
    """
    r = [[int(v) for v in row] for row in rows]
    k = len(r)
    n = len(r[0]) if k > 0 else 0
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    uinv = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def swap(a: int, b: int) -> None:
        for row in r:
            row[a], row[b] = row[b], row[a]
        for row in u:
            row[a], row[b] = row[b], row[a]
        uinv[a], uinv[b] = uinv[b], uinv[a]

    def subtract(a: int, b: int, q: int) -> None:
        # column a -= q * column b
        for row in r:
            row[a] -= q * row[b]
        for row in u:
            row[a] -= q * row[b]
        uinv[b] = [x + q * y for x, y in zip(uinv[b], uinv[a])]

    for i in range(k):
        while True:
            nonzero = [j for j in range(i, n) if r[i][j] != 0]
            if len(nonzero) == 0:
                raise ValueError('Rows are linearly dependent')
            pivot = min(nonzero, key=lambda j: (abs(r[i][j]), j))
            if pivot != i:
                swap(i, pivot)
            done = True
            for j in range(i + 1, n):
                if r[i][j] != 0:
                    subtract(j, i, r[i][j] // r[i][i])
                    if r[i][j] != 0:
                        done = False
            if done:
                break
        if r[i][i] < 0:
            for row in r:
                row[i] = -row[i]
            for row in u:
                row[i] = -row[i]
            uinv[i] = [-x for x in uinv[i]]
    t = [row[:k] for row in r]
    return t, u, uinv


def saturation_basis(rows: Sequence[Sequence[int]]) -> IntMatrix:
    """Basis of ``span_Q(rows) ∩ Z^N`` for independent integer rows"""
    _, _, uinv = column_reduce(rows)
    return [list(row) for row in uinv[:len(rows)]]


def complete_to_basis(rows: Sequence[Sequence[int]]) -> IntMatrix:
    """
    Extends the rows of a saturated sublattice of Z^N to a basis of Z^N.
    The first k rows of the output span the same sublattice as ``rows``.
    """
    k = len(rows)
    _, _, uinv = column_reduce(rows)
    return [list(map(int, row)) for row in rows] + [list(row) for row in uinv[k:]]


def integer_kernel(vec: Sequence[int]) -> IntMatrix:
    """Basis (as rows) of ``{x in Z^N : x . vec = 0}`` for a nonzero integer vector"""
    _, u, _ = column_reduce([vec])
    n = len(vec)
    return [[u[i][j] for i in range(n)] for j in range(1, n)]


def canonical_basis(rows: Sequence[Sequence[int]]) -> Tuple[Tuple[int, ...], ...]:
    """Row Hermite normal form: unique for the span, used for ties and span comparisons"""
    h = [[int(v) for v in row] for row in rows]
    k = len(h)
    n = len(h[0]) if k > 0 else 0
    pivot_row = 0
    for col in range(n):
        if pivot_row >= k:
            break
        while True:
            candidates = [i for i in range(pivot_row, k) if h[i][col] != 0]
            if len(candidates) == 0:
                break
            best = min(candidates, key=lambda i: (abs(h[i][col]), i))
            h[pivot_row], h[best] = h[best], h[pivot_row]
            done = True
            for i in range(pivot_row + 1, k):
                if h[i][col] != 0:
                    q = h[i][col] // h[pivot_row][col]
                    h[i] = [a - q * b for a, b in zip(h[i], h[pivot_row])]
                    if h[i][col] != 0:
                        done = False
            if done:
                break
        if pivot_row < k and h[pivot_row][col] != 0:
            if h[pivot_row][col] < 0:
                h[pivot_row] = [-a for a in h[pivot_row]]
            p = h[pivot_row][col]
            for i in range(pivot_row):
                q = h[i][col] // p
                h[i] = [a - q * b for a, b in zip(h[i], h[pivot_row])]
            pivot_row += 1
    return tuple(tuple(row) for row in h if any(row))


# ---------------------------------------------------------------------------
# Basis reduction (internal preprocessing for enumeration)
# ---------------------------------------------------------------------------

def _gram_schmidt(b: FloatArray) -> Tuple[FloatArray, FloatArray]:
    n = b.shape[0]
    bstar = np.zeros_like(b)
    mu = np.eye(n)
    for i in range(n):
        v = b[i].copy()
        for j in range(i):
            mu[i, j] = float(b[i] @ bstar[j]) / float(bstar[j] @ bstar[j])
            v -= mu[i, j] * bstar[j]
        bstar[i] = v
    return bstar, mu


def lll_reduce(basis: FloatArray, delta: float = 0.99, max_iterations: int = 100000) -> Tuple[IntArray, FloatArray]:
    """
    Floating-point LLL reduction of the rows of ``basis``.

    :returns: (U, reduced) with ``reduced = U @ basis`` and U unimodular
    """
    n = basis.shape[0]
    u = np.eye(n, dtype=np.int64)
    b = np.array(basis, dtype=np.float64)
    bstar, mu = _gram_schmidt(b)
    k = 1
    iterations = 0
    while k < n and iterations < max_iterations:
        iterations += 1
        for j in range(k - 1, -1, -1):
            q = int(round(float(b[k] @ bstar[j]) / float(bstar[j] @ bstar[j])))
            if q != 0:
                b[k] -= q * b[j]
                u[k] -= q * u[j]
        mu_k = float(b[k] @ bstar[k - 1]) / float(bstar[k - 1] @ bstar[k - 1])
        if float(bstar[k] @ bstar[k]) >= (delta - mu_k * mu_k) * float(bstar[k - 1] @ bstar[k - 1]):
            k += 1
        else:
            b[[k - 1, k]] = b[[k, k - 1]]
            u[[k - 1, k]] = u[[k, k - 1]]
            bstar, mu = _gram_schmidt(b)
            k = max(k - 1, 1)
    reduced = u.astype(np.float64) @ np.asarray(basis, dtype=np.float64)
    return u, reduced


# ---------------------------------------------------------------------------
# Results
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Enumeration:
    """
    Lattice points of norm at most ``radius``, zero included, in canonical order
    (squared norm, then coefficients lexicographically). Coefficients refer to the lattice generator rows.
    """
    __slots__ = ('radius', 'coefficients', 'vectors', 'norms2')

    radius: float
    coefficients: IntArray
    vectors: FloatArray
    norms2: FloatArray

    def __len__(self) -> int:
        return int(self.coefficients.shape[0])

    def nonzero(self) -> "Enumeration":
        keep = np.any(self.coefficients != 0, axis=1)
        return Enumeration(radius=self.radius, coefficients=self.coefficients[keep], vectors=self.vectors[keep], norms2=self.norms2[keep])


@dataclass(frozen=True)
class ThetaValue:
    """
    Sum of exp(-pi |v|^2) over the lattice points of norm at most ``radius``.
    ``excess`` is the same sum without the zero vector, ``tail_bound`` bounds everything left out.
    """
    __slots__ = ('value', 'tail_bound', 'radius', 'excess', 'count')

    value: float
    tail_bound: float
    radius: float
    excess: float
    count: int

    def __repr__(self) -> str:
        return '<%s %.15g (tail <= %.2e, R=%.4g, %d points)>' % (self.__class__.__name__, self.value, self.tail_bound, self.radius, self.count)


def shell_tail_bound(shortest: float, dimension: int, radius: float) -> float:
    """
    Upper bound on the sum of exp(-pi |v|^2) over the vectors of norm above ``radius`` of any lattice whose nonzero
    vectors are at least ``shortest`` long. Shells of width delta are counted with the packing bound
    ``#{|v| <= rho} <= (1 + 2 rho / shortest)^N``.
    """
    r = max(float(radius), 0.0)
    delta = 1.0 / (2.0 * math.pi * max(r, 1.0))
    k = np.arange(0, 4000, dtype=np.float64)
    inner = r + k * delta
    outer = inner + delta
    log_terms = dimension * np.log1p(2.0 * outer / shortest) - math.pi * inner * inner
    top = float(np.max(log_terms))
    if top < -745.0:
        return 0.0
    return math.exp(top) * math.fsum(np.exp(log_terms - top).tolist())


class _Reduction:
    __slots__ = ('transform', 'basis', 'cholesky', 'gs_norms')

    transform: IntArray
    basis: FloatArray
    cholesky: FloatArray
    gs_norms: FloatArray

    def __init__(self, generator: FloatArray) -> None:
        self.transform, self.basis = lll_reduce(generator)
        gram = self.basis @ self.basis.T
        self.cholesky = np.linalg.cholesky(0.5 * (gram + gram.T)).T
        self.gs_norms = np.abs(np.diag(self.cholesky))


class MetrizedLattice:
    """
    A full-rank lattice in weighted Minkowski space ``R^N``, ``N = r * n``, standing for a rank ``r`` metrized
    O_F-lattice. Row ``i`` of ``generator`` is the i-th Z-basis vector. Instances are immutable.

    :param field: The arithmetic context
    :type field: :class:`NumberFieldData<adelic_zeta.NumberFieldData>`

    :param rank_over_field: Rank r over F
    :type rank_over_field: int

    :param generator: N x N nonsingular real matrix
    :type generator: numpy array or nested sequence

    :raises DegenerateLatticeError: If the generator is not finite, has the wrong shape or is numerically singular
    """
    LOGGER_NAME = LOGGER_NAME
    DEFAULT_MAX_POINTS = 10**8

    field: NumberFieldData
    rank_over_field: int
    generator: FloatArray
    logger: logging.Logger

    def __init__(self, field: NumberFieldData, rank_over_field: int, generator: Any) -> None:
        if not isinstance(rank_over_field, int) or isinstance(rank_over_field, bool) or rank_over_field < 1:
            raise DegenerateLatticeError('rank_over_field must be a positive integer')
        g = np.array(generator, dtype=np.float64)
        dim = rank_over_field * field.degree
        if g.ndim != 2 or g.shape != (dim, dim):
            raise DegenerateLatticeError('Generator must be %dx%d for rank %d over a degree %d field, got shape %s' % (dim, dim, rank_over_field, field.degree, g.shape))
        if not np.all(np.isfinite(g)):
            raise DegenerateLatticeError('Generator has non-finite entries')
        sign, logdet = np.linalg.slogdet(g)
        row_norms = np.sqrt(np.sum(g * g, axis=1))
        if sign == 0 or np.any(row_norms == 0) or logdet < math.log(_DEGENERACY_THRESHOLD) + float(np.sum(np.log(row_norms))):
            raise DegenerateLatticeError('Generator is numerically singular')
        g.setflags(write=False)
        self.field = field
        self.rank_over_field = rank_over_field
        self.generator = g
        self._log_covolume = float(logdet)
        self._dual: Optional[MetrizedLattice] = None
        self._reduction: Optional[_Reduction] = None
        self.logger = logging.getLogger(self.LOGGER_NAME)

    @property
    def dimension(self) -> int:
        return self.rank_over_field * self.field.degree

    @property
    def gram(self) -> FloatArray:
        return np.asarray(self.generator @ self.generator.T, dtype=np.float64)

    @property
    def log_covolume(self) -> float:
        return self._log_covolume

    def covolume(self) -> float:
        """|det(generator)|"""
        return math.exp(self._log_covolume)

    def degree(self) -> float:
        """Arakelov degree ``(r/2) log|disc| - log covolume``"""
        return 0.5 * self.rank_over_field * self.field.log_abs_discriminant - self._log_covolume

    def slope(self) -> float:
        return self.degree() / self.rank_over_field

    def dual(self) -> "MetrizedLattice":
        """Euclidean dual, generator ``inv(generator).T``. ``dual(dual(L))`` is L itself"""
        if self._dual is None:
            d = MetrizedLattice(self.field, self.rank_over_field, np.linalg.inv(self.generator).T)
            d._log_covolume = -self._log_covolume
            d._dual = self
            self._dual = d
        return self._dual

    def scaled(self, c: float) -> "MetrizedLattice":
        """The lattice c*L. Covolume is multiplied by c^N"""
        if not c > 0 or not math.isfinite(c):
            raise ValueError('Scale factor must be positive and finite')
        out = MetrizedLattice(self.field, self.rank_over_field, self.generator * c)
        out._log_covolume = self._log_covolume + self.dimension * math.log(c)
        return out

    def bv_twist(self, t: float) -> "MetrizedLattice":
        """Scalar twist: generator scaled by e^t, degree drops by r*n*t"""
        if t == 0:
            return self
        out = MetrizedLattice(self.field, self.rank_over_field, self.generator * math.exp(t))
        out._log_covolume = self._log_covolume + self.dimension * t
        return out

    def scaled_to_covolume(self, covolume: float) -> "MetrizedLattice":
        if not covolume > 0:
            raise ValueError('Covolume must be positive')
        return self.bv_twist((math.log(covolume) - self._log_covolume) / self.dimension)

    def _reduced(self) -> _Reduction:
        if self._reduction is None:
            self._reduction = _Reduction(self.generator)
        return self._reduction

    @property
    def shortest_vector_bound(self) -> float:
        """Lower bound on the shortest nonzero vector length (smallest Gram–Schmidt norm of the reduced basis)"""
        return float(np.min(self._reduced().gs_norms))

    def reduced_basis(self) -> Tuple[IntArray, FloatArray]:
        """(U, U @ generator) for an LLL-reduced basis"""
        red = self._reduced()
        return red.transform.copy(), red.basis.copy()

    def estimated_count(self, radius: float) -> float:
        """Gaussian-heuristic count of lattice points in the ball of given radius"""
        n = self.dimension
        log_ball = 0.5 * n * math.log(math.pi) + n * math.log(max(radius, 1e-300)) - math.lgamma(0.5 * n + 1.0)
        return math.exp(min(log_ball - self._log_covolume, 700.0))

    def enumerate(self, radius: float, max_points: Optional[int] = None) -> Enumeration:
        """
        Every lattice vector of Euclidean norm at most ``radius`` (Fincke–Pohst on an LLL-reduced basis).

        :param radius: Ball radius, >= 0
        :param max_points: Capacity ceiling. Defaults to :attr:`DEFAULT_MAX_POINTS`

        :raises CapacityError: If the ball holds (or would hold) more points than the ceiling
        """
        if not radius >= 0 or not math.isfinite(radius):
            raise ValueError('Enumeration radius must be a finite non-negative number')
        ceiling = self.DEFAULT_MAX_POINTS if max_points is None else max_points
        estimate = self.estimated_count(radius)
        if estimate > ceiling:
            raise CapacityError(estimate, ceiling)

        red = self._reduced()
        n = self.dimension
        rmat = red.cholesky
        diag = np.diag(rmat)
        radius2 = radius * radius * (1.0 + _BOUNDARY_SLACK)
        chunks: List[IntArray] = []
        x = [0] * n
        found = [0]

        def level(i: int, partial: float) -> None:
            rem = radius2 - partial
            if rem < 0:
                return
            center = -math.fsum(float(rmat[i, j]) * x[j] for j in range(i + 1, n)) / float(diag[i])
            half = math.sqrt(rem) / abs(float(diag[i]))
            lo = math.ceil(center - half)
            hi = math.floor(center + half)
            if lo > hi:
                return
            if i == 0:
                block = np.tile(np.array(x, dtype=np.int64), (hi - lo + 1, 1))
                block[:, 0] = np.arange(lo, hi + 1, dtype=np.int64)
                chunks.append(block)
                found[0] += hi - lo + 1
                if found[0] > ceiling:
                    raise CapacityError(found[0], ceiling)
                return
            for xi in range(lo, hi + 1):
                x[i] = xi
                d = float(diag[i]) * (xi - center)
                level(i - 1, partial + d * d)
            x[i] = 0

        level(n - 1, 0.0)

        reduced_coeffs = np.concatenate(chunks, axis=0) if chunks else np.zeros((0, n), dtype=np.int64)
        coeffs = reduced_coeffs @ red.transform
        vectors = coeffs.astype(np.float64) @ self.generator
        norms2 = np.einsum('ij,ij->i', vectors, vectors)
        keep = norms2 <= radius * radius * (1.0 + _BOUNDARY_SLACK)
        coeffs, vectors, norms2 = coeffs[keep], vectors[keep], norms2[keep]
        keys = [coeffs[:, j] for j in range(n - 1, -1, -1)] + [norms2]
        order = np.lexsort(keys)
        result = Enumeration(radius=float(radius), coefficients=coeffs[order], vectors=vectors[order], norms2=norms2[order])
        if self.logger.isEnabledFor(logging.DEBUG):
            self.logger.debug('Enumerated %d points of norm <= %.6g in dimension %d', len(result), radius, n)
        return result

    def theta_tail_bound(self, radius: float) -> float:
        """
        Upper bound on the sum of exp(-pi |v|^2) over lattice vectors with |v| > radius.
        Shells of width delta are counted with the packing bound ``#{|v| <= rho} <= (1 + 2 rho / lambda)^N``.
        """
        return shell_tail_bound(self.shortest_vector_bound, self.dimension, radius)

    def theta_radius(self, tol: float) -> Tuple[float, float]:
        """Smallest radius on a geometric schedule whose tail bound is below ``tol / 2``, and that bound"""
        if not tol > 0:
            raise ValueError('tol must be positive')
        r = math.sqrt(max(math.log(1.0 / tol), 1.0) / math.pi)
        for _ in range(2000):
            bound = self.theta_tail_bound(r)
            if bound <= 0.5 * tol:
                return r, bound
            r *= 1.02
        raise CapacityError(self.estimated_count(r), self.DEFAULT_MAX_POINTS)

    def theta(self, tol: float = 1e-14, max_points: Optional[int] = None) -> ThetaValue:
        """
        Theta series ``sum_v exp(-pi |v|^2)`` with a rigorous bound on the discarded tail.

        :param tol: The tail bound is guaranteed below this value
        :raises CapacityError: Propagated from :meth:`enumerate`
        """
        radius, bound = self.theta_radius(tol)
        points = self.enumerate(radius, max_points=max_points)
        nonzero = points.norms2[np.any(points.coefficients != 0, axis=1)]
        excess = math.fsum(np.exp(-math.pi * nonzero).tolist())
        return ThetaValue(value=1.0 + excess, tail_bound=bound, radius=radius, excess=excess, count=len(points))

    def module_action(self) -> List[FloatArray]:
        """Matrices of multiplication by the integral basis elements, acting on row vectors of R^N blockwise"""
        n = self.field.degree
        out = []
        for i in range(n):
            block = self.field.multiplication_matrix(self.field.basis_embedding[i])
            out.append(np.kron(np.eye(self.rank_over_field), block))
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            'field': self.field.name or 'Q',
            'rank_over_field': self.rank_over_field,
            'generator': [[repr(float(v)) for v in row] for row in self.generator],
        }

    def __repr__(self) -> str:
        return '<%s rank %d over %s, covolume %.6g, degree %.6g>' % (self.__class__.__name__, self.rank_over_field, self.field.name or '?', self.covolume(), self.degree())


def standard_lattice(field: NumberFieldData) -> MetrizedLattice:
    """O_F in weighted Minkowski space. Degree 0"""
    return MetrizedLattice(field, 1, field.basis_embedding)


def kappa_lattice(field: NumberFieldData) -> MetrizedLattice:
    """The inverse different, lattice-side avatar of the dualizing element. Degree log|disc|"""
    return MetrizedLattice(field, 1, field.inv_different_embedding)


def adelic_lattice(field: NumberFieldData, g_infinity: Sequence[Any], ideal: Optional[FloatArray] = None) -> MetrizedLattice:
    """
    The metrized lattice of ``g`` in GL_r(F ⊗ R): the module ``ideal^r`` (O_F^r by default) with the archimedean
    component of g applied place by place. ``g_infinity[p]`` is an r x r real matrix for a real place and an r x r
    complex matrix for a complex place, places ordered as :meth:`NumberFieldData.places`.
    Block b of the coordinates (length n) holds the b-th component.
    """
    places = field.places()
    if len(g_infinity) != len(places):
        raise ValueError('Need one matrix per archimedean place (%d), got %d' % (len(places), len(g_infinity)))
    mats = [np.atleast_2d(np.asarray(m)) for m in g_infinity]
    r = mats[0].shape[0]
    if any(m.shape != (r, r) for m in mats):
        raise ValueError('Place matrices must all be %dx%d' % (r, r))
    n = field.degree
    base = field.basis_embedding if ideal is None else np.asarray(ideal, dtype=np.float64)

    rows = np.zeros((r * n, r * n), dtype=np.float64)
    for b in range(r):
        rows[b * n:(b + 1) * n, b * n:(b + 1) * n] = base

    out = np.zeros_like(rows)
    for p, m in zip(places, mats):
        if p.is_complex:
            k0, k1 = p.coords
            z = (rows[:, [b * n + k0 for b in range(r)]] + 1j * rows[:, [b * n + k1 for b in range(r)]])
            gz = z @ np.asarray(m, dtype=np.complex128).T
            for b in range(r):
                out[:, b * n + k0] = gz[:, b].real
                out[:, b * n + k1] = gz[:, b].imag
        else:
            k = p.coords[0]
            xr = rows[:, [b * n + k for b in range(r)]]
            gx = xr @ np.asarray(m, dtype=np.float64).T
            for b in range(r):
                out[:, b * n + k] = gx[:, b]
    return MetrizedLattice(field, r, out)


def _resolve_field(ref: Any, base_dir: str) -> NumberFieldData:
    if not isinstance(ref, str) or ref == '':
        raise LatticeDataError('"field" must be "Q", a builtin field name or a path')
    if ref == 'Q':
        return rationals()
    if ref in BUILTIN_FIELDS:
        return builtin_field(ref)
    path = ref if os.path.isabs(ref) else os.path.join(base_dir, ref)
    return load_field(path)


def lattice_from_dict(data: Any, base_dir: str = '.') -> MetrizedLattice:
    """Builds a lattice from the decoded lattice JSON document. Relative field paths resolve against ``base_dir``"""
    if not isinstance(data, dict):
        raise LatticeDataError('Lattice document must be a JSON object')
    rank = data.get('rank_over_field')
    if isinstance(rank, bool) or not isinstance(rank, int):
        raise LatticeDataError('"rank_over_field" must be an integer')
    field = _resolve_field(data.get('field'), base_dir)
    try:
        generator = parse_matrix(data.get('generator'), 'generator')
    except ValueError as e:
        raise LatticeDataError(str(e))
    return MetrizedLattice(field, rank, generator)


def load_lattice(path: str) -> MetrizedLattice:
    """
    Loads a lattice file: ``{"field": path-or-"Q", "rank_over_field": int, "generator": [[decimal-string]]}``

    :raises LatticeDataError: On read or schema errors
    :raises DegenerateLatticeError: If the generator is unusable
    """
    try:
        with open(path, 'r', encoding='utf-8') as fh:
            data = json.load(fh)
    except (OSError, ValueError) as e:
        raise LatticeDataError('Cannot read lattice file %s: %s' % (path, e))
    return lattice_from_dict(data, base_dir=os.path.dirname(os.path.abspath(path)))

