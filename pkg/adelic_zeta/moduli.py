__all__ = [
    'ChartKind',
    'QuadratureSpec',
    'ChartNode',
    'ModuliChart',
    'build_chart',
    'chart_to_lattice',
    'fundamental_domain_lattice',
    'moduli_volume',
    'degree_slice_iter'
]

import math
import logging
import itertools
import functools
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from adelic_zeta.errors import ChartDomainError, UnsupportedModuliError
from adelic_zeta.field_data import NumberFieldData, rationals
from adelic_zeta.lattice import MetrizedLattice
from adelic_zeta.numerics import ChartRule, CHART_VOLUME, chart_gauss_nodes, chart_monte_carlo_nodes, gauss_legendre
from adelic_zeta.tools import LOGGER_NAME, complex_fsum

from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

FloatArray = npt.NDArray[np.float64]

_CHART_SLACK = 1e-12


class ChartKind:
    POINT = 'point'
    UNIT_TORUS = 'unit-torus-times-classgroup'
    RANK2_Q = 'rank2-Q-domain'


class QuadratureSpec:
    """
    Quadrature settings shared by the moduli sample stream and the zeta evaluator.
    Built from the quadrature JSON document or from keyword overrides.
    """
    __slots__ = (
        'v_panels',
        'v_max',
        'chart_rule',
        'chart_points',
        'torus_points',
        'seed',
        'max_panels',
        'logger_name'
    )

    v_panels: int
    v_max: Optional[float]
    chart_rule: str
    chart_points: int
    torus_points: int
    seed: int
    max_panels: int
    logger_name: str

    def __init__(self, **kwargs: Any) -> None:
        self.v_panels = 4
        self.v_max = None
        self.chart_rule = ChartRule.GAUSS_LEGENDRE
        self.chart_points = 12
        self.torus_points = 16
        self.seed = 0
        self.max_panels = 4000
        self.logger_name = LOGGER_NAME
        for k, v in kwargs.items():
            self.set(k, v, validate=False)
        self.validate()

    def set(self, key: str, val: Any, validate: bool = True) -> None:
        if key not in self.__slots__:
            raise ValueError('Unknown quadrature parameter "%s"' % key)
        setattr(self, key, val)
        if validate:
            self.validate()

    def validate(self) -> None:
        for name in ('v_panels', 'chart_points', 'torus_points', 'seed', 'max_panels'):
            val = getattr(self, name)
            if not isinstance(val, int) or isinstance(val, bool):
                raise ValueError('%s must be an integer' % name)

        if self.v_panels < 1:
            raise ValueError('v_panels must be at least 1')

        if self.v_max is not None:
            if not isinstance(self.v_max, (int, float)) or isinstance(self.v_max, bool):
                raise ValueError('v_max must be a number')
            self.v_max = float(self.v_max)
            if not math.isfinite(self.v_max) or self.v_max <= 1.0:
                raise ValueError('v_max must be a finite number greater than 1')

        if self.chart_rule not in ChartRule.ALL:
            raise ValueError('chart_rule must be one of %s' % ', '.join(ChartRule.ALL))

        if self.chart_rule == ChartRule.GAUSS_LEGENDRE:
            if self.chart_points < 2 or self.chart_points % 2 != 0:
                raise ValueError('chart_points must be an even integer >= 2 with the Gauss-Legendre rule')
        elif self.chart_points < 2:
            raise ValueError('chart_points must be at least 2 with the Monte-Carlo rule')

        if self.torus_points < 2 or self.torus_points % 2 != 0:
            raise ValueError('torus_points must be an even integer >= 2')

        if self.seed < 0:
            raise ValueError('seed must be non-negative')

        if self.max_panels < 1:
            raise ValueError('max_panels must be at least 1')

        if not isinstance(self.logger_name, str):
            raise ValueError('logger_name must be a string')

    @classmethod
    def from_dict(cls, data: Any) -> "QuadratureSpec":
        """Reads the quadrature JSON document. ``v_max`` may be a decimal string"""
        if not isinstance(data, dict):
            raise ValueError('Quadrature spec must be a JSON object')
        kwargs = dict(data)
        if isinstance(kwargs.get('v_max'), str):
            kwargs['v_max'] = float(kwargs['v_max'])
        return cls(**kwargs)

    def to_dict(self) -> Dict[str, Any]:
        return {k: getattr(self, k) for k in self.__slots__ if k != 'logger_name'}

    def copy(self) -> "QuadratureSpec":
        return QuadratureSpec(**{k: getattr(self, k) for k in self.__slots__})

    def key(self) -> Tuple[Any, ...]:
        return tuple(getattr(self, k) for k in self.__slots__ if k != 'logger_name')

    def __repr__(self) -> str:
        return '<%s %s>' % (self.__class__.__name__, ', '.join('%s=%r' % (k, getattr(self, k)) for k in self.__slots__))


@dataclass(frozen=True)
class ChartNode:
    """
    A quadrature node of a chart: a covolume-1 lattice with its weight in the fine rule
    and in the embedded coarse rule used for the error estimate
    """
    __slots__ = ('params', 'lattice', 'weight', 'coarse_weight')

    params: Tuple[float, ...]
    lattice: MetrizedLattice
    weight: float
    coarse_weight: float


class ModuliChart:
    """
    Chart on the moduli of semistable metrized lattices of fixed degree, for one (field, rank) pair.

    * ``point``: rank 1 over a field with no units beyond roots of unity and class number 1 (Q included).
    * ``unit-torus-times-classgroup``: rank 1, class representatives times the torus ``R^k / Z^k`` of unit logarithms, ``k`` the unit rank.
    * ``rank2-Q-domain``: rank 2 over Q, shape ``(x, y)`` in the truncated fundamental domain with measure ``dx dy / y^2``.
    """
    LOGGER_NAME = LOGGER_NAME

    field: NumberFieldData
    rank: int
    kind: str
    dimension: int
    measure: str
    total_volume: float
    logger: logging.Logger

    def __init__(self, field: NumberFieldData, rank: int) -> None:
        self.field = field
        self.rank = rank
        self.logger = logging.getLogger(self.LOGGER_NAME)
        if rank == 2 and field.is_rationals:
            self.kind = ChartKind.RANK2_Q
            self.dimension = 2
            self.measure = 'dx dy / y^2 on |x| <= 1/2, x^2 + y^2 >= 1, y <= 1'
            self.total_volume = CHART_VOLUME
        elif rank == 1:
            self.total_volume = _rank_one_volume(field)
            k = field.unit_rank
            h = field.class_number or 1
            self.kind = ChartKind.POINT if (k == 0 and h == 1) else ChartKind.UNIT_TORUS
            self.dimension = k
            self.measure = 'mass 2^r1 h R / w spread uniformly over %d class(es) x unit torus of dimension %d' % (h, k)
        else:
            raise UnsupportedModuliError('No moduli chart for rank %d over %s' % (rank, field.name or 'this field'))
        self._nodes: Dict[Tuple[Any, ...], List[ChartNode]] = {}

    @property
    def lattice_dimension(self) -> int:
        return self.rank * self.field.degree

    def contains(self, params: Sequence[float]) -> bool:
        if self.kind == ChartKind.RANK2_Q:
            if len(params) != 2:
                return False
            x, y = float(params[0]), float(params[1])
            return abs(x) <= 0.5 + _CHART_SLACK and x * x + y * y >= 1.0 - _CHART_SLACK and y <= 1.0 + _CHART_SLACK
        if len(params) != 1 + self.dimension:
            return False
        h = self.field.class_number or 1
        idx = params[0]
        if int(idx) != idx or not 0 <= int(idx) < h:
            return False
        return all(0.0 <= float(u) <= 1.0 for u in params[1:])

    def to_lattice(self, params: Sequence[float], covolume: float = 1.0) -> MetrizedLattice:
        """
        Representative lattice of the chart point, scaled to the given covolume.

        :raises ChartDomainError: If the point lies outside the chart
        """
        if not covolume > 0 or not math.isfinite(covolume):
            raise ChartDomainError('Covolume must be positive and finite')
        if not self.contains(params):
            raise ChartDomainError('Point %s lies outside the %s chart' % (tuple(params), self.kind))
        if self.kind == ChartKind.RANK2_Q:
            return _shape_lattice(self.field, float(params[0]), float(params[1]), covolume)
        return self._torus_lattice(int(params[0]), [float(u) for u in params[1:]]).scaled_to_covolume(covolume)

    def _torus_lattice(self, class_index: int, u: Sequence[float]) -> MetrizedLattice:
        f = self.field
        reps = f.class_reps if len(f.class_reps) > 0 else (f.basis_embedding,)
        gen = np.array(reps[class_index], dtype=np.float64)
        if len(u) > 0:
            t = np.asarray(u, dtype=np.float64) @ f.unit_log_matrix()
            scale = np.empty(f.degree, dtype=np.float64)
            for p in f.places():
                for c in p.coords:
                    scale[c] = math.exp(float(t[p.index]))
            gen = gen * scale[None, :]
        lat = MetrizedLattice(f, 1, gen)
        return lat.scaled_to_covolume(1.0)

    def nodes(self, spec: Optional[QuadratureSpec] = None) -> List[ChartNode]:
        """Quadrature nodes on the unit-covolume slice. Deterministic for a given spec"""
        spec = QuadratureSpec() if spec is None else spec
        key = (spec.chart_rule, spec.chart_points, spec.torus_points, spec.seed)
        if key not in self._nodes:
            if self.kind == ChartKind.RANK2_Q:
                self._nodes[key] = self._shape_nodes(spec)
            else:
                self._nodes[key] = self._torus_nodes(spec)
            if self.logger.isEnabledFor(logging.DEBUG):
                self.logger.debug('Built %d chart nodes for rank %d over %s (%s)', len(self._nodes[key]), self.rank, self.field.name or '?', self.kind)
        return self._nodes[key]

    def _shape_nodes(self, spec: QuadratureSpec) -> List[ChartNode]:
        out: List[ChartNode] = []
        if spec.chart_rule == ChartRule.MONTE_CARLO:
            x, y, w, _ = chart_monte_carlo_nodes(spec.chart_points, spec.seed)
            half = spec.chart_points // 2
            for i in range(len(x)):
                if w[i] <= 0:
                    continue
                coarse = 2.0 * float(w[i]) if i < half else 0.0
                out.append(ChartNode((float(x[i]), float(y[i])), _shape_lattice(self.field, float(x[i]), float(y[i]), 1.0), float(w[i]), coarse))
            return out
        for order, fine in ((spec.chart_points, True), (spec.chart_points // 2, False)):
            x, y, w = chart_gauss_nodes(order)
            for xi, yi, wi in zip(x, y, w):
                out.append(ChartNode((float(xi), float(yi)), _shape_lattice(self.field, float(xi), float(yi), 1.0),
                                     float(wi) if fine else 0.0, 0.0 if fine else float(wi)))
        return out

    def _torus_nodes(self, spec: QuadratureSpec) -> List[ChartNode]:
        f = self.field
        h = f.class_number or 1
        k = self.dimension
        m = spec.torus_points if k > 0 else 1
        weight = self.total_volume / (h * m**k)
        coarse = weight * 2**k
        out = []
        for c in range(h):
            for idx in itertools.product(range(m), repeat=k):
                u = [i / m for i in idx]
                on_coarse = all(i % 2 == 0 for i in idx)
                out.append(ChartNode(tuple([float(c)] + u), self._torus_lattice(c, u), weight, coarse if on_coarse else 0.0))
        return out

    def volume(self, covolume: float = 1.0, spec: Optional[QuadratureSpec] = None) -> float:
        """
        Total chart mass summed from the quadrature nodes of the slice at the given covolume.
        The chart measure does not depend on the slice, so the value is the same for every covolume.
        """
        if not covolume > 0:
            raise ChartDomainError('Covolume must be positive')
        weights = [node.weight for node in self.nodes(spec)]
        return complex_fsum(weights).real

    def __repr__(self) -> str:
        return '<%s %s rank %d over %s, volume %.12g>' % (self.__class__.__name__, self.kind, self.rank, self.field.name or '?', self.total_volume)


def _shape_lattice(field: NumberFieldData, x: float, y: float, covolume: float) -> MetrizedLattice:
    c = math.sqrt(covolume / y)
    return MetrizedLattice(field, 2, [[c, 0.0], [c * x, c * y]])


def _rank_one_volume(field: NumberFieldData) -> float:
    if field.is_rationals:
        return 1.0
    h = field.class_number
    if h is None:
        raise UnsupportedModuliError('Field %s has no class group data' % (field.name or '?'))
    reg = field.effective_regulator
    if reg is None:
        raise UnsupportedModuliError('Field %s has no regulator data' % (field.name or '?'))
    return 2.0**field.r1 * h * reg / field.roots_of_unity


@functools.lru_cache(maxsize=None)
def build_chart(field: NumberFieldData, rank: int) -> ModuliChart:
    """
    The moduli chart of a (field, rank) pair. Charts are cached per field object.

    :raises UnsupportedModuliError: For rank 2 over F != Q, rank >= 3 or missing class/unit data
    """
    if isinstance(rank, bool) or not isinstance(rank, int) or rank < 1:
        raise ValueError('rank must be a positive integer')
    return ModuliChart(field, rank)


def chart_to_lattice(chart: ModuliChart, params: Sequence[float], V: float) -> MetrizedLattice:
    """Lattice of covolume V at the chart point. Rank 2 over Q: Gram ``(V/y) [[1, x], [x, x^2 + y^2]]``"""
    return chart.to_lattice(params, V)


def fundamental_domain_lattice(x: float, y: float, V: float = 1.0, field: Optional[NumberFieldData] = None) -> MetrizedLattice:
    """
    Rank-2 lattice over Q for any ``tau = x + iy`` of the full fundamental domain, including the unstable cusp ``y > 1``.

    :raises ChartDomainError: If tau is outside the fundamental domain
    """
    if not (abs(x) <= 0.5 + _CHART_SLACK and x * x + y * y >= 1.0 - _CHART_SLACK and y > 0):
        raise ChartDomainError('tau = %r + %ri is outside the fundamental domain' % (x, y))
    if not V > 0:
        raise ChartDomainError('Covolume must be positive')
    return _shape_lattice(field if field is not None else rationals(), x, y, V)


def moduli_volume(field: NumberFieldData, rank: int) -> float:
    """
    Total mass W of the fixed-degree moduli: 1 for (Q, 1), pi/3 - 1 for (Q, 2), ``2^r1 h R / w`` for rank 1 over F.

    :raises UnsupportedModuliError: For any other pair, or when class/regulator data is missing
    """
    return build_chart(field, rank).total_volume


def degree_slice_iter(chart: ModuliChart,
                      V_range: Tuple[float, float],
                      spec: Optional[QuadratureSpec] = None
                      ) -> Iterator[Tuple[MetrizedLattice, float]]:
    """
    Sample lattices with weights for ``∫ f dμ(chart) dV/V`` over ``V_range``.
    The degree direction uses ``u = log V`` with ``v_panels`` Gauss–Legendre panels.
    An infinite upper end is cut at ``spec.v_max`` (``1e6`` when unset), the cut is logged at debug level.
    """
    spec = QuadratureSpec() if spec is None else spec
    lo, hi = float(V_range[0]), float(V_range[1])
    if not lo > 0:
        raise ChartDomainError('Lower covolume must be positive')
    if math.isinf(hi):
        hi = spec.v_max if spec.v_max is not None else 1e6
        chart.logger.debug('Infinite upper covolume cut at V=%g, the mass above it is dropped', hi)
    if hi <= lo:
        return
    u_lo, u_hi = math.log(lo), math.log(hi)
    xi, wi = gauss_legendre(12)
    edges = np.linspace(u_lo, u_hi, spec.v_panels + 1)
    nodes = chart.nodes(spec)
    for a, b in zip(edges[:-1], edges[1:]):
        half = 0.5 * (b - a)
        for t, wt in zip(xi, wi):
            u = 0.5 * (a + b) + half * float(t)
            covolume = math.exp(u)
            for node in nodes:
                if node.weight == 0.0:
                    continue
                yield node.lattice.scaled_to_covolume(covolume), node.weight * half * float(wt)
