__all__ = [
    'SLOPE_TOLERANCE',
    'CERTIFIED_RANK',
    'SubLattice',
    'StabilityVerdict',
    'HNStep',
    'HNFiltration',
    'slope',
    'max_slope_sub',
    'is_semistable',
    'is_stable',
    'hn_filtration'
]

import math
import logging
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from adelic_zeta.errors import ModuleStructureError, UncertifiedRankError
from adelic_zeta.lattice import MetrizedLattice, canonical_basis, complete_to_basis, integer_kernel, saturation_basis
from adelic_zeta.tools import LOGGER_NAME

from typing import Any, Dict, List, Optional, Sequence, Tuple

FloatArray = npt.NDArray[np.float64]
IntArray = npt.NDArray[np.int64]
CanonicalKey = Tuple[Tuple[int, ...], ...]

SLOPE_TOLERANCE = 1e-12
CERTIFIED_RANK = 3
MODULE_CERTIFIED_RANK = 2
_MODULE_TOLERANCE = 1e-6
_MINIMUM_TIE = 1e-12

logger = logging.getLogger(LOGGER_NAME)


@dataclass(frozen=True)
class SubLattice:
    """
    A saturated sublattice. ``coefficients`` is its canonical (Hermite normal form) basis written in the parent
    generator rows, ``generator`` the same basis in ambient coordinates, ``lattice`` the sublattice as a
    standalone :class:`MetrizedLattice` in an orthonormal frame of its span.
    """
    __slots__ = ('coefficients', 'generator', 'lattice', 'rank', 'degree', 'slope')

    coefficients: CanonicalKey
    generator: FloatArray
    lattice: MetrizedLattice
    rank: int
    degree: float
    slope: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            'rank': self.rank,
            'degree': self.degree,
            'slope': self.slope,
            'coefficients': [list(row) for row in self.coefficients],
        }


@dataclass(frozen=True)
class StabilityVerdict:
    """Answer of a (semi)stability test. ``certificate`` is the maximal-slope proper sublattice, if any"""
    __slots__ = ('holds', 'slope', 'max_sub_slope', 'certificate', 'certified')

    holds: bool
    slope: float
    max_sub_slope: Optional[float]
    certificate: Optional[SubLattice]
    certified: bool

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True)
class HNStep:
    __slots__ = ('rank', 'degree', 'slope', 'coefficients', 'sub_generator')

    rank: int
    degree: float
    slope: float
    coefficients: CanonicalKey
    sub_generator: FloatArray


@dataclass(frozen=True)
class HNFiltration:
    """
    Harder–Narasimhan filtration ``0 = M_0 ⊂ M_1 ⊂ ... ⊂ M_k = L``. The zero step is implicit;
    the last step is always the whole lattice.
    """
    __slots__ = ('steps', 'certified')

    steps: Tuple[HNStep, ...]
    certified: bool

    @property
    def is_semistable(self) -> bool:
        return len(self.steps) == 1

    def quotient_slopes(self) -> List[float]:
        out = []
        prev_rank, prev_deg = 0, 0.0
        for step in self.steps:
            out.append((step.degree - prev_deg) / (step.rank - prev_rank))
            prev_rank, prev_deg = step.rank, step.degree
        return out

    def polygon(self) -> List[Tuple[int, float]]:
        """Vertices of the degree-versus-rank polygon, origin included"""
        return [(0, 0.0)] + [(s.rank, s.degree) for s in self.steps]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'certified': self.certified,
            'steps': [{'rank': s.rank, 'degree': s.degree, 'slope': s.slope, 'coefficients': [list(r) for r in s.coefficients]} for s in self.steps],
            'quotient_slopes': self.quotient_slopes(),
            'polygon': [[r, d] for r, d in self.polygon()],
        }


class _Candidate:
    __slots__ = ('rows', 'key', 'rank', 'slope')

    rows: List[List[int]]
    key: CanonicalKey
    rank: int
    slope: float

    def __init__(self, rows: List[List[int]], rank: int, slope: float) -> None:
        self.key = canonical_basis(rows)
        self.rows = [list(r) for r in self.key]
        self.rank = rank
        self.slope = slope


class _Space:
    """A lattice (or quotient frame) together with the O_F action on its coefficients. No action means plain Z-lattice mode"""
    __slots__ = ('lattice', 'actions')

    lattice: MetrizedLattice
    actions: List[IntArray]

    def __init__(self, lattice: MetrizedLattice, actions: List[IntArray]) -> None:
        self.lattice = lattice
        self.actions = actions

    @property
    def module_mode(self) -> bool:
        return len(self.actions) > 0


def slope(lattice: MetrizedLattice) -> float:
    """Degree divided by the rank over the field"""
    return lattice.degree() / lattice.rank_over_field


def _sub_degree(field_log_disc: float, rank_over_field: float, log_covolume: float) -> float:
    return 0.5 * rank_over_field * field_log_disc - log_covolume


def _module_actions(lattice: MetrizedLattice) -> List[IntArray]:
    if lattice.field.degree == 1:
        return []
    inv = np.linalg.inv(lattice.generator)
    out = []
    for m in lattice.module_action():
        a = lattice.generator @ m @ inv
        ai = np.rint(a)
        defect = float(np.max(np.abs(a - ai)))
        if defect > _MODULE_TOLERANCE:
            raise ModuleStructureError('Lattice is not stable under multiplication by the ring of integers (defect %.3e)' % defect)
        out.append(ai.astype(np.int64))
    return out


def _minimal_vectors(lattice: MetrizedLattice) -> Tuple[IntArray, float]:
    _, reduced = lattice.reduced_basis()
    radius = float(np.min(np.sqrt(np.einsum('ij,ij->i', reduced, reduced)))) * (1.0 + 1e-9)
    pts = lattice.enumerate(radius).nonzero()
    m = float(pts.norms2[0])
    keep = pts.norms2 <= m * (1.0 + 2.0 * _MINIMUM_TIE)
    return pts.coefficients[keep], m


def _rank_one_candidates(space: _Space) -> List[_Candidate]:
    lat = space.lattice
    coeffs, m = _minimal_vectors(lat)
    log_disc = lat.field.log_abs_discriminant
    out: Dict[CanonicalKey, _Candidate] = {}
    for c in coeffs:
        cand = _Candidate([[int(v) for v in c]], 1, _sub_degree(log_disc, 1.0, 0.5 * math.log(m)))
        out.setdefault(cand.key, cand)
    return list(out.values())


def _corank_one_candidates(space: _Space) -> List[_Candidate]:
    lat = space.lattice
    dual_coeffs, m = _minimal_vectors(lat.dual())
    rank = lat.dimension - 1
    log_cov = lat.log_covolume + 0.5 * math.log(m)
    s = _sub_degree(lat.field.log_abs_discriminant, float(rank), log_cov) / rank
    out: Dict[CanonicalKey, _Candidate] = {}
    for d in dual_coeffs:
        cand = _Candidate(integer_kernel([int(v) for v in d]), rank, s)
        out.setdefault(cand.key, cand)
    return list(out.values())


def _line_candidates(space: _Space) -> List[_Candidate]:
    """O_F-lines through short vectors. The search radius grows until it covers every line of covolume below the best one found"""
    lat = space.lattice
    n = lat.field.degree
    gamma = 1.0 + 0.25 * n
    log_disc = lat.field.log_abs_discriminant
    # lines of slope >= slope(L) have covolume <= covol(L)^(1/r)
    radius = math.sqrt(gamma) * math.exp(lat.log_covolume / (lat.rank_over_field * n))
    lines: Dict[CanonicalKey, Tuple[_Candidate, float]] = {}
    for _ in range(64):
        pts = lat.enumerate(radius).nonzero()
        for c in pts.coefficients:
            nz = np.flatnonzero(c)
            if c[nz[0]] < 0:
                continue
            rows = [[int(v) for v in (c @ a)] for a in space.actions]
            key = canonical_basis(saturation_basis(rows))
            if key in lines:
                continue
            gen = np.array(key, dtype=np.float64) @ lat.generator
            _, logdet = np.linalg.slogdet(gen @ gen.T)
            log_cov = 0.5 * float(logdet)
            lines[key] = (_Candidate([list(r) for r in key], 1, _sub_degree(log_disc, 1.0, log_cov)), log_cov)
        if len(lines) == 0:
            radius *= 2.0
            continue
        best_log_cov = min(v[1] for v in lines.values())
        needed = math.sqrt(gamma) * math.exp(best_log_cov / n)
        if needed <= radius * (1.0 + 1e-12):
            break
        radius = needed
    return [v[0] for v in lines.values()]


def _search(space: _Space) -> Tuple[Optional[_Candidate], bool]:
    """Best proper saturated sublattice and whether the search was provably exhaustive"""
    lat = space.lattice
    if space.module_mode:
        r = lat.rank_over_field
        if r == 1:
            return None, True
        return _best(_line_candidates(space)), r <= MODULE_CERTIFIED_RANK
    dim = lat.dimension
    if dim == 1:
        return None, True
    cands = _rank_one_candidates(space)
    if dim >= 3:
        cands += _corank_one_candidates(space)
    return _best(cands), dim <= CERTIFIED_RANK


def _best(cands: Sequence[_Candidate]) -> Optional[_Candidate]:
    if len(cands) == 0:
        return None
    top = max(c.slope for c in cands)
    tied = [c for c in cands if c.slope >= top - SLOPE_TOLERANCE]
    tied.sort(key=lambda c: (-c.rank, c.key))
    return tied[0]


def _sub_from_rows(lattice: MetrizedLattice, rows: Sequence[Sequence[int]]) -> SubLattice:
    key = canonical_basis(rows)
    coeffs = np.array(key, dtype=np.float64)
    gen = coeffs @ lattice.generator
    k = gen.shape[0]
    n = lattice.field.degree
    _, r = np.linalg.qr(gen.T)
    frame = MetrizedLattice(lattice.field, k // n, r.T)
    return SubLattice(coefficients=key, generator=gen, lattice=frame, rank=k // n, degree=frame.degree(), slope=frame.slope())


def _top_space(lattice: MetrizedLattice) -> _Space:
    return _Space(lattice, _module_actions(lattice))


def _resolve(lattice: MetrizedLattice, allow_uncertified: bool) -> Tuple[Optional[SubLattice], bool]:
    cand, certified = _search(_top_space(lattice))
    sub = None if cand is None else _sub_from_rows(lattice, cand.rows)
    if not certified:
        if not allow_uncertified:
            raise UncertifiedRankError('Sublattice search is not exhaustive for rank %d (dimension %d); pass allow_uncertified=True for a best-effort answer'
                                       % (lattice.rank_over_field, lattice.dimension), best_effort=sub)
        logger.warning('Returning an uncertified best-effort sublattice for rank %d', lattice.rank_over_field)
    return sub, certified


def max_slope_sub(lattice: MetrizedLattice, allow_uncertified: bool = False) -> Optional[Tuple[SubLattice, float]]:
    """
    The proper saturated sublattice of largest slope. Equal slopes (within :data:`SLOPE_TOLERANCE`) go to the larger rank,
    then to the lexicographically smallest canonical basis. Lattices of rank 1 have no proper sublattice and give None.

    Over Q the search is exhaustive up to rank 3: rank-1 sublattices come from the minimal vectors of L and corank-1
    sublattices from the minimal vectors of the dual. Over a larger field the candidates are the O_F-lines
    through short vectors, exhaustive for rank 2.

    :raises UncertifiedRankError: Above the certified rank unless ``allow_uncertified`` is set
    :raises ModuleStructureError: Over a field F != Q when the lattice is not an O_F-module
    """
    sub, _ = _resolve(lattice, allow_uncertified)
    if sub is None:
        return None
    return sub, sub.slope


def is_semistable(lattice: MetrizedLattice, allow_uncertified: bool = False) -> StabilityVerdict:
    sub, certified = _resolve(lattice, allow_uncertified)
    mu = slope(lattice)
    if sub is None:
        return StabilityVerdict(holds=True, slope=mu, max_sub_slope=None, certificate=None, certified=certified)
    return StabilityVerdict(holds=sub.slope <= mu + SLOPE_TOLERANCE, slope=mu, max_sub_slope=sub.slope, certificate=sub, certified=certified)


def is_stable(lattice: MetrizedLattice, allow_uncertified: bool = False) -> StabilityVerdict:
    """Every proper sublattice has slope strictly below the slope of L"""
    sub, certified = _resolve(lattice, allow_uncertified)
    mu = slope(lattice)
    if sub is None:
        return StabilityVerdict(holds=True, slope=mu, max_sub_slope=None, certificate=None, certified=certified)
    return StabilityVerdict(holds=sub.slope < mu - SLOPE_TOLERANCE, slope=mu, max_sub_slope=sub.slope, certificate=sub, certified=certified)


def _quotient(space: _Space, rows: List[List[int]]) -> Tuple[_Space, IntArray]:
    """The quotient of the top space by the saturated sublattice spanned by ``rows``, projected on its orthogonal complement"""
    lat = space.lattice
    dim = lat.dimension
    k = len(rows)
    completion = np.array(complete_to_basis(rows), dtype=np.int64)
    basis = completion.astype(np.float64) @ lat.generator
    q, _ = np.linalg.qr(basis[:k].T, mode='complete')
    frame = MetrizedLattice(lat.field, (dim - k) // lat.field.degree, basis[k:] @ q[:, k:])
    actions = []
    if space.module_mode:
        inv = np.rint(np.linalg.inv(completion.astype(np.float64))).astype(np.int64)
        for a in space.actions:
            actions.append((completion[k:] @ a @ inv)[:, k:])
    return _Space(frame, actions), completion


def _step(lattice: MetrizedLattice, rows: Sequence[Sequence[int]]) -> HNStep:
    if len(rows) == lattice.dimension:
        identity = tuple(tuple(1 if i == j else 0 for j in range(lattice.dimension)) for i in range(lattice.dimension))
        return HNStep(rank=lattice.rank_over_field, degree=lattice.degree(), slope=slope(lattice), coefficients=identity, sub_generator=np.array(lattice.generator))
    sub = _sub_from_rows(lattice, rows)
    return HNStep(rank=sub.rank, degree=sub.degree, slope=sub.slope, coefficients=sub.coefficients, sub_generator=sub.generator)


def hn_filtration(lattice: MetrizedLattice, allow_uncertified: bool = False) -> HNFiltration:
    """
    Harder–Narasimhan filtration, built by taking the maximal destabilizing sublattice of successive quotients.

    :raises UncertifiedRankError: If a quotient falls above the certified rank and ``allow_uncertified`` is not set
    """
    top = _top_space(lattice)
    dim = lattice.dimension
    rows: List[List[int]] = []
    steps: List[HNStep] = []
    certified = True
    while len(rows) < dim:
        if len(rows) == 0:
            space, completion = top, np.eye(dim, dtype=np.int64)
        else:
            space, completion = _quotient(top, rows)
        cand, ok = _search(space)
        if not ok:
            if not allow_uncertified:
                raise UncertifiedRankError('Harder-Narasimhan search is not exhaustive for a quotient of rank %d' % space.lattice.rank_over_field,
                                           best_effort=HNFiltration(steps=tuple(steps), certified=False))
            certified = False
        k = len(rows)
        if cand is None or cand.slope <= slope(space.lattice) + SLOPE_TOLERANCE:
            rows = [[1 if i == j else 0 for j in range(dim)] for i in range(dim)]
        else:
            lifted = [[int(v) for v in (np.array(y, dtype=np.int64) @ completion[k:])] for y in cand.rows]
            rows = [list(r) for r in canonical_basis(rows + lifted)]
        steps.append(_step(lattice, rows))
    if not certified:
        logger.warning('Harder-Narasimhan filtration of rank %d is uncertified', lattice.rank_over_field)
    return HNFiltration(steps=tuple(steps), certified=certified)
