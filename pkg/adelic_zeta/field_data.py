__all__ = [
    'Place',
    'NumberFieldData',
    'load_field',
    'field_from_dict',
    'builtin_field',
    'rationals',
    'BUILTIN_FIELDS'
]

import os
import json
import math
import logging
import functools
from dataclasses import dataclass, field as dc_field

import numpy as np
import numpy.typing as npt

from adelic_zeta.errors import FieldDataError, InvariantViolationError
from adelic_zeta.tools import LOGGER_NAME, parse_decimal, parse_matrix

from typing import Any, Dict, List, Optional, Tuple

FloatArray = npt.NDArray[np.float64]

VALIDATION_TOLERANCE = 1e-10
INTEGRALITY_TOLERANCE = 1e-8

_FIELDS_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'fields')

BUILTIN_FIELDS: Dict[str, str] = {
    'Q': 'q.json',
    'Q(i)': 'qi.json',
    'Q(sqrt5)': 'q_sqrt5.json',
    'Q(sqrt2)': 'q_sqrt2.json',
    'Q(sqrt-3)': 'q_sqrt_m3.json',
}

logger = logging.getLogger(LOGGER_NAME)


@dataclass(frozen=True)
class Place:
    """An archimedean place and the weighted Minkowski coordinates it owns"""
    __slots__ = ('index', 'is_complex', 'coords')

    index: int
    is_complex: bool
    coords: Tuple[int, ...]

    @property
    def local_degree(self) -> int:
        return 2 if self.is_complex else 1


@dataclass(frozen=True, eq=False)
class NumberFieldData:
    """
    Declared arithmetic context of a number field F.

    Coordinates follow the weighted Minkowski convention: the first ``r1`` coordinates are the real embeddings,
    then each complex place contributes ``(sqrt(2) Re, sqrt(2) Im)``, so the Euclidean norm is
    ``sum_real |x|^2 + 2 sum_complex |z|^2``.

    Instances are immutable and are shared freely between lattices and evaluators.
    """
    degree: int
    r1: int
    r2: int
    discriminant: int
    basis_embedding: FloatArray
    inv_different_embedding: FloatArray
    roots_of_unity: int
    class_reps: Tuple[FloatArray, ...] = ()
    regulator: Optional[float] = None
    fundamental_units: Tuple[FloatArray, ...] = ()
    name: str = dc_field(default='')

    @property
    def signature(self) -> Tuple[int, int]:
        return (self.r1, self.r2)

    @property
    def unit_rank(self) -> int:
        return self.r1 + self.r2 - 1

    @property
    def log_abs_discriminant(self) -> float:
        return math.log(abs(self.discriminant))

    @property
    def is_rationals(self) -> bool:
        return self.degree == 1

    @property
    def class_number(self) -> Optional[int]:
        if len(self.class_reps) == 0:
            return None
        return len(self.class_reps)

    @property
    def effective_regulator(self) -> Optional[float]:
        """The regulator, which is 1 by convention when the unit rank is 0"""
        if self.unit_rank == 0:
            return 1.0 if self.regulator is None else self.regulator
        return self.regulator

    def places(self) -> List[Place]:
        out = []
        for i in range(self.r1):
            out.append(Place(index=i, is_complex=False, coords=(i,)))
        for j in range(self.r2):
            k = self.r1 + 2 * j
            out.append(Place(index=self.r1 + j, is_complex=True, coords=(k, k + 1)))
        return out

    def place_abs(self, coords: FloatArray) -> FloatArray:
        """|sigma(x)| at every place, for a single weighted coordinate vector"""
        out = np.empty(self.r1 + self.r2, dtype=np.float64)
        for p in self.places():
            if p.is_complex:
                a, b = coords[p.coords[0]], coords[p.coords[1]]
                out[p.index] = math.hypot(a, b) / math.sqrt(2.0)
            else:
                out[p.index] = abs(coords[p.coords[0]])
        return out

    def multiplication_matrix(self, coords: FloatArray) -> FloatArray:
        """
        Matrix M with ``coords(alpha * beta) = coords(beta) @ M`` where ``coords`` gives the weighted coordinates of alpha.
        """
        n = self.degree
        m = np.zeros((n, n), dtype=np.float64)
        for p in self.places():
            if p.is_complex:
                k0, k1 = p.coords
                re = coords[k0] / math.sqrt(2.0)
                im = coords[k1] / math.sqrt(2.0)
                m[k0, k0] = re
                m[k0, k1] = im
                m[k1, k0] = -im
                m[k1, k1] = re
            else:
                k = p.coords[0]
                m[k, k] = coords[k]
        return m

    def trace_form(self) -> FloatArray:
        """Gram matrix Tr(w_i w_j) of the integral basis"""
        signs = np.ones(self.degree, dtype=np.float64)
        for p in self.places():
            if p.is_complex:
                signs[p.coords[1]] = -1.0
        b = self.basis_embedding
        return np.asarray((b * signs) @ b.T, dtype=np.float64)

    def unit_log_matrix(self) -> FloatArray:
        """Row j holds log|sigma(eps_j)| at every place"""
        rows = [np.log(self.place_abs(u)) for u in self.fundamental_units]
        return np.array(rows, dtype=np.float64).reshape(len(rows), self.r1 + self.r2)

    def local_degrees(self) -> FloatArray:
        return np.array([p.local_degree for p in self.places()], dtype=np.float64)

    def __repr__(self) -> str:
        return '<%s %s n=%d (r1=%d, r2=%d) disc=%d>' % (self.__class__.__name__, self.name or '?', self.degree, self.r1, self.r2, self.discriminant)


def _require_int(data: Dict[str, Any], key: str) -> int:
    if key not in data:
        raise FieldDataError('Missing key "%s"' % key)
    val = data[key]
    if isinstance(val, bool) or not isinstance(val, int):
        raise FieldDataError('"%s" must be an integer' % key)
    return val


def _integer_defect(m: FloatArray) -> float:
    return float(np.max(np.abs(m - np.round(m)))) if m.size > 0 else 0.0


def _check_invariants(f: NumberFieldData) -> None:
    sqrt_disc = math.sqrt(abs(f.discriminant))
    covol = abs(float(np.linalg.det(f.basis_embedding)))
    residual = abs(covol - sqrt_disc) / sqrt_disc
    if residual > VALIDATION_TOLERANCE:
        raise InvariantViolationError('covolume', residual, '|det(basis_embedding)| = %.12g does not match sqrt|disc| = %.12g (relative residual %.3e)' % (covol, sqrt_disc, residual))

    expected_sign = -1 if f.r2 % 2 == 1 else 1
    if (f.discriminant > 0) != (expected_sign > 0):
        raise InvariantViolationError('discriminant-sign', 1.0, 'Discriminant sign must be (-1)^r2')

    trace_dual = np.linalg.solve(f.trace_form(), f.basis_embedding)
    transition = f.inv_different_embedding @ np.linalg.inv(trace_dual)
    defect = _integer_defect(transition)
    det = abs(float(np.linalg.det(np.round(transition)))) if defect <= INTEGRALITY_TOLERANCE else 0.0
    if defect > INTEGRALITY_TOLERANCE or abs(det - 1.0) > 0.5:
        raise InvariantViolationError('trace-dual', max(defect, abs(det - 1.0)), 'inv_different_embedding does not span the trace-form dual of the integral basis')

    if f.roots_of_unity < 2 or f.roots_of_unity % 2 != 0:
        raise InvariantViolationError('roots-of-unity', float(f.roots_of_unity), 'roots_of_unity must be an even integer >= 2')

    basis_inv = np.linalg.inv(f.basis_embedding)
    for i, rep in enumerate(f.class_reps):
        coeffs = rep @ basis_inv
        defect = _integer_defect(coeffs)
        if defect > INTEGRALITY_TOLERANCE:
            raise InvariantViolationError('class-rep-integral', defect, 'class_reps[%d] is not an integral ideal' % i)
        norm = abs(float(np.linalg.det(np.round(coeffs))))
        if norm < 0.5:
            raise InvariantViolationError('class-rep-integral', 1.0, 'class_reps[%d] is singular' % i)
        if i == 0 and abs(norm - 1.0) > 0.5:
            raise InvariantViolationError('identity-class', abs(norm - 1.0), 'class_reps[0] must span the ring of integers')

    if f.regulator is not None and not f.regulator > 0:
        raise InvariantViolationError('regulator', f.regulator, 'regulator must be positive')

    if len(f.fundamental_units) > 0:
        if len(f.fundamental_units) != f.unit_rank:
            raise InvariantViolationError('unit-count', float(abs(len(f.fundamental_units) - f.unit_rank)), 'Expected %d fundamental units, got %d' % (f.unit_rank, len(f.fundamental_units)))
        for j, u in enumerate(f.fundamental_units):
            defect = _integer_defect(u @ basis_inv)
            if defect > INTEGRALITY_TOLERANCE:
                raise InvariantViolationError('unit-integral', defect, 'fundamental_units[%d] is not an algebraic integer' % j)
        logs = f.unit_log_matrix()
        norms = logs @ f.local_degrees()
        if float(np.max(np.abs(norms))) > INTEGRALITY_TOLERANCE:
            raise InvariantViolationError('unit-norm', float(np.max(np.abs(norms))), 'fundamental units must have norm +-1')
        if f.regulator is not None:
            computed = abs(float(np.linalg.det((logs * f.local_degrees())[:, :-1])))
            residual = abs(computed - f.regulator) / f.regulator
            if residual > INTEGRALITY_TOLERANCE:
                raise InvariantViolationError('regulator', residual, 'regulator %.12g does not match the fundamental units (%.12g)' % (f.regulator, computed))


def field_from_dict(data: Any, name: str = '') -> NumberFieldData:
    """
    Builds and validates a :class:`NumberFieldData` from the decoded field JSON document.

    :raises FieldDataError: On schema violation
    :raises InvariantViolationError: When a checkable invariant fails. ``invariant`` names it
    """
    if not isinstance(data, dict):
        raise FieldDataError('Field document must be a JSON object')

    degree = _require_int(data, 'degree')
    r1 = _require_int(data, 'r1')
    r2 = _require_int(data, 'r2')
    discriminant = _require_int(data, 'discriminant')
    roots = _require_int(data, 'roots_of_unity')

    if degree < 1:
        raise FieldDataError('degree must be positive')
    if r1 < 0 or r2 < 0:
        raise FieldDataError('r1 and r2 must be non-negative')
    if r1 + 2 * r2 != degree:
        raise InvariantViolationError('signature', float(abs(r1 + 2 * r2 - degree)), 'r1 + 2*r2 = %d does not match degree %d' % (r1 + 2 * r2, degree))
    if discriminant == 0:
        raise FieldDataError('discriminant must be nonzero')

    try:
        basis = parse_matrix(data.get('basis_embedding'), 'basis_embedding', degree, degree)
        inv_diff = parse_matrix(data.get('inv_different_embedding'), 'inv_different_embedding', degree, degree)
        class_reps: List[FloatArray] = []
        for i, rep in enumerate(data.get('class_reps') or []):
            class_reps.append(parse_matrix(rep, 'class_reps[%d]' % i, degree, degree))
        units: List[FloatArray] = []
        for i, u in enumerate(data.get('fundamental_units') or []):
            if not isinstance(u, list) or len(u) != degree:
                raise ValueError('fundamental_units[%d] must be a vector of length %d' % (i, degree))
            units.append(np.array([parse_decimal(x, 'fundamental_units[%d]' % i) for x in u], dtype=np.float64))
        regulator = None
        if data.get('regulator') is not None:
            regulator = parse_decimal(data['regulator'], 'regulator')
    except ValueError as e:
        raise FieldDataError(str(e))

    if degree == 1 and len(class_reps) == 0:
        class_reps = [basis.copy()]

    for arr in [basis, inv_diff] + class_reps + units:
        arr.setflags(write=False)

    f = NumberFieldData(
        degree=degree,
        r1=r1,
        r2=r2,
        discriminant=discriminant,
        basis_embedding=basis,
        inv_different_embedding=inv_diff,
        roots_of_unity=roots,
        class_reps=tuple(class_reps),
        regulator=regulator,
        fundamental_units=tuple(units),
        name=name
    )
    _check_invariants(f)
    return f


def load_field(path: str, name: Optional[str] = None) -> NumberFieldData:
    """
    Loads a field file (see the field JSON schema) and checks every invariant that can be checked.

    :param path: Path to a UTF-8 JSON file
    :raises FieldDataError: If the file cannot be read or parsed
    :raises InvariantViolationError: If an invariant fails
    """
    try:
        with open(path, 'r', encoding='utf-8') as fh:
            data = json.load(fh)
    except (OSError, ValueError) as e:
        raise FieldDataError('Cannot read field file %s: %s' % (path, e))
    if name is None:
        name = os.path.splitext(os.path.basename(path))[0]
    f = field_from_dict(data, name=name)
    logger.debug('Loaded field %s from %s', f, path)
    return f


@functools.lru_cache(maxsize=None)
def builtin_field(name: str) -> NumberFieldData:
    """One of the shipped fields: ``Q``, ``Q(i)``, ``Q(sqrt5)``, ``Q(sqrt2)``, ``Q(sqrt-3)``. Loaded once per name"""
    if name not in BUILTIN_FIELDS:
        raise FieldDataError('Unknown builtin field %r. Known: %s' % (name, ', '.join(BUILTIN_FIELDS)))
    return load_field(os.path.join(_FIELDS_DIR, BUILTIN_FIELDS[name]), name=name)


def rationals() -> NumberFieldData:
    """The field Q"""
    return builtin_field('Q')
