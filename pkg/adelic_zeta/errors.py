__all__ = [
    'AdelicZetaError',
    'FieldDataError',
    'InvariantViolationError',
    'LatticeDataError',
    'DegenerateLatticeError',
    'CapacityError',
    'UncertifiedRankError',
    'ModuleStructureError',
    'ChartDomainError',
    'UnsupportedModuliError',
    'ZetaDomainError',
    'PoleError',
    'CompatibilityError',
    'NonConvergenceError'
]

from typing import Any, Optional


class AdelicZetaError(Exception):
    """Base class of every error raised by this package. ``code`` is stable and machine readable"""
    code = 'error'

    def __init__(self, *args: Any, **kwargs: Any) -> None:
        Exception.__init__(self, *args, **kwargs)


class FieldDataError(AdelicZetaError):
    """Happens when a field file cannot be read or does not follow the field JSON schema"""
    code = 'field-parse'


class InvariantViolationError(FieldDataError):
    """
    Happens when a field file parses correctly but one of the checkable invariants does not hold.
    ``invariant`` names the failed check and ``residual`` is the measured defect
    """
    code = 'field-invariant'

    invariant: str
    residual: float

    def __init__(self, invariant: str, residual: float, msg: Optional[str] = None) -> None:
        self.invariant = invariant
        self.residual = residual
        if msg is None:
            msg = 'Field invariant "%s" violated (residual %.3e)' % (invariant, residual)
        FieldDataError.__init__(self, msg)


class LatticeDataError(AdelicZetaError):
    """Happens when a lattice file cannot be read or does not follow the lattice JSON schema"""
    code = 'lattice-parse'


class DegenerateLatticeError(AdelicZetaError):
    """Happens when a generator matrix is singular, not finite or does not match the field degree and rank"""
    code = 'degenerate-lattice'


class CapacityError(AdelicZetaError):
    """Happens when an enumeration would produce more lattice points than the configured ceiling"""
    code = 'capacity'

    count: float
    ceiling: int

    def __init__(self, count: float, ceiling: int) -> None:
        self.count = count
        self.ceiling = ceiling
        AdelicZetaError.__init__(self, 'Enumeration needs about %.3g points, ceiling is %d' % (count, ceiling))


class UncertifiedRankError(AdelicZetaError):
    """
    Happens when a stability question is asked for a rank where the sublattice search is not provably complete.
    The best-effort answer is attached as ``best_effort`` so callers may still inspect it
    """
    code = 'uncertified-rank'

    best_effort: Any

    def __init__(self, msg: str, best_effort: Any = None) -> None:
        self.best_effort = best_effort
        AdelicZetaError.__init__(self, msg)


class ModuleStructureError(AdelicZetaError):
    """Happens when module-lattice mode is requested on a lattice that is not stable under the ring of integers"""
    code = 'not-a-module'


class ChartDomainError(AdelicZetaError):
    """Happens when chart parameters fall outside the chart"""
    code = 'chart-domain'


class UnsupportedModuliError(AdelicZetaError):
    """Happens when no moduli chart exists for a (field, rank) pair or when the field lacks class group or unit data"""
    code = 'unsupported-moduli'


class ZetaDomainError(AdelicZetaError):
    """Happens when the defining integral is requested outside its half-plane of convergence"""
    code = 'zeta-domain'


class PoleError(AdelicZetaError):
    """Happens when the continued zeta function is evaluated at one of its poles"""
    code = 'pole'


class CompatibilityError(AdelicZetaError):
    """Happens when the exponent pair of the subtracted term does not match the pair of the theta term. No continuation exists then"""
    code = 'incompatible'


class NonConvergenceError(AdelicZetaError):
    """Happens when a quadrature exhausts its panel budget before reaching the requested tolerance"""
    code = 'non-convergence'

    value: Any
    err: float

    def __init__(self, msg: str, value: Any = None, err: float = float('inf')) -> None:
        self.value = value
        self.err = err
        AdelicZetaError.__init__(self, msg)
