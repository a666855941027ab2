__all__ = ['CohomologyResidual', 'CohomologyCounts', 'h0', 'h1', 'rr_residual', 'serre_residual', 'counts']

import math
from dataclasses import dataclass

from adelic_zeta.lattice import MetrizedLattice, ThetaValue

DEFAULT_TOL = 1e-14
_EPS = 2.0**-52


@dataclass(frozen=True)
class CohomologyResidual:
    """A residual that should vanish, with the bound its magnitude is guaranteed to stay under"""
    __slots__ = ('value', 'bound')

    value: float
    bound: float

    def within_bound(self) -> bool:
        return abs(self.value) <= self.bound

    def __float__(self) -> float:
        return self.value

    def to_dict(self) -> dict:
        return {'residual': self.value, 'bound': self.bound}


@dataclass(frozen=True)
class CohomologyCounts:
    __slots__ = ('h0', 'h1', 'degree', 'rr_rhs', 'theta', 'dual_theta')

    h0: float
    h1: float
    degree: float
    rr_rhs: float
    theta: ThetaValue
    dual_theta: ThetaValue

    def to_dict(self) -> dict:
        return {'h0': self.h0, 'h1': self.h1, 'degree': self.degree, 'rr_rhs': self.rr_rhs}


def _h_from_theta(t: ThetaValue) -> float:
    return math.log1p(t.excess)


def _rounding_allowance(t: ThetaValue, lattice: MetrizedLattice) -> float:
    # relative rounding of exp(-pi |v|^2) grows with pi R^2 and the dimension
    return 8.0 * _EPS * (math.pi * t.radius * t.radius + lattice.dimension + 1.0) * lattice.dimension


def h0(lattice: MetrizedLattice, tol: float = DEFAULT_TOL) -> float:
    """log of the theta value. Never negative"""
    return _h_from_theta(lattice.theta(tol))


def h1(lattice: MetrizedLattice, tol: float = DEFAULT_TOL) -> float:
    """h0 of the dual lattice"""
    return _h_from_theta(lattice.dual().theta(tol))


def counts(lattice: MetrizedLattice, tol: float = DEFAULT_TOL) -> CohomologyCounts:
    """h0, h1 and both sides of Riemann-Roch in one pass"""
    t0 = lattice.theta(tol)
    t1 = lattice.dual().theta(tol)
    deg = lattice.degree()
    rhs = deg - 0.5 * lattice.rank_over_field * lattice.field.log_abs_discriminant
    return CohomologyCounts(h0=_h_from_theta(t0), h1=_h_from_theta(t1), degree=deg, rr_rhs=rhs, theta=t0, dual_theta=t1)


def rr_residual(lattice: MetrizedLattice, tol: float = DEFAULT_TOL) -> CohomologyResidual:
    """
    ``(h0 - h1) - (degree - (r/2) log|disc|)``, which reduces to ``h0 - h1 + log covolume``.
    The bound covers both theta tails and floating point rounding.
    """
    t0 = lattice.theta(tol)
    t1 = lattice.dual().theta(tol)
    value = (_h_from_theta(t0) - _h_from_theta(t1)) + lattice.log_covolume
    bound = t0.tail_bound / t0.value + t1.tail_bound / t1.value
    bound += _rounding_allowance(t0, lattice) + _rounding_allowance(t1, lattice) + 8.0 * _EPS * (abs(lattice.log_covolume) + 1.0)
    return CohomologyResidual(value=value, bound=bound)


def serre_residual(lattice: MetrizedLattice, tol: float = DEFAULT_TOL) -> CohomologyResidual:
    """
    Multiplicative form: ``e^h0 - e^h1 * N(L) * |disc|^(-r/2)`` with ``N(L) = e^degree``,
    i.e. ``theta(L) - theta(dual L) / covolume``.
    """
    t0 = lattice.theta(tol)
    t1 = lattice.dual().theta(tol)
    inv_covolume = math.exp(-lattice.log_covolume)
    scaled = t1.excess * inv_covolume
    value = (t0.excess - scaled) + (1.0 - inv_covolume)
    bound = t0.tail_bound + t1.tail_bound * inv_covolume
    bound += _rounding_allowance(t0, lattice) * t0.value + _rounding_allowance(t1, lattice) * t1.value * inv_covolume
    bound += 8.0 * _EPS * (abs(lattice.log_covolume) + 1.0) * t1.value * inv_covolume
    return CohomologyResidual(value=value, bound=bound)
