_major_version_ = 1

__all__ = [
    'NumberFieldData',
    'Place',
    'load_field',
    'builtin_field',
    'rationals',
    'MetrizedLattice',
    'ThetaValue',
    'Enumeration',
    'adelic_lattice',
    'standard_lattice',
    'kappa_lattice',
    'load_lattice',
    'CohomologyResidual',
    'CohomologyCounts',
    'h0',
    'h1',
    'rr_residual',
    'serre_residual',
    'SubLattice',
    'StabilityVerdict',
    'HNFiltration',
    'slope',
    'max_slope_sub',
    'is_semistable',
    'is_stable',
    'hn_filtration',
    'QuadratureSpec',
    'ModuliChart',
    'build_chart',
    'chart_to_lattice',
    'fundamental_domain_lattice',
    'moduli_volume',
    'degree_slice_iter',
    'ZetaSpec',
    'ZetaPoint',
    'ZetaFunction',
    'Method',
    'Residues',
    'FEScan',
    'zeta_direct',
    'zeta_continued',
    'I_integral',
    'residues',
    'fe_scan',

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

from adelic_zeta.errors import *
from adelic_zeta.field_data import NumberFieldData, Place, load_field, builtin_field, rationals
from adelic_zeta.lattice import MetrizedLattice, ThetaValue, Enumeration, adelic_lattice, standard_lattice, kappa_lattice, load_lattice
from adelic_zeta.cohomology import CohomologyResidual, CohomologyCounts, h0, h1, rr_residual, serre_residual
from adelic_zeta.stability import SubLattice, StabilityVerdict, HNFiltration, slope, max_slope_sub, is_semistable, is_stable, hn_filtration
from adelic_zeta.moduli import QuadratureSpec, ModuliChart, build_chart, chart_to_lattice, fundamental_domain_lattice, moduli_volume, degree_slice_iter
from adelic_zeta.zeta import ZetaSpec, ZetaPoint, ZetaFunction, Method, Residues, FEScan, zeta_direct, zeta_continued, I_integral, residues, fe_scan
