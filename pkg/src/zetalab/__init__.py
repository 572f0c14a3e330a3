"""Numerical laboratory for dynamical zeta functions.

Builds prime-orbit catalogs (suspended cat maps, Fuchsian surface
groups, synthetic ensembles), evaluates Smale and Gutzwiller-Voros zeta
functions and their Fredholm-determinant factorizations with explicit
truncation bounds, locates zeros and resonances, and cross-checks a
discretized Bargmann-transform model of the underlying transfer
operators. Everything is exposed three ways: this library, an HTTP
service (zetalab.service), and a command line (zetalab.cli).
"""

__version__ = "0.1.0"

from .errors import (
    ArgumentError,
    ConfidenceError,
    DimensionError,
    GeometryError,
    HyperbolicityError,
    IOFormatError,
    ModelError,
    SpecError,
    UnresolvedClusterError,
    ZetaLabError,
)
from .model import (
    OrbitCatalog,
    PrimeOrbit,
    SymplecticSplit,
    exterior_trace,
    grassmann_fiber_jacobian,
    hyperbolic_split,
    repetition_weight,
)
from .sources import (
    CatMapSuspensionSpec,
    FuchsianSpec,
    SyntheticSpec,
    catalog_from_descriptor,
    catmap_suspension_catalog,
    fuchsian_geodesic_catalog,
    synthetic_catalog,
)
from .zeta import (
    EvalPolicy,
    ZetaValue,
    constant_roof,
    fredholm_det,
    grassmann_fredholm_det,
    gv_cycle_polynomial,
    gv_zeta,
    gv_zeta_exponent,
    log_derivative,
    pressure_default,
    product_identity_check,
    smale_zeta,
    trace_moment,
)
from .zeros import (
    Rectangle,
    ResonanceSet,
    argument_principle_count,
    find_zeros,
    fit_resonances,
    resonances_from_moments,
    weyl_strip_count,
)

__all__ = [
    "__version__",
    "ZetaLabError",
    "SpecError",
    "DimensionError",
    "ArgumentError",
    "ModelError",
    "HyperbolicityError",
    "IOFormatError",
    "ConfidenceError",
    "GeometryError",
    "UnresolvedClusterError",
    "PrimeOrbit",
    "SymplecticSplit",
    "OrbitCatalog",
    "hyperbolic_split",
    "repetition_weight",
    "exterior_trace",
    "grassmann_fiber_jacobian",
    "CatMapSuspensionSpec",
    "FuchsianSpec",
    "SyntheticSpec",
    "catmap_suspension_catalog",
    "fuchsian_geodesic_catalog",
    "synthetic_catalog",
    "catalog_from_descriptor",
    "EvalPolicy",
    "ZetaValue",
    "smale_zeta",
    "gv_zeta",
    "gv_zeta_exponent",
    "fredholm_det",
    "grassmann_fredholm_det",
    "log_derivative",
    "trace_moment",
    "product_identity_check",
    "gv_cycle_polynomial",
    "constant_roof",
    "pressure_default",
    "Rectangle",
    "ResonanceSet",
    "argument_principle_count",
    "find_zeros",
    "fit_resonances",
    "resonances_from_moments",
    "weyl_strip_count",
]
