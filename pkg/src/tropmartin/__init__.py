"""Max-plus Martin boundary toolkit.

Finite kernels: closures, spectral data, Martin kernels and representing
measures.  Infinite kernels: rule-generated balls and boundary estimates.
Continuous space: Busemann points of polyhedral norms and the Lax-Oleinik
semigroup.
"""
from .core import (
    ONE,
    ZERO,
    DimensionMismatch,
    DivergentClosure,
    TropicalError,
    TropicalMatrix,
    TropicalVector,
    kleene_plus,
    kleene_star,
    mat_mul,
    mat_vec,
    oplus,
    otimes,
    tensor_product,
    tensor_sum,
    vec_mat,
)
from .martin import (
    MartinData,
    PiSpec,
    RepresentingMeasure,
    decompose_harmonic,
    is_extremal,
    is_harmonic,
    is_superharmonic,
    martin_data,
    minimal_martin_finite,
    mu,
    reconstruct,
    validate_pi,
)
from .spectral import SpectralData, check_rho_bound, max_circuit_mean, spectral_data

__version__ = "0.1.0"
