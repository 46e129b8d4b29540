"""Composite cosine transform on Stiefel manifolds."""

from .cone_core import (
    ConeExponent,
    PosDefMatrix,
    as_exponent,
    composite_power,
    principal_minors,
    star_involution,
    triangular_character,
)
from .cone_gamma import DomainReport, classify, gamma_omega, laplace_transform_mc, siegel_gamma
from .cosine import (
    IntegrandSpec,
    avg_closed_form,
    avg_projection_volume,
    cosine_mc,
    eigen_constant,
    eigen_residual,
    funk_hecke_eigenvalue,
    multiplier,
)
from .errors import (
    ConditioningError,
    ConeCosineError,
    DimensionError,
    DomainError,
    PoleError,
    RankError,
    SamplingError,
)
from .hpoly import HPolynomial, make_isotropic, numeric_laplacian
from .mc import McEstimate, RngStream
from .stiefel import (
    StiefelFrame,
    orthocomplement,
    polar_decompose,
    projection_volume,
    sample_haar,
    stiefel_mass,
    triangular_decompose,
)
from .zeta import (
    GaussianTestFunction,
    functional_equation_check,
    hecke_check,
    normalized_zeta,
    zeta_gaussian_closed_form,
    zeta_mc,
    zeta_star_mc,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
