"""Mean measures of families of orthogonal polynomials under summation methods."""

from __future__ import annotations

from .equilibrium import (
    addition_formula_residual,
    affine_transfer,
    arcsine_measure,
    gegenbauer_equilibrium,
    ks_distance,
    sigma_closed_form,
    uniform_measure,
)
from .errors import (
    ConfigurationError,
    DomainError,
    InternalConsistencyError,
    NumericError,
    OrthomeanError,
    RegularityError,
    ValidationError,
)
from .families import (
    CoefficientTable,
    FamilySpec,
    constant_family,
    jacobi_shift_family,
    stieltjes_coefficients,
    ultraspherical_family,
)
from .means import (
    equilibrium_moment_from_sigma,
    lambda_moments,
    mu_bar_moments,
    path_enumeration_moment,
    root_sample,
    sigma_partial,
    simon_gap,
)
from .spectral import eigen_roots, gauss_rule, jacobi_matrix, local_moment, local_moments
from .summation import (
    arithmetic_mean,
    cesaro,
    gegenbauer,
    identity_method,
    legendre_method,
    norlund_from_sigma,
    regularity_check,
    riesz_derived,
)

__version__ = "0.1.0"
