"""
Core Module - FRBE Numerical Laboratory

Special functions, spectral model, equation solution, scaling limits and
Monte Carlo components.
"""

from .errors import (
    FrbeError,
    DomainError,
    SingularityError,
    AccuracyError,
    RegimeError,
    ConfigError,
    Diagnostic,
)
from .specfun import (
    SpecialFunctionConfig,
    gamma_fn,
    erfc,
    mittag_leffler,
    mittag_leffler_bounds,
    bessel_k,
)
from .quadrature import QuadratureConfig
from .spectral_model import (
    SlowlyVaryingSpec,
    LongMemoryComponent,
    LongMemoryModel,
    c1,
    c2,
    theta,
    covariance_initial,
    spectral_density,
    spectral_density_rv,
    tail_asymptotic,
)
from .frbe import FrbeParams, SpaceTimePoint, FrbeField, dispersion, solution_kernel, solution_covariance
from .scaling_limits import (
    ScalingRegime,
    RescalingMap,
    make_rescaling,
    limit_constant_cyclic,
    limit_covariance_cyclic,
    limit_covariance_lrd,
    coupled_msd_cyclic,
    coupled_msd_lrd,
    coupled_msd_rv,
    certificate_sweep,
    limit_constant_lrd,
    variance_scaling_slope,
)
from .simulation import (
    McConfig,
    SpectralGrid,
    SpectralSimulator,
    RandomFieldSample,
    build_spectral_grid,
    sample_initial,
    sample_solution,
    sample_rescaled,
    empirical_covariance,
    mc_convergence_experiment,
)
from .scenarios import PresetCatalog, get_catalog

__all__ = [
    # Errors
    "FrbeError",
    "DomainError",
    "SingularityError",
    "AccuracyError",
    "RegimeError",
    "ConfigError",
    "Diagnostic",

    # Special functions
    "SpecialFunctionConfig",
    "gamma_fn",
    "erfc",
    "mittag_leffler",
    "mittag_leffler_bounds",
    "bessel_k",
    "QuadratureConfig",

    # Spectral model
    "SlowlyVaryingSpec",
    "LongMemoryComponent",
    "LongMemoryModel",
    "c1",
    "c2",
    "theta",
    "covariance_initial",
    "spectral_density",
    "spectral_density_rv",
    "tail_asymptotic",

    # Equation
    "FrbeParams",
    "SpaceTimePoint",
    "FrbeField",
    "dispersion",
    "solution_kernel",
    "solution_covariance",

    # Scaling limits
    "ScalingRegime",
    "RescalingMap",
    "make_rescaling",
    "limit_constant_cyclic",
    "limit_covariance_cyclic",
    "limit_covariance_lrd",
    "coupled_msd_cyclic",
    "coupled_msd_lrd",
    "coupled_msd_rv",
    "certificate_sweep",
    "limit_constant_lrd",
    "variance_scaling_slope",

    # Simulation modules
    "McConfig",
    "SpectralGrid",
    "SpectralSimulator",
    "RandomFieldSample",
    "build_spectral_grid",
    "sample_initial",
    "sample_solution",
    "sample_rescaled",
    "empirical_covariance",
    "mc_convergence_experiment",
    "PresetCatalog",
    "get_catalog",
]
