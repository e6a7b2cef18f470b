"""
FRBE Solution Module

Fractional Riesz-Bessel equation driven by a long-memory Gaussian initial
condition, solved through its spectral representation.

Features:
- Dispersion symbol mu |lam|^alpha (1 + lam^2)^(gamma/2)
- Mittag-Leffler solution kernel
- Exact space-time covariance of the solution field by quadrature
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from .errors import DomainError
from .quadrature import DEFAULT_QUADRATURE, QuadratureConfig, integrate_piecewise, kernel_breaks
from .specfun import DEFAULT_CONFIG, SpecialFunctionConfig, mittag_leffler
from .spectral_model import LongMemoryModel, spectral_cutoff, spectral_density

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FrbeParams:
    """Equation parameters: Riesz order alpha, Bessel order gamma, time order beta, diffusivity mu."""
    alpha: float = 1.0
    gamma: float = 1.0
    beta: float = 0.5
    mu: float = 1.0

    def __post_init__(self):
        if not self.alpha >= 0:
            raise DomainError(f"alpha must be non-negative, got {self.alpha}")
        if not self.gamma > 0:
            raise DomainError(f"gamma must be positive, got {self.gamma}")
        if not 0.0 < self.beta <= 1.0:
            raise DomainError(f"beta must lie in (0, 1], got {self.beta}")
        if not self.mu > 0:
            raise DomainError(f"mu must be positive, got {self.mu}")

    def kernel_scale(self, t: float) -> float:
        """Frequency at which the dispersion times t^beta reaches one (ignoring gamma)."""
        if self.alpha == 0:
            return math.inf
        return (self.mu * t ** self.beta) ** (-1.0 / self.alpha)


@dataclass(frozen=True)
class SpaceTimePoint:
    """Evaluation point (t, x) with t > 0."""
    t: float
    x: float

    def __post_init__(self):
        if not self.t > 0:
            raise DomainError(f"time must be positive, got {self.t}")


def dispersion(params: FrbeParams, lam):
    """mu |lam|^alpha (1 + lam^2)^(gamma/2)."""
    arr = np.asarray(lam, dtype=float)
    values = params.mu * np.abs(arr) ** params.alpha * (1.0 + arr ** 2) ** (params.gamma / 2.0)
    return float(values) if arr.ndim == 0 else values


def solution_kernel(
    params: FrbeParams,
    t: float,
    lam,
    config: SpecialFunctionConfig = DEFAULT_CONFIG,
):
    """
    E_beta(-dispersion(lam) t^beta), the Fourier multiplier of the solution.

    Args:
        params: Equation parameters
        t: Positive time
        lam: Frequency or array of frequencies
        config: Special-function accuracy

    Returns:
        Kernel value(s) in (0, 1]
    """
    if not t > 0:
        raise DomainError(f"time must be positive, got {t}")
    return mittag_leffler(params.beta, -dispersion(params, lam) * t ** params.beta, config)


def solution_covariance(
    params: FrbeParams,
    model: LongMemoryModel,
    t: float,
    t2: float,
    x: float,
    x2: float,
    config: QuadratureConfig = DEFAULT_QUADRATURE,
    sf_config: SpecialFunctionConfig = DEFAULT_CONFIG,
) -> float:
    """
    Cov(u(t, x), u(t2, x2)) = 2 int_0^inf cos(lam h) K(t, lam) K(t2, lam) f(lam) dlam.

    The range is truncated at the spectral cutoff for ``config.tail_mass``
    (the kernels are bounded by one). The lag enters as h = |x - x2|.

    Raises:
        AccuracyError: quadrature did not converge
    """
    for value in (t, t2):
        if not value > 0:
            raise DomainError(f"time must be positive, got {value}")
    lag = abs(x - x2)
    cutoff = spectral_cutoff(model, config.tail_mass)

    def integrand(lam: float) -> float:
        return (solution_kernel(params, t, lam, sf_config)
                * solution_kernel(params, t2, lam, sf_config)
                * spectral_density(model, lam))

    breaks = kernel_breaks((params.kernel_scale(t), params.kernel_scale(t2)), cutoff)
    result = integrate_piecewise(integrand, 0.0, cutoff, config,
                                 model.singular_points(), breaks, omega=lag)
    logger.debug("solution covariance t=%g t2=%g h=%g: %.12g (err %.2g)",
                 t, t2, lag, 2.0 * result.value, 2.0 * result.abserr)
    return 2.0 * result.value


@dataclass
class FrbeField:
    """
    Solution field of one equation/model pair.

    Bundles the inputs of solution_covariance for repeated evaluation.
    """
    params: FrbeParams
    model: LongMemoryModel
    config: QuadratureConfig = field(default_factory=QuadratureConfig)

    def covariance(self, p: SpaceTimePoint, q: SpaceTimePoint) -> float:
        return solution_covariance(self.params, self.model, p.t, q.t, p.x, q.x, self.config)

    def variance(self, p: SpaceTimePoint) -> float:
        return self.covariance(p, p)

    def covariance_matrix(self, points: Sequence[SpaceTimePoint]) -> np.ndarray:
        """Symmetric covariance matrix over ``points``."""
        n = len(points)
        matrix = np.empty((n, n))
        for i in range(n):
            for j in range(i, n):
                matrix[i, j] = matrix[j, i] = self.covariance(points[i], points[j])
        return matrix

    def variance_curve(self, times: List[float], x: float = 0.0) -> np.ndarray:
        """Var u(T, x) for each T in ``times``."""
        return np.array([self.variance(SpaceTimePoint(t, x)) for t in times])
