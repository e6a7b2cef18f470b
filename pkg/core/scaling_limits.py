"""
Scaling Limits Module

Rescaled solution fields and their Gaussian limits as executable objects.

Features:
- Scaling regimes (cyclic, long memory, long memory with slowly varying
  spectrum) with hypothesis checks
- Rescaling maps for time, space, amplitude and slowly varying normalizer
- Limit constants and limit covariance integrals
- Coupled mean-square distances between rescaled and limit fields, used as
  deterministic convergence certificates
- Variance-scaling slope of the long-memory solution
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import special

from .errors import AccuracyError, DomainError, RegimeError
from .frbe import FrbeParams, SpaceTimePoint, solution_covariance, solution_kernel
from .quadrature import (
    DEFAULT_QUADRATURE,
    QuadratureConfig,
    Singularity,
    integrate_half_line,
    kernel_breaks,
)
from .specfun import DEFAULT_CONFIG, SpecialFunctionConfig, mittag_leffler
from .spectral_model import (
    LongMemoryModel,
    SlowlyVaryingSpec,
    c1,
    c2,
    spectral_cutoff,
    spectral_density,
    spectral_density_rv,
)

logger = logging.getLogger(__name__)

DEFAULT_EPS_GRID = (1e-1, 1e-2, 1e-3, 1e-4)


class ScalingRegime(Enum):
    """Which limit theorem applies."""
    CYCLIC = "cyclic"
    LONG_MEMORY = "long_memory"
    LONG_MEMORY_RV = "long_memory_rv"

    @classmethod
    def infer(cls, model: LongMemoryModel) -> "ScalingRegime":
        """Regime suggested by the model alone."""
        if model.a0 == 0.0:
            return cls.CYCLIC
        if model.slowly_varying is not None and not all(s.is_constant for s in model.slowly_varying):
            return cls.LONG_MEMORY_RV
        return cls.LONG_MEMORY


@dataclass(frozen=True)
class RescalingMap:
    """
    U_eps(t, x) = field_scale * u(t * time_scale, x * space_scale).

    field_scale = amplitude / sqrt(rv_normalizer); the normalizer is
    L_0(eps^(-beta/alpha)) in the slowly varying regime and 1 otherwise.
    """
    regime: ScalingRegime
    eps: float
    beta: float
    alpha: float
    time_scale: float
    space_scale: float
    amplitude: float
    rv_normalizer: float = 1.0

    @property
    def freq_scale(self) -> float:
        """eps^(beta/alpha): the rescaled frequency is lam / freq_scale."""
        return 1.0 / self.space_scale

    @property
    def field_scale(self) -> float:
        return self.amplitude / math.sqrt(self.rv_normalizer)

    @property
    def variance_scale(self) -> float:
        """Multiplier of f(lam * freq_scale) in the rescaled spectral density."""
        return self.field_scale ** 2 * self.freq_scale

    def rescale_point(self, point: SpaceTimePoint) -> SpaceTimePoint:
        return SpaceTimePoint(point.t * self.time_scale, point.x * self.space_scale)


def _coerce_regime(regime) -> ScalingRegime:
    if isinstance(regime, ScalingRegime):
        return regime
    try:
        return ScalingRegime(regime)
    except ValueError:
        kinds = ", ".join(r.value for r in ScalingRegime)
        raise DomainError(f"Unknown scaling regime: {regime} (one of {kinds})")


def check_regime(regime, params: FrbeParams, model: LongMemoryModel) -> ScalingRegime:
    """
    Validate the hypotheses of the regime's limit theorem.

    Raises:
        RegimeError: naming the violated hypothesis
    """
    regime = _coerce_regime(regime)
    if regime is ScalingRegime.CYCLIC:
        source = "hypothesis of the cyclic scaling limit"
        if model.a0 != 0.0:
            raise RegimeError(f"A0 = 0 is required, {source} (got A0 = {model.a0:g})")
        if not params.alpha > 0.5:
            raise RegimeError(f"alpha must exceed 1/2, {source} (got alpha = {params.alpha:g})")
    else:
        source = "hypothesis of the long-memory scaling limit"
        if not model.a0 > 0.0:
            raise RegimeError(f"A0 > 0 is required, {source}")
        if not params.alpha > model.kappa0 / 2.0:
            raise RegimeError(
                f"alpha must exceed kappa0/2 = {model.kappa0 / 2.0:g}, {source} (got alpha = {params.alpha:g})"
            )
    return regime


def _resolve_specs(model: LongMemoryModel, L: Optional[Sequence[SlowlyVaryingSpec]]):
    specs = L if L is not None else model.slowly_varying
    if specs is None:
        return tuple(SlowlyVaryingSpec.constant() for _ in model.components)
    if len(specs) != len(model.components):
        raise DomainError(
            f"need one slowly varying spec per component ({len(model.components)}), got {len(specs)}"
        )
    return tuple(specs)


def make_rescaling(
    regime,
    params: FrbeParams,
    model: LongMemoryModel,
    eps: float,
    L: Optional[Sequence[SlowlyVaryingSpec]] = None,
) -> RescalingMap:
    """
    Rescaling map of the regime at scale eps.

    Args:
        regime: ScalingRegime or its name
        params: Equation parameters
        model: Initial-condition model
        eps: Scale parameter in (0, 1]; eps = 1 is the identity map
        L: Slowly varying specs per component (long_memory_rv only)

    Returns:
        RescalingMap
    """
    regime = check_regime(regime, params, model)
    if not 0.0 < eps <= 1.0:
        raise DomainError(f"eps must lie in (0, 1], got {eps}")
    ratio = params.beta / params.alpha
    space_scale = eps ** (-ratio)
    if regime is ScalingRegime.CYCLIC:
        amplitude = eps ** (-ratio / 2.0)
    else:
        amplitude = eps ** (-model.kappa0 * ratio / 2.0)
    normalizer = 1.0
    if regime is ScalingRegime.LONG_MEMORY_RV:
        normalizer = float(_resolve_specs(model, L)[0](space_scale))
    return RescalingMap(regime, eps, params.beta, params.alpha,
                        time_scale=1.0 / eps, space_scale=space_scale,
                        amplitude=amplitude, rv_normalizer=normalizer)


# =============================================================================
# LIMIT CONSTANTS AND COVARIANCES
# =============================================================================

def limit_constant_cyclic(model: LongMemoryModel) -> float:
    """sum_{j>=1} c1(kappa_j) A_j K_{(kappa_j-1)/2}(w_j) w_j^{(kappa_j-1)/2}; equals f(0)."""
    if model.a0 != 0.0:
        raise RegimeError(f"the cyclic limit constant requires A0 = 0, got A0 = {model.a0:g}")
    total = 0.0
    for comp in model.components[1:]:
        nu = (comp.kappa - 1.0) / 2.0
        total += c1(comp.kappa) * comp.amplitude * special.kv(nu, comp.frequency) * comp.frequency ** nu
    return total


def limit_constant_lrd(model: LongMemoryModel) -> float:
    """A0 c2(kappa0) / 2: the limit spectral density is this times |lam|^(kappa0 - 1)."""
    if not model.a0 > 0.0:
        raise RegimeError("the long-memory limit constant requires A0 > 0")
    return 0.5 * model.a0 * c2(model.kappa0, zero_freq=True)


def limit_kernel(params: FrbeParams, t: float, lam, config: SpecialFunctionConfig = DEFAULT_CONFIG):
    """E_beta(-mu t^beta |lam|^alpha): the solution kernel without the Bessel factor."""
    arr = np.asarray(lam, dtype=float)
    return mittag_leffler(params.beta, -params.mu * t ** params.beta * np.abs(arr) ** params.alpha, config)


def _limit_integral(
    params: FrbeParams,
    t: float,
    t2: float,
    lag: float,
    kappa: Optional[float],
    config: QuadratureConfig,
) -> float:
    """int_0^inf cos(lam h) lam^(kappa-1) K0(t, lam) K0(t2, lam) dlam (weight 1 if kappa is None)."""
    for value in (t, t2):
        if not value > 0:
            raise DomainError(f"time must be positive, got {value}")
    exponent = 0.0 if kappa is None else kappa - 1.0

    def integrand(lam: float) -> float:
        return lam ** exponent * limit_kernel(params, t, lam) * limit_kernel(params, t2, lam)

    scale = min(params.kernel_scale(t), params.kernel_scale(t2))
    split = 100.0 * scale
    singular = [] if kappa is None else [Singularity(0.0, kappa)]
    breaks = kernel_breaks((scale,), split, (1.0, 10.0))
    return integrate_half_line(integrand, split, config, singular, breaks, omega=lag).value


def limit_covariance_cyclic(
    params: FrbeParams,
    model: LongMemoryModel,
    t: float,
    t2: float,
    x: float,
    x2: float,
    constant: Optional[float] = None,
    config: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """
    Covariance of the cyclic limit field.

    constant * 2 int_0^inf cos(lam (x - x2)) E_beta(-mu t^beta lam^alpha) E_beta(-mu t2^beta lam^alpha) dlam

    Args:
        constant: Overrides limit_constant_cyclic(model), e.g. 1.0 for the
            unit-constant normalization
    """
    check_regime(ScalingRegime.CYCLIC, params, model)
    if constant is None:
        constant = limit_constant_cyclic(model)
    return constant * 2.0 * _limit_integral(params, t, t2, abs(x - x2), None, config)


def limit_covariance_lrd(
    params: FrbeParams,
    model: LongMemoryModel,
    t: float,
    t2: float,
    x: float,
    x2: float,
    prefactor: Optional[float] = None,
    config: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """
    Covariance of the long-memory limit field.

    prefactor * int_0^inf cos(lam (x - x2)) lam^(kappa0 - 1) E_beta(...t...) E_beta(...t2...) dlam

    The default prefactor is A0 c2(kappa0) with the zero-frequency indicator,
    i.e. twice limit_constant_lrd(model); pass 1.0 for the normalized curves.
    """
    check_regime(ScalingRegime.LONG_MEMORY, params, model)
    if prefactor is None:
        prefactor = 2.0 * limit_constant_lrd(model)
    return prefactor * _limit_integral(params, t, t2, abs(x - x2), model.kappa0, config)


def limit_covariance(
    regime,
    params: FrbeParams,
    model: LongMemoryModel,
    p: SpaceTimePoint,
    q: SpaceTimePoint,
    config: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """Limit covariance for any regime (the slowly varying regime shares the long-memory limit)."""
    regime = _coerce_regime(regime)
    if regime is ScalingRegime.CYCLIC:
        return limit_covariance_cyclic(params, model, p.t, q.t, p.x, q.x, config=config)
    return limit_covariance_lrd(params, model, p.t, q.t, p.x, q.x, config=config)


# =============================================================================
# COUPLED MEAN-SQUARE DISTANCES
# =============================================================================

def _rescaled_amplitude(
    rescaling: RescalingMap,
    params: FrbeParams,
    model: LongMemoryModel,
    t: float,
    specs,
) -> Callable[[float], float]:
    """Spectral amplitude g_eps(lam) of U_eps(t, .) in the rescaled frequency."""
    s = rescaling.freq_scale
    var_scale = rescaling.variance_scale
    if specs is None:
        def density(y):
            return spectral_density(model, y)
    else:
        def density(y):
            return spectral_density_rv(model, specs, y)

    def amplitude(lam: float) -> float:
        y = lam * s
        return solution_kernel(params, t * rescaling.time_scale, y) * math.sqrt(var_scale * density(y))

    return amplitude


def _limit_amplitude(regime: ScalingRegime, params: FrbeParams, model: LongMemoryModel,
                     t: float) -> Callable[[float], float]:
    """Spectral amplitude g_0(lam) of the limit field U_0(t, .)."""
    if regime is ScalingRegime.CYCLIC:
        root = math.sqrt(limit_constant_cyclic(model))

        def amplitude(lam: float) -> float:
            return limit_kernel(params, t, lam) * root
    else:
        constant = limit_constant_lrd(model)
        exponent = model.kappa0 - 1.0

        def amplitude(lam: float) -> float:
            return limit_kernel(params, t, lam) * math.sqrt(constant * abs(lam) ** exponent)

    return amplitude


def _coupled_msd(
    rescaling: RescalingMap,
    params: FrbeParams,
    model: LongMemoryModel,
    t: float,
    specs,
    config: QuadratureConfig,
) -> float:
    """R(t) = int_R (g_eps(lam) - g_0(lam))^2 dlam, both fields driven by one noise."""
    if not t > 0:
        raise DomainError(f"time must be positive, got {t}")
    s = rescaling.freq_scale
    g_eps = _rescaled_amplitude(rescaling, params, model, t, specs)
    g_0 = _limit_amplitude(rescaling.regime, params, model, t)

    def integrand(lam: float) -> float:
        return (g_eps(lam) - g_0(lam)) ** 2

    singular = [Singularity(p.point / s, p.kappa) for p in model.singular_points()]
    cutoff = spectral_cutoff(model, config.tail_mass, specs) / s
    scale = params.kernel_scale(t)
    split = max(cutoff, 100.0 * scale)
    breaks = kernel_breaks((scale,), split)
    result = integrate_half_line(integrand, split, config, singular, breaks)
    return 2.0 * result.value


def coupled_msd_cyclic(
    params: FrbeParams,
    model: LongMemoryModel,
    eps: float,
    t: float,
    config: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """E(U_eps(t, x) - U_0(t, x))^2 in the cyclic regime; independent of x."""
    rescaling = make_rescaling(ScalingRegime.CYCLIC, params, model, eps)
    return _coupled_msd(rescaling, params, model, t, None, config)


def coupled_msd_lrd(
    params: FrbeParams,
    model: LongMemoryModel,
    eps: float,
    t: float,
    config: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """E(U_eps(t, x) - U_0(t, x))^2 in the long-memory regime."""
    rescaling = make_rescaling(ScalingRegime.LONG_MEMORY, params, model, eps)
    return _coupled_msd(rescaling, params, model, t, None, config)


def coupled_msd_rv(
    params: FrbeParams,
    model: LongMemoryModel,
    L: Optional[Sequence[SlowlyVaryingSpec]],
    eps: float,
    t: float,
    config: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """
    E(U^L_eps(t, x) - U_0(t, x))^2 with slowly varying spectral factors.

    The rescaled density carries L_j(1/|lam eps^(beta/alpha) + w_j|) / L_0(eps^(-beta/alpha)).
    """
    specs = _resolve_specs(model, L)
    rescaling = make_rescaling(ScalingRegime.LONG_MEMORY_RV, params, model, eps, specs)
    return _coupled_msd(rescaling, params, model, t, specs, config)


def coupled_msd(
    regime,
    params: FrbeParams,
    model: LongMemoryModel,
    eps: float,
    t: float,
    L: Optional[Sequence[SlowlyVaryingSpec]] = None,
    config: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """Dispatch to the regime's coupled distance."""
    regime = _coerce_regime(regime)
    if regime is ScalingRegime.CYCLIC:
        return coupled_msd_cyclic(params, model, eps, t, config)
    if regime is ScalingRegime.LONG_MEMORY:
        return coupled_msd_lrd(params, model, eps, t, config)
    return coupled_msd_rv(params, model, L, eps, t, config)


def q_factor_cyclic(
    params: FrbeParams,
    model: LongMemoryModel,
    eps: float,
    t: float,
    lam: float,
) -> float:
    """Q_eps(lam) = g_eps(lam) / E_beta(-mu t^beta |lam|^alpha); tends to sqrt(f(0))."""
    rescaling = make_rescaling(ScalingRegime.CYCLIC, params, model, eps)
    g_eps = _rescaled_amplitude(rescaling, params, model, t, None)
    return g_eps(lam) / limit_kernel(params, t, lam)


def q_factor_lrd(
    params: FrbeParams,
    model: LongMemoryModel,
    eps: float,
    t: float,
    lam: float,
    L: Optional[Sequence[SlowlyVaryingSpec]] = None,
) -> float:
    """Q~_eps(lam) = g_eps(lam) / g_0(lam); tends to one."""
    if L is None:
        rescaling = make_rescaling(ScalingRegime.LONG_MEMORY, params, model, eps)
        specs = None
    else:
        specs = _resolve_specs(model, L)
        rescaling = make_rescaling(ScalingRegime.LONG_MEMORY_RV, params, model, eps, specs)
    g_eps = _rescaled_amplitude(rescaling, params, model, t, specs)
    g_0 = _limit_amplitude(rescaling.regime, params, model, t)
    return g_eps(lam) / g_0(lam)


def coupling_bound(msd_p: float, msd_q: float, var_limit_p: float, var_limit_q: float) -> float:
    """
    Bound on |Cov(U_eps(p), U_eps(q)) - Cov(U_0(p), U_0(q))| from coupled distances.

    Cauchy-Schwarz with ||U_eps(q)|| <= ||U_0(q)|| + sqrt(msd_q).
    """
    norm_eps_q = math.sqrt(var_limit_q) + math.sqrt(msd_q)
    return math.sqrt(msd_p) * norm_eps_q + math.sqrt(var_limit_p) * math.sqrt(msd_q)


def certificate_sweep(
    regime,
    params: FrbeParams,
    model: LongMemoryModel,
    eps_grid: Sequence[float] = DEFAULT_EPS_GRID,
    times: Sequence[float] = (1.0,),
    L: Optional[Sequence[SlowlyVaryingSpec]] = None,
    workers: int = 1,
    config: QuadratureConfig = DEFAULT_QUADRATURE,
) -> pd.DataFrame:
    """
    Coupled distances over an eps grid.

    A point whose quadrature fails is reported as NaN instead of aborting
    the sweep.

    Returns:
        DataFrame with columns eps, t, msd ordered by eps descending, then t
    """
    regime = check_regime(regime, params, model)
    jobs = [(eps, t) for eps in sorted(eps_grid, reverse=True) for t in times]

    def run(job):
        eps, t = job
        try:
            return coupled_msd(regime, params, model, eps, t, L, config)
        except AccuracyError as err:
            logger.warning("certificate eps=%g t=%g failed: %s", eps, t, err)
            return math.nan

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(run, jobs))
    else:
        values = [run(job) for job in jobs]
    for (eps, t), value in zip(jobs, values):
        logger.info("certificate %s eps=%g t=%g: msd=%.6g", regime.value, eps, t, value)
    return pd.DataFrame({
        "eps": [eps for eps, _ in jobs],
        "t": [t for _, t in jobs],
        "msd": values,
    })


def variance_scaling_slope(
    params: FrbeParams,
    model: LongMemoryModel,
    times: Sequence[float] = tuple(np.logspace(2, 4, 9)),
    config: QuadratureConfig = DEFAULT_QUADRATURE,
) -> Dict:
    """
    Log-log slope of Var u(T, 0) against T.

    In the long-memory regime the slope approaches -kappa0 beta / alpha, the
    exponent behind the eps^(-kappa0 beta / (2 alpha)) amplitude.

    Returns:
        Dictionary with slope, expected slope, relative error and variances
    """
    check_regime(ScalingRegime.LONG_MEMORY, params, model)
    times = np.asarray(times, dtype=float)
    variances = np.array([solution_covariance(params, model, T, T, 0.0, 0.0, config) for T in times])
    slope, intercept = np.polyfit(np.log(times), np.log(variances), 1)
    expected = -model.kappa0 * params.beta / params.alpha
    return {
        "slope": float(slope),
        "intercept": float(intercept),
        "expected_slope": expected,
        "relative_error": abs(slope - expected) / abs(expected),
        "times": times,
        "variances": variances,
    }
