"""
Special Functions Module

Scalar and vectorized special functions used throughout the laboratory.

Features:
- Gamma and complementary error function (scipy.special)
- One-parameter Mittag-Leffler function E_beta with two evaluation regimes:
  the power series near the origin and a trapezoidal rule on the
  complete-monotonicity integral representation for negative arguments
- Modified Bessel function of the second kind, with an independent
  integral-definition evaluator used for cross-checks
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple, Union

import numpy as np
from scipy import special

from .errors import AccuracyError, DomainError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# Largest tolerated |term| / |sum| ratio before the series is abandoned for
# negative arguments; bounds the digits lost to cancellation at about four.
SERIES_CANCELLATION_LIMIT = 1e4


@dataclass(frozen=True)
class SpecialFunctionConfig:
    """Accuracy settings shared by the special functions."""
    rel_tol: float = 1e-10
    max_terms: int = 500
    quad_nodes: int = 200
    series_radius: float = 5.0

    def __post_init__(self):
        if not 0.0 < self.rel_tol < 1e-3:
            raise DomainError(f"rel_tol must lie in (0, 1e-3), got {self.rel_tol}")
        if self.max_terms < 50:
            raise DomainError(f"max_terms must be at least 50, got {self.max_terms}")
        if self.quad_nodes < 16:
            raise DomainError(f"quad_nodes must be at least 16, got {self.quad_nodes}")
        if self.series_radius <= 0:
            raise DomainError("series_radius must be positive")


DEFAULT_CONFIG = SpecialFunctionConfig()


def _as_output(values: np.ndarray, scalar: bool) -> ArrayLike:
    return float(values) if scalar else values


def gamma_fn(x: ArrayLike) -> ArrayLike:
    """
    Gamma function.

    Args:
        x: Argument(s), not a non-positive integer

    Returns:
        Gamma(x)
    """
    arr = np.asarray(x, dtype=float)
    if np.any((arr <= 0) & (arr == np.round(arr))):
        raise DomainError(f"Gamma function has a pole at non-positive integers, got {x}")
    return _as_output(special.gamma(arr), arr.ndim == 0)


def erfc(z: ArrayLike) -> ArrayLike:
    """Complementary error function 1 - erf(z)."""
    arr = np.asarray(z, dtype=float)
    return _as_output(special.erfc(arr), arr.ndim == 0)


def _check_beta(beta: float) -> None:
    if not 0.0 < beta <= 1.0:
        raise DomainError(f"beta must lie in (0, 1], got {beta}")


# =============================================================================
# MITTAG-LEFFLER FUNCTION
# =============================================================================

def _series_terms(beta: float, flat: np.ndarray, config: SpecialFunctionConfig):
    """Series sums with per-point convergence and cancellation diagnostics."""
    k = np.arange(config.max_terms, dtype=float)
    with np.errstate(divide="ignore"):
        log_abs = np.log(np.abs(flat))[:, None]
    log_mag = k[None, :] * log_abs - special.gammaln(1.0 + beta * k)[None, :]
    log_mag[:, 0] = 0.0  # 0**0 = 1
    with np.errstate(over="ignore"):
        magnitude = np.exp(log_mag)
    signs = np.where((flat[:, None] < 0) & (k[None, :] % 2 == 1), -1.0, 1.0)
    with np.errstate(invalid="ignore"):
        total = (signs * magnitude).sum(axis=1)
    scale = np.maximum(np.abs(total), np.finfo(float).tiny)
    tail = magnitude[:, -10:].max(axis=1) / scale
    converged = np.isfinite(total) & (tail <= 0.1 * config.rel_tol)
    cancellation = magnitude.max(axis=1) / scale
    return total, converged, tail, cancellation


def mittag_leffler_series(
    beta: float,
    s: ArrayLike,
    config: SpecialFunctionConfig = DEFAULT_CONFIG,
    check_cancellation: bool = False,
) -> ArrayLike:
    """
    Power series E_beta(s) = sum_k s^k / Gamma(1 + beta k).

    Args:
        beta: Order in (0, 1]
        s: Argument(s)
        config: Accuracy settings
        check_cancellation: Raise AccuracyError when the largest term exceeds
            SERIES_CANCELLATION_LIMIT times the sum

    Returns:
        Series value(s)
    """
    _check_beta(beta)
    arr = np.asarray(s, dtype=float)
    flat = np.atleast_1d(arr).ravel()
    total, converged, tail, cancellation = _series_terms(beta, flat, config)
    if not np.all(converged):
        bad = ~converged
        raise AccuracyError(
            f"Mittag-Leffler series for beta={beta} did not converge at s={flat[bad][0]} "
            f"within {config.max_terms} terms",
            achieved=float(np.nan_to_num(tail[bad], nan=np.inf).max()),
            requested=config.rel_tol,
        )
    if check_cancellation and np.any(cancellation > SERIES_CANCELLATION_LIMIT):
        raise AccuracyError(
            f"Mittag-Leffler series for beta={beta} loses precision to cancellation",
            achieved=float(cancellation.max() * np.finfo(float).eps),
            requested=config.rel_tol,
        )
    return _as_output(total.reshape(arr.shape), arr.ndim == 0)


@lru_cache(maxsize=64)
def _integral_rule(beta: float, rel_tol: float) -> Tuple[float, float, float]:
    """Step and window of the trapezoidal rule for the integral regime."""
    # Half-width of the analyticity strip: poles of 1/(cosh v + cos(beta pi))
    # at Im v = pi(1 - beta); exp(-e^{v/beta}) stays bounded for Im v < beta pi / 2.
    strip = 0.9 * min(np.pi * (1.0 - beta), 0.5 * beta * np.pi)
    digits = np.log(1.0 / rel_tol) + 8.0
    step = 2.0 * np.pi * strip / digits
    upper = beta * np.log(digits + 40.0)
    return step, digits, upper


def mittag_leffler_integral(
    beta: float,
    s: ArrayLike,
    config: SpecialFunctionConfig = DEFAULT_CONFIG,
) -> ArrayLike:
    """
    E_beta(s) for s <= 0 from the complete-monotonicity representation.

    With x = -s, the representation

        E_beta(-x) = sin(beta pi)/(beta pi) * int exp(-e^{v/beta}) dv
                     / (2 (cosh(v - ln x) + cos(beta pi)))

    has a positive integrand, so the trapezoidal rule converges
    exponentially without cancellation.

    Args:
        beta: Order in (0, 1)
        s: Non-positive argument(s)
        config: Accuracy settings

    Returns:
        E_beta(s)
    """
    _check_beta(beta)
    if beta == 1.0:
        raise DomainError("integral representation requires beta < 1; use exp for beta = 1")
    arr = np.asarray(s, dtype=float)
    if np.any(arr > 0):
        raise DomainError("integral representation is valid for s <= 0 only")

    flat = np.atleast_1d(-arr).ravel()
    result = np.ones_like(flat)
    positive = flat > 0
    if np.any(positive):
        x = flat[positive]
        step, digits, upper = _integral_rule(float(beta), config.rel_tol)
        lower = min(float(np.log(x.min())), 0.0) - digits
        nodes = np.arange(np.floor(lower / step), np.ceil(upper / step) + 1) * step
        decay = np.exp(-np.exp(nodes / beta))
        shift = np.abs(nodes[None, :] - np.log(x)[:, None])
        damp = np.exp(-shift)
        weights = damp / (1.0 + 2.0 * np.cos(beta * np.pi) * damp + damp * damp)
        prefactor = np.sin(beta * np.pi) / (beta * np.pi)
        result[positive] = prefactor * step * (weights @ decay)
        logger.debug("Mittag-Leffler integral: beta=%s, %d nodes", beta, nodes.size)
    return _as_output(result.reshape(arr.shape), arr.ndim == 0)


def mittag_leffler(
    beta: float,
    s: ArrayLike,
    config: SpecialFunctionConfig = DEFAULT_CONFIG,
) -> ArrayLike:
    """
    One-parameter Mittag-Leffler function E_beta(s).

    Accuracy is guaranteed for s <= 0 and for small positive s.
    beta = 1 is the exponential; beta = 1/2 uses the closed form
    E_{1/2}(z) = exp(z^2) erfc(-z), evaluated as erfcx(-z).

    Args:
        beta: Order in (0, 1]
        s: Argument(s)
        config: Accuracy settings

    Returns:
        E_beta(s)
    """
    _check_beta(beta)
    arr = np.asarray(s, dtype=float)
    scalar = arr.ndim == 0

    if beta == 1.0:
        return _as_output(np.exp(arr), scalar)
    if beta == 0.5:
        return _as_output(special.erfcx(-arr), scalar)

    flat = np.atleast_1d(arr).ravel()
    out = np.empty_like(flat)
    done = np.zeros(flat.shape, dtype=bool)

    near = np.abs(flat) <= config.series_radius
    if np.any(near):
        total, converged, _, cancellation = _series_terms(beta, flat[near], config)
        trusted = converged & ((flat[near] >= 0) | (cancellation <= SERIES_CANCELLATION_LIMIT))
        idx = np.flatnonzero(near)[trusted]
        out[idx] = total[trusted]
        done[idx] = True
        if not np.all(trusted):
            logger.debug("beta=%s: %d near-origin points routed to the integral regime",
                         beta, int(np.count_nonzero(~trusted)))

    negative = ~done & (flat < 0)
    if np.any(negative):
        out[negative] = mittag_leffler_integral(beta, flat[negative], config)
        done |= negative
    if not np.all(done):
        # Positive arguments: the series is the only regime offered.
        out[~done] = mittag_leffler_series(beta, flat[~done], config)

    return _as_output(out.reshape(arr.shape), scalar)


def mittag_leffler_bounds(beta: float, x: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
    """
    Two-sided bound on E_beta(-x) for x >= 0 and beta < 1.

    Returns:
        (lower, upper) = (1/(1 + Gamma(1-beta) x), 1/(1 + x/Gamma(1+beta)))
    """
    _check_beta(beta)
    arr = np.asarray(x, dtype=float)
    lower = 1.0 / (1.0 + special.gamma(1.0 - beta) * arr)
    upper = 1.0 / (1.0 + arr / special.gamma(1.0 + beta))
    return lower, upper


# =============================================================================
# MODIFIED BESSEL FUNCTION OF THE SECOND KIND
# =============================================================================

def bessel_k(nu: float, z: ArrayLike) -> ArrayLike:
    """
    Modified Bessel function of the second kind K_nu(z) for z > 0.

    Args:
        nu: Real order (K_{-nu} = K_nu)
        z: Positive argument(s)

    Returns:
        K_nu(z)
    """
    arr = np.asarray(z, dtype=float)
    if np.any(arr <= 0):
        raise DomainError(f"bessel_k requires z > 0, got {z}")
    return _as_output(special.kv(abs(nu), arr), arr.ndim == 0)


def bessel_k_integral(
    nu: float,
    z: ArrayLike,
    config: SpecialFunctionConfig = DEFAULT_CONFIG,
) -> ArrayLike:
    """
    K_nu(z) from its integral definition.

    After s = e^u the definition 1/2 int_0^inf s^{nu-1} exp(-(s + 1/s) z / 2) ds
    becomes int_0^inf exp(-z cosh u) cosh(nu u) du, whose integrand is even
    and entire, so the trapezoidal rule on [0, U] is spectrally accurate.
    """
    arr = np.asarray(z, dtype=float)
    if np.any(arr <= 0):
        raise DomainError(f"bessel_k requires z > 0, got {z}")
    flat = np.atleast_1d(arr).ravel()

    target = np.log(1.0 / config.rel_tol) + 10.0
    # Smallest U with z (cosh U - 1) - |nu| U above the target for every z.
    z_min = flat.min()
    upper = 1.0
    while z_min * (np.cosh(upper) - 1.0) - abs(nu) * upper < target:
        upper += 0.5
    n_nodes = max(config.quad_nodes, int(np.ceil(upper / 0.05)))
    u = np.linspace(0.0, upper, n_nodes + 1)
    step = u[1] - u[0]
    weights = np.full(u.shape, step)
    weights[0] = 0.5 * step

    integrand = np.exp(-np.outer(flat, np.cosh(u) - 1.0)) * np.cosh(nu * u)[None, :]
    values = np.exp(-flat) * (integrand @ weights)
    return _as_output(values.reshape(arr.shape), arr.ndim == 0)
