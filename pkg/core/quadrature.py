"""
Quadrature Helpers

Thin layer over scipy.integrate.quad for the integrals this laboratory needs.

Features:
- Integrable power-law endpoint singularities |lam - p|^(kappa - 1) absorbed by
  the substitution u = |lam - p|^kappa
- Piecewise integration across breakpoints and singular frequencies
- Cosine-weighted (QUADPACK QAWO/QAWF) integration for oscillatory kernels
- Uniform accuracy reporting: failures raise AccuracyError with the
  achieved error estimate
"""

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy import integrate

from .errors import AccuracyError, DomainError

logger = logging.getLogger(__name__)

Integrand = Callable[[float], float]

# Below this many radians across a segment the cosine is folded into the
# integrand instead of handed to QAWO.
_OSCILLATION_THRESHOLD = 4.0 * math.pi


@dataclass(frozen=True)
class QuadratureConfig:
    """Quadrature tolerances."""
    epsrel: float = 1e-10
    epsabs: float = 0.0
    limit: int = 500
    accept_rel: float = 1e-6
    accept_abs: float = 1e-13
    tail_abs: float = 1e-13
    tail_mass: float = 1e-12

    def __post_init__(self):
        if not 0.0 < self.epsrel < 1e-2:
            raise DomainError(f"epsrel must lie in (0, 1e-2), got {self.epsrel}")
        if self.limit < 50:
            raise DomainError("limit must be at least 50")
        if not 0.0 < self.tail_mass <= 1e-3:
            raise DomainError(f"tail_mass must lie in (0, 1e-3], got {self.tail_mass}")


DEFAULT_QUADRATURE = QuadratureConfig()


@dataclass
class QuadResult:
    """Integral value with its absolute error estimate."""
    value: float = 0.0
    abserr: float = 0.0

    def __add__(self, other: "QuadResult") -> "QuadResult":
        return QuadResult(self.value + other.value, self.abserr + other.abserr)


@dataclass(frozen=True)
class Singularity:
    """Integrand behaves like |lam - point|^(kappa - 1) near ``point``."""
    point: float
    kappa: float


def quad(
    func: Integrand,
    a: float,
    b: float,
    config: QuadratureConfig = DEFAULT_QUADRATURE,
    **kwargs,
) -> QuadResult:
    """
    scipy.integrate.quad with accuracy checking.

    QUADPACK warnings are tolerated when the reported error stays within
    ``accept_rel * |value| + accept_abs``; otherwise AccuracyError is raised.
    """
    epsabs = config.epsabs
    if math.isinf(b) and kwargs.get("weight") in ("cos", "sin"):
        # QAWF honours only an absolute tolerance.
        epsabs = max(epsabs, config.tail_abs)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        value, abserr = integrate.quad(
            func, a, b, epsabs=epsabs, epsrel=config.epsrel, limit=config.limit, **kwargs
        )[:2]
    tolerance = config.accept_abs + config.accept_rel * abs(value)
    if not np.isfinite(value) or abserr > tolerance:
        raise AccuracyError(f"quadrature on [{a:.6g}, {b:.6g}] did not converge",
                            achieved=abserr, requested=tolerance)
    if caught:
        logger.debug("accepted quadrature on [%.6g, %.6g]: %s (abserr %.3g)",
                     a, b, caught[-1].message, abserr)
    return QuadResult(value, abserr)


def _singular_end(
    func: Integrand,
    point: float,
    other: float,
    kappa: float,
    config: QuadratureConfig,
    omega: float,
) -> QuadResult:
    """Integrate from a singular endpoint ``point`` to a regular ``other``."""
    direction = 1.0 if other > point else -1.0
    exponent = 1.0 / kappa
    floor = 4.0 * np.spacing(max(abs(point), 1.0))

    def transformed(u: float) -> float:
        if u <= 0:
            return 0.0
        # lam - point = u^(1/kappa), so the Jacobian u^(1/kappa - 1)/kappa cancels the singularity.
        delta = u ** exponent
        if delta < floor:
            # Below float resolution at point: extend the |lam - point|^(kappa - 1) law from the floor.
            lam = point + direction * floor
            value = func(lam) * floor ** (1.0 - kappa) / kappa
        else:
            lam = point + direction * delta
            value = func(lam) * u ** (exponent - 1.0) / kappa
        if omega:
            value *= math.cos(omega * lam)
        return value

    return quad(transformed, 0.0, abs(other - point) ** kappa, config)


def _regular(
    func: Integrand,
    a: float,
    b: float,
    config: QuadratureConfig,
    omega: float,
) -> QuadResult:
    if omega and omega * (b - a) > _OSCILLATION_THRESHOLD:
        return quad(func, a, b, config, weight="cos", wvar=omega)
    if omega:
        return quad(lambda lam: func(lam) * math.cos(omega * lam), a, b, config)
    return quad(func, a, b, config)


def integrate_piecewise(
    func: Integrand,
    a: float,
    b: float,
    config: QuadratureConfig = DEFAULT_QUADRATURE,
    singularities: Iterable[Singularity] = (),
    breaks: Iterable[float] = (),
    omega: float = 0.0,
) -> QuadResult:
    """
    Integrate func(lam) * cos(omega lam) over [a, b].

    Args:
        func: Integrand without the cosine factor
        a, b: Finite limits, a < b
        config: Tolerances
        singularities: Power-law singular points; those inside [a, b] become
            segment boundaries handled by substitution
        breaks: Additional segment boundaries
        omega: Cosine frequency (0 for none)

    Returns:
        QuadResult summed over all segments
    """
    if not b > a:
        raise DomainError(f"integration limits must satisfy a < b, got [{a}, {b}]")
    omega = abs(omega)
    singular = {s.point: s.kappa for s in singularities if a <= s.point <= b}
    nodes = sorted({a, b, *singular, *(p for p in breaks if a < p < b)})

    total = QuadResult()
    for lo, hi in zip(nodes[:-1], nodes[1:]):
        left, right = singular.get(lo), singular.get(hi)
        if left is not None and right is not None:
            mid = 0.5 * (lo + hi)
            total += _singular_end(func, lo, mid, left, config, omega)
            total += _singular_end(func, hi, mid, right, config, omega)
        elif left is not None:
            total += _singular_end(func, lo, hi, left, config, omega)
        elif right is not None:
            total += _singular_end(func, hi, lo, right, config, omega)
        else:
            total += _regular(func, lo, hi, config, omega)
    return total


def integrate_tail(
    func: Integrand,
    a: float,
    config: QuadratureConfig = DEFAULT_QUADRATURE,
    omega: float = 0.0,
) -> QuadResult:
    """Integrate func(lam) * cos(omega lam) over [a, inf) for a regular integrand."""
    omega = abs(omega)
    if omega:
        return quad(func, a, math.inf, config, weight="cos", wvar=omega)
    return quad(func, a, math.inf, config)


def integrate_half_line(
    func: Integrand,
    split: float,
    config: QuadratureConfig = DEFAULT_QUADRATURE,
    singularities: Sequence[Singularity] = (),
    breaks: Iterable[float] = (),
    omega: float = 0.0,
) -> QuadResult:
    """Integrate over [0, inf): piecewise on [0, split], tail beyond."""
    head = integrate_piecewise(func, 0.0, split, config, singularities, breaks, omega)
    return head + integrate_tail(func, split, config, omega)


def kernel_breaks(
    scales: Iterable[Optional[float]],
    upper: float,
    multiples: Sequence[float] = (1.0, 10.0, 100.0),
) -> list:
    """Breakpoints at multiples of the kernel decay scales inside (0, upper)."""
    points = set()
    for scale in scales:
        if scale is None or not np.isfinite(scale) or scale <= 0:
            continue
        points.update(m * scale for m in multiples if 0.0 < m * scale < upper)
    return sorted(points)
