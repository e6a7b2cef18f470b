"""
Spectral Model Module

Law of the Gaussian random initial condition: covariance, spectral density
and the slowly varying extension.

Features:
- LongMemoryModel of (A_j, w_j, kappa_j) triples with mirrored evaluation
- Normalization constants c1, c2 and the theta correction functions
- Spectral density in the theta form and the Bessel-K form
- Slowly varying modulation of each spectral component
- Tail asymptotics, spectral cutoff and exact cell masses
"""

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import special

from .errors import DomainError, SingularityError
from .quadrature import (
    DEFAULT_QUADRATURE,
    QuadratureConfig,
    Singularity,
    integrate_piecewise,
)

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

SUM_TOLERANCE = 1e-12


# =============================================================================
# SLOWLY VARYING FUNCTIONS
# =============================================================================

class SlowlyVaryingKind(Enum):
    """Constructive families of slowly varying functions."""
    CONSTANT = "constant"
    LOG_POWER = "log_power"
    ITERATED_LOG = "iterated_log"


@dataclass(frozen=True)
class SlowlyVaryingSpec:
    """
    Slowly varying function L on [0, inf).

    constant:      L(x) = scale
    log_power:     L(x) = scale * (1 + ln(1 + x))^p
    iterated_log:  L(x) = scale * (1 + ln(1 + ln(1 + x)))^p
    """
    kind: SlowlyVaryingKind = SlowlyVaryingKind.CONSTANT
    exponent: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if isinstance(self.kind, str):
            try:
                object.__setattr__(self, "kind", SlowlyVaryingKind(self.kind))
            except ValueError:
                kinds = ", ".join(k.value for k in SlowlyVaryingKind)
                raise DomainError(f"Unknown slowly varying kind: {self.kind} (one of {kinds})")
        if not self.scale > 0 or not math.isfinite(self.scale):
            raise DomainError(f"slowly varying scale must be positive, got {self.scale}")
        if not math.isfinite(self.exponent):
            raise DomainError("slowly varying exponent must be finite")

    @classmethod
    def constant(cls, value: float = 1.0) -> "SlowlyVaryingSpec":
        return cls(SlowlyVaryingKind.CONSTANT, 0.0, value)

    @classmethod
    def log_power(cls, exponent: float, scale: float = 1.0) -> "SlowlyVaryingSpec":
        return cls(SlowlyVaryingKind.LOG_POWER, exponent, scale)

    @classmethod
    def iterated_log(cls, exponent: float, scale: float = 1.0) -> "SlowlyVaryingSpec":
        return cls(SlowlyVaryingKind.ITERATED_LOG, exponent, scale)

    @classmethod
    def parse(cls, text: str) -> "SlowlyVaryingSpec":
        """
        Parse ``kind[:p[:scale]]``; for ``constant`` the number is the value.

        Examples: ``log_power:1``, ``iterated_log:-2:0.5``, ``constant:3``.
        """
        parts = text.strip().split(":")
        kind = parts[0].strip()
        try:
            numbers = [float(p) for p in parts[1:]]
        except ValueError:
            raise DomainError(f"malformed slowly varying spec '{text}'")
        if kind == SlowlyVaryingKind.CONSTANT.value:
            if len(numbers) > 1:
                raise DomainError(f"constant takes at most one value, got '{text}'")
            return cls.constant(numbers[0] if numbers else 1.0)
        if len(numbers) not in (1, 2):
            raise DomainError(f"expected {kind}:<p>[:<scale>], got '{text}'")
        return cls(kind, numbers[0], numbers[1] if len(numbers) == 2 else 1.0)

    @property
    def label(self) -> str:
        if self.kind is SlowlyVaryingKind.CONSTANT:
            return f"constant:{self.scale:g}"
        text = f"{self.kind.value}:{self.exponent:g}"
        return text if self.scale == 1.0 else f"{text}:{self.scale:g}"

    @property
    def is_constant(self) -> bool:
        return self.kind is SlowlyVaryingKind.CONSTANT or self.exponent == 0.0

    def __call__(self, x: ArrayLike) -> ArrayLike:
        arr = np.asarray(x, dtype=float)
        if self.kind is SlowlyVaryingKind.CONSTANT:
            values = np.full(arr.shape, self.scale)
        elif self.kind is SlowlyVaryingKind.LOG_POWER:
            values = self.scale * (1.0 + np.log1p(arr)) ** self.exponent
        else:
            values = self.scale * (1.0 + np.log1p(np.log1p(arr))) ** self.exponent
        return float(values) if arr.ndim == 0 else values


# =============================================================================
# MODEL TYPES
# =============================================================================

@dataclass(frozen=True)
class LongMemoryComponent:
    """One (A, w, kappa) term of the initial covariance."""
    amplitude: float
    frequency: float
    kappa: float

    def __post_init__(self):
        for name in ("amplitude", "frequency", "kappa"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.amplitude < 0:
            raise DomainError(f"amplitude A must be non-negative, got {self.amplitude}")
        if self.frequency < 0:
            raise DomainError(f"frequency w must be non-negative, got {self.frequency}")
        _check_kappa(self.kappa)

    @property
    def is_zero_frequency(self) -> bool:
        return self.frequency == 0.0


@dataclass(frozen=True)
class MirroredTerm:
    """One summand j in -n..n of the concise spectral density."""
    index: int
    amplitude: float
    shift: float  # signed w_j; the term is singular at lam = -shift
    kappa: float
    zero_freq: bool
    slowly_varying: Optional[SlowlyVaryingSpec] = None


@dataclass(frozen=True)
class LongMemoryModel:
    """
    Initial-condition law: components j = 0..n with w_0 = 0 < w_1 < ... < w_n.

    The amplitudes sum to one, so the covariance has r(0) = 1. An optional
    slowly varying function per component (index-aligned) is carried along
    for the regularly varying variant of the density.
    """
    components: Tuple[LongMemoryComponent, ...]
    slowly_varying: Optional[Tuple[SlowlyVaryingSpec, ...]] = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if self.slowly_varying is not None:
            object.__setattr__(self, "slowly_varying", tuple(self.slowly_varying))
        self._validate()

    def _validate(self):
        comps = self.components
        if not comps:
            raise DomainError("model needs at least one component")
        zero = [c for c in comps if c.is_zero_frequency]
        if len(zero) != 1:
            raise DomainError(
                f"exactly one component must have w = 0 (it may have A = 0), found {len(zero)}"
            )
        if not comps[0].is_zero_frequency:
            raise DomainError("the w = 0 component must come first")
        freqs = [c.frequency for c in comps[1:]]
        if any(b <= a for a, b in zip(freqs, freqs[1:])):
            raise DomainError(f"cyclic frequencies must be strictly increasing, got {freqs}")
        total = sum(c.amplitude for c in comps)
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise DomainError(f"amplitudes must sum to 1, got {total!r}")
        if self.slowly_varying is not None and len(self.slowly_varying) != len(comps):
            raise DomainError(
                f"need one slowly varying spec per component ({len(comps)}), "
                f"got {len(self.slowly_varying)}"
            )

    @classmethod
    def from_triples(
        cls,
        triples: Sequence[Tuple[float, float, float]],
        slowly_varying: Optional[Sequence[SlowlyVaryingSpec]] = None,
    ) -> "LongMemoryModel":
        """
        Build from (A, w, kappa) triples in any order.

        A zero-amplitude w = 0 component is inserted when none is given.
        """
        items = list(zip(triples, slowly_varying)) if slowly_varying else [(t, None) for t in triples]
        if not any(t[1] == 0.0 for t, _ in items):
            items.append(((0.0, 0.0, 0.5), SlowlyVaryingSpec.constant() if slowly_varying else None))
        items.sort(key=lambda item: item[0][1])
        comps = tuple(LongMemoryComponent(*t) for t, _ in items)
        specs = tuple(s for _, s in items) if slowly_varying else None
        return cls(comps, specs)

    def with_slowly_varying(self, specs: Optional[Sequence[SlowlyVaryingSpec]]) -> "LongMemoryModel":
        return replace(self, slowly_varying=None if specs is None else tuple(specs))

    @property
    def a0(self) -> float:
        return self.components[0].amplitude

    @property
    def kappa0(self) -> float:
        return self.components[0].kappa

    @property
    def n_cyclic(self) -> int:
        return len(self.components) - 1

    @property
    def max_frequency(self) -> float:
        return self.components[-1].frequency

    def terms(self, slowly_varying: Optional[Sequence[SlowlyVaryingSpec]] = None) -> Iterator[MirroredTerm]:
        """Mirrored summands j = -n..n; components with A = 0 are skipped."""
        specs = slowly_varying if slowly_varying is not None else self.slowly_varying
        for j, comp in enumerate(self.components):
            if comp.amplitude == 0.0:
                continue
            spec = specs[j] if specs is not None else None
            if j == 0:
                yield MirroredTerm(0, comp.amplitude, 0.0, comp.kappa, True, spec)
            else:
                yield MirroredTerm(j, comp.amplitude, comp.frequency, comp.kappa, False, spec)
                yield MirroredTerm(-j, comp.amplitude, -comp.frequency, comp.kappa, False, spec)

    def singular_points(self, both_sides: bool = False) -> List[Singularity]:
        """Singular frequencies of the density (non-negative ones unless both_sides)."""
        points = []
        for comp in self.components:
            if comp.amplitude == 0.0:
                continue
            points.append(Singularity(comp.frequency, comp.kappa))
            if both_sides and comp.frequency > 0:
                points.append(Singularity(-comp.frequency, comp.kappa))
        return sorted(points, key=lambda s: s.point)


# =============================================================================
# CONSTANTS AND THETA
# =============================================================================

def _check_kappa(kappa: float) -> None:
    if not 0.0 < kappa < 1.0:
        raise DomainError(f"kappa must lie in the open interval (0, 1), got {kappa}")


def c1(kappa: float, zero_freq: bool = False) -> float:
    """2^[zero] * 2^((1-kappa)/2) / (sqrt(pi) Gamma(kappa/2))."""
    _check_kappa(kappa)
    value = 2.0 ** ((1.0 - kappa) / 2.0) / (math.sqrt(math.pi) * special.gamma(kappa / 2.0))
    return 2.0 * value if zero_freq else value


def c2(kappa: float, zero_freq: bool = False) -> float:
    """1 / (2^(1-[zero]) Gamma(kappa) cos(kappa pi / 2))."""
    _check_kappa(kappa)
    factor = 1.0 if zero_freq else 2.0
    return 1.0 / (factor * special.gamma(kappa) * math.cos(kappa * math.pi / 2.0))


def one_minus_theta(kappa: float, a: ArrayLike) -> ArrayLike:
    """
    1 - theta_kappa(a) = (c1/c2) K_{(kappa-1)/2}(a) a^{(1-kappa)/2}.

    Evaluated directly so that values far in the tail, where theta is within
    rounding of one, keep full relative precision.
    """
    _check_kappa(kappa)
    arr = np.asarray(a, dtype=float)
    if np.any(arr < 0):
        raise DomainError("theta is defined for a >= 0")
    ratio = c1(kappa) / c2(kappa)
    nu = (1.0 - kappa) / 2.0
    with np.errstate(divide="ignore", invalid="ignore"):
        values = ratio * special.kv(nu, arr) * arr ** nu
    values = np.where(arr == 0.0, 1.0, values)
    return float(values) if arr.ndim == 0 else values


def theta(kappa: float, a: ArrayLike) -> ArrayLike:
    """
    Correction function theta_kappa(a); theta(0) = 0 and theta -> 1 at infinity.

    Args:
        kappa: Memory exponent in (0, 1)
        a: Non-negative distance to the singular frequency

    Returns:
        theta_kappa(a) in [-1, 1]
    """
    values = 1.0 - np.asarray(one_minus_theta(kappa, a))
    return float(values) if values.ndim == 0 else values


# =============================================================================
# COVARIANCE AND DENSITY
# =============================================================================

def covariance_initial(model: LongMemoryModel, x: ArrayLike) -> ArrayLike:
    """r(x) = sum_j A_j cos(w_j x) / (1 + x^2)^(kappa_j / 2)."""
    arr = np.asarray(x, dtype=float)
    total = np.zeros(arr.shape)
    for comp in model.components:
        total = total + comp.amplitude * np.cos(comp.frequency * arr) / (1.0 + arr ** 2) ** (comp.kappa / 2.0)
    return float(total) if arr.ndim == 0 else total


def _distance(term: MirroredTerm, lam: np.ndarray) -> np.ndarray:
    dist = np.abs(lam + term.shift)
    if np.any(dist == 0.0):
        raise SingularityError(
            f"spectral density is singular at lambda = {-term.shift:g} "
            f"(component j = {term.index}); integrate across it instead"
        )
    return dist


def _term_density(term: MirroredTerm, lam: np.ndarray, modulate: bool) -> np.ndarray:
    dist = _distance(term, lam)
    value = (0.5 * c2(term.kappa, term.zero_freq) * term.amplitude
             * one_minus_theta(term.kappa, dist) / dist ** (1.0 - term.kappa))
    if modulate and term.slowly_varying is not None:
        with np.errstate(divide="ignore"):
            value = value * term.slowly_varying(1.0 / dist)
    return value


def _density(model: LongMemoryModel, lam: ArrayLike, specs, modulate: bool) -> ArrayLike:
    arr = np.asarray(lam, dtype=float)
    total = np.zeros(arr.shape)
    for term in model.terms(specs):
        total = total + _term_density(term, arr, modulate)
    return float(total) if arr.ndim == 0 else total


def spectral_density(model: LongMemoryModel, lam: ArrayLike) -> ArrayLike:
    """
    Spectral density f(lambda) in the concise theta form.

    f(lam) = sum_{j=-n}^{n} (c2(kappa_j)/2) A_j (1 - theta(|lam + w_j|)) / |lam + w_j|^{1 - kappa_j}

    Raises:
        SingularityError: lam hits a singular frequency with A_j > 0
    """
    return _density(model, lam, None, modulate=False)


def spectral_density_rv(
    model: LongMemoryModel,
    L: Optional[Sequence[SlowlyVaryingSpec]],
    lam: ArrayLike,
) -> ArrayLike:
    """
    Density with each term multiplied by L_j(1 / |lam + w_j|).

    ``L`` is indexed by component j = 0..n (mirror terms share L_j). When
    None, the model's own slowly varying specs are used; a model without
    specs reproduces spectral_density.
    """
    specs = L if L is not None else model.slowly_varying
    if specs is not None and len(specs) != len(model.components):
        raise DomainError(
            f"need one slowly varying spec per component ({len(model.components)}), got {len(specs)}"
        )
    return _density(model, lam, specs, modulate=specs is not None)


def spectral_density_bessel(model: LongMemoryModel, lam: ArrayLike) -> ArrayLike:
    """Bessel-K form: sum_j (c1(kappa_j)/2) A_j K_{(kappa_j-1)/2}(a) a^{(kappa_j-1)/2}."""
    arr = np.asarray(lam, dtype=float)
    total = np.zeros(arr.shape)
    for term in model.terms(None):
        dist = _distance(term, arr)
        nu = (term.kappa - 1.0) / 2.0
        total = total + 0.5 * c1(term.kappa, term.zero_freq) * term.amplitude * special.kv(nu, dist) * dist ** nu
    return float(total) if arr.ndim == 0 else total


def component_density(
    model: LongMemoryModel,
    j: int,
    lam: ArrayLike,
    L: Optional[Sequence[SlowlyVaryingSpec]] = None,
) -> ArrayLike:
    """Exact contribution of component j (both mirror terms for j >= 1)."""
    if not 0 <= j < len(model.components):
        raise DomainError(f"component index {j} out of range")
    arr = np.asarray(lam, dtype=float)
    total = np.zeros(arr.shape)
    for term in model.terms(L):
        if abs(term.index) == j:
            total = total + _term_density(term, arr, modulate=L is not None)
    return float(total) if arr.ndim == 0 else total


def _tail_envelope(comp: LongMemoryComponent, lam: np.ndarray) -> np.ndarray:
    zero = comp.is_zero_frequency
    mag = np.abs(lam)
    coefficient = comp.amplitude * math.sqrt(math.pi) * c1(comp.kappa, zero) / 2.0 ** (1.5 + zero)
    growth = np.exp(comp.frequency - mag) + np.exp(-comp.frequency - mag)
    return coefficient * growth * mag ** (comp.kappa / 2.0 - 1.0)


def tail_asymptotic(model: LongMemoryModel, j: int, lam: ArrayLike) -> ArrayLike:
    """
    Large-|lambda| approximant of component j.

    A sqrt(pi) c1(kappa, zero) (e^w + e^-w) |lam|^(kappa/2 - 1) e^-|lam| / 2^(3/2 + [zero])
    """
    if not 0 <= j < len(model.components):
        raise DomainError(f"component index {j} out of range")
    comp = model.components[j]
    arr = np.asarray(lam, dtype=float)
    if np.any(np.abs(arr) < 10.0 * (1.0 + comp.frequency)):
        raise DomainError(f"tail asymptotic needs |lambda| >= {10.0 * (1.0 + comp.frequency):g}")
    values = _tail_envelope(comp, arr)
    return float(values) if arr.ndim == 0 else values


# =============================================================================
# INTEGRALS OF THE DENSITY
# =============================================================================

def spectral_cutoff(
    model: LongMemoryModel,
    tail_mass: float,
    L: Optional[Sequence[SlowlyVaryingSpec]] = None,
) -> float:
    """
    Frequency Lambda beyond which the two-sided spectral mass is below tail_mass.

    Uses the exponential tail envelope with a safety factor of four.
    """
    if not 0.0 < tail_mass < 1.0:
        raise DomainError(f"tail_mass must lie in (0, 1), got {tail_mass}")
    specs = L if L is not None else model.slowly_varying
    cutoff = 10.0 * (1.0 + model.max_frequency)
    while True:
        bound = 0.0
        for j, comp in enumerate(model.components):
            if comp.amplitude == 0.0:
                continue
            envelope = _tail_envelope(comp, np.asarray(cutoff))
            if specs is not None:
                envelope = envelope * specs[j](1.0 / (cutoff - comp.frequency))
            bound += 8.0 * float(envelope)
        if bound < tail_mass:
            return cutoff
        cutoff += 1.0


def spectral_mass(
    model: LongMemoryModel,
    a: float,
    b: float,
    L: Optional[Sequence[SlowlyVaryingSpec]] = None,
    config: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """Exact spectral mass of [a, b] with singularities split out."""
    if b <= a:
        return 0.0
    density = (lambda lam: spectral_density_rv(model, L, lam)) if L is not None else \
        (lambda lam: spectral_density(model, lam))
    return integrate_piecewise(density, a, b, config, model.singular_points(both_sides=True)).value


def spectral_first_moment(
    model: LongMemoryModel,
    a: float,
    b: float,
    L: Optional[Sequence[SlowlyVaryingSpec]] = None,
    config: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """Integral of lam * f(lam) over [a, b]."""
    if b <= a:
        return 0.0
    if L is not None:
        def integrand(lam):
            return lam * spectral_density_rv(model, L, lam)
    else:
        def integrand(lam):
            return lam * spectral_density(model, lam)
    return integrate_piecewise(integrand, a, b, config, model.singular_points(both_sides=True)).value


def covariance_from_spectrum(
    model: LongMemoryModel,
    x: float,
    config: QuadratureConfig = DEFAULT_QUADRATURE,
    tail_mass: float = 1e-10,
) -> float:
    """2 int_0^Lambda f(lam) cos(lam x) dlam, the Fourier dual of covariance_initial."""
    cutoff = spectral_cutoff(model, tail_mass)
    result = integrate_piecewise(
        lambda lam: spectral_density(model, lam), 0.0, cutoff, config,
        model.singular_points(), omega=x,
    )
    return 2.0 * result.value


def total_mass(model: LongMemoryModel, config: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Integral of f over the real line (equals r(0) = 1)."""
    return covariance_from_spectrum(model, 0.0, config)
