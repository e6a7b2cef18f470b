"""
Test suite for FRBE laboratory - Spectral Model
"""
import math

import numpy as np
import pytest
import sys
import os

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from scipy import special

from core.errors import DomainError, SingularityError
from core.spectral_model import (
    LongMemoryComponent,
    LongMemoryModel,
    SlowlyVaryingKind,
    SlowlyVaryingSpec,
    c1,
    c2,
    component_density,
    covariance_from_spectrum,
    covariance_initial,
    spectral_cutoff,
    spectral_density,
    spectral_density_bessel,
    spectral_density_rv,
    spectral_mass,
    tail_asymptotic,
    theta,
    total_mass,
)


class TestConstants:
    """Tests for the normalizing constants and theta."""

    def test_c1_value(self):
        """c1(1/2) = 2^(1/4) / (sqrt(pi) Gamma(1/4)), doubled at w = 0."""
        expected = 2.0 ** 0.25 / (math.sqrt(math.pi) * special.gamma(0.25))
        assert c1(0.5) == pytest.approx(expected, rel=1e-14)
        assert c1(0.5, zero_freq=True) == pytest.approx(2.0 * expected, rel=1e-14)

    def test_c2_value(self):
        """c2(1/2) = 1/sqrt(2 pi)."""
        assert c2(0.5) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), rel=1e-14)
        assert c2(0.5, zero_freq=True) == pytest.approx(2.0 / math.sqrt(2.0 * math.pi), rel=1e-14)

    def test_invalid_kappa(self):
        """kappa must lie in (0, 1)."""
        with pytest.raises(DomainError, match=r"\(0, 1\)"):
            c1(1.0)
        with pytest.raises(DomainError):
            c2(0.0)

    def test_theta_limits(self):
        """theta(0) = 0 and theta tends to one far out."""
        assert theta(0.5, 0.0) == pytest.approx(0.0, abs=1e-15)
        assert theta(0.3, 50.0) == pytest.approx(1.0, abs=1e-12)

    def test_theta_small_argument_expansion(self):
        """theta = C a^(1-kappa) - a^2/(2(kappa+1)) + o(a^2) near zero."""
        kappa = 0.3
        lead = special.gamma((kappa + 1.0) / 2.0) / (2.0 ** (1.0 - kappa) * special.gamma((3.0 - kappa) / 2.0))
        ratios = []
        for a in (0.1, 0.01, 0.001):
            expansion = lead * a ** (1.0 - kappa) - a ** 2 / (2.0 * (kappa + 1.0))
            ratios.append(abs(theta(kappa, a) - expansion) / a ** 2)
        assert ratios[0] < 0.1
        assert ratios[0] > ratios[1] > ratios[2]
        assert ratios[2] < 0.01

    def test_theta_increasing(self):
        """theta increases on (0, inf)."""
        values = theta(0.4, np.linspace(0.01, 10.0, 200))
        assert np.all(np.diff(values) > 0)


class TestModel:
    """Tests for model construction and validation."""

    def test_from_triples_inserts_zero_component(self):
        """A missing w = 0 component is added with A = 0."""
        model = LongMemoryModel.from_triples([(1.0, 1.0, 0.5)])
        assert model.a0 == 0.0
        assert model.n_cyclic == 1
        assert model.max_frequency == 1.0

    def test_amplitudes_must_sum_to_one(self):
        """Amplitude sum is checked."""
        with pytest.raises(DomainError, match="sum to 1"):
            LongMemoryModel.from_triples([(0.5, 0.0, 0.5), (0.4, 1.0, 0.5)])

    def test_zero_component_required_first(self):
        """Direct construction needs w = 0 first."""
        with pytest.raises(DomainError, match="w = 0"):
            LongMemoryModel((LongMemoryComponent(1.0, 1.0, 0.5),))

    def test_frequencies_strictly_increasing(self):
        """Duplicate cyclic frequencies are rejected."""
        comps = (
            LongMemoryComponent(0.0, 0.0, 0.5),
            LongMemoryComponent(0.5, 1.0, 0.5),
            LongMemoryComponent(0.5, 1.0, 0.3),
        )
        with pytest.raises(DomainError, match="strictly increasing"):
            LongMemoryModel(comps)

    def test_component_validation(self):
        """Negative amplitude and kappa outside (0, 1) are rejected."""
        with pytest.raises(DomainError):
            LongMemoryComponent(-0.1, 0.0, 0.5)
        with pytest.raises(DomainError):
            LongMemoryComponent(1.0, 0.0, 1.2)

    def test_singular_points(self, cyclic_model, lrd_model):
        """Zero-amplitude components are not singular."""
        assert [s.point for s in cyclic_model.singular_points(both_sides=True)] == [-1.0, 1.0]
        assert [s.point for s in lrd_model.singular_points()] == [0.0]


class TestSlowlyVarying:
    """Tests for slowly varying functions."""

    def test_parse(self):
        """Textual forms parse into specs."""
        spec = SlowlyVaryingSpec.parse("log_power:1")
        assert spec.kind is SlowlyVaryingKind.LOG_POWER
        assert spec.exponent == 1.0
        assert SlowlyVaryingSpec.parse("constant:3").scale == 3.0
        assert SlowlyVaryingSpec.parse("iterated_log:-2:0.5").scale == 0.5

    def test_parse_errors(self):
        """Unknown kinds and malformed numbers raise."""
        with pytest.raises(DomainError):
            SlowlyVaryingSpec.parse("bogus:1")
        with pytest.raises(DomainError):
            SlowlyVaryingSpec.parse("log_power:x")

    def test_values(self):
        """log_power(1) is one at the origin and slowly varying at infinity."""
        spec = SlowlyVaryingSpec.log_power(1.0)
        assert spec(0.0) == 1.0
        assert spec(1e12) / spec(2e12) == pytest.approx(1.0, abs=0.03)
        assert SlowlyVaryingSpec.constant(2.5)(np.array([1.0, 7.0])).tolist() == [2.5, 2.5]

    def test_label_roundtrip(self):
        """label gives text that parses back to the same spec."""
        spec = SlowlyVaryingSpec.iterated_log(-2.0, 0.5)
        assert SlowlyVaryingSpec.parse(spec.label) == spec


class TestCovarianceInitial:
    """Tests for the initial covariance."""

    def test_unit_variance(self, mixed_model):
        """r(0) = sum A = 1."""
        assert covariance_initial(mixed_model, 0.0) == pytest.approx(1.0, rel=1e-12)

    def test_single_component_value(self, lrd_model):
        """r(1) = 2^(-1/4) for w = 0, kappa = 1/2."""
        assert covariance_initial(lrd_model, 1.0) == pytest.approx(2.0 ** -0.25, rel=1e-14)

    def test_even(self, mixed_model):
        """r(-x) = r(x)."""
        x = np.linspace(0.0, 5.0, 11)
        np.testing.assert_allclose(covariance_initial(mixed_model, -x), covariance_initial(mixed_model, x))


class TestSpectralDensity:
    """Tests for the spectral density."""

    def test_theta_and_bessel_forms_agree(self, mixed_model):
        """Concise theta form equals the Bessel-K form."""
        lam = np.array([0.3, 1.7, 4.2, -2.2, 12.0])
        np.testing.assert_allclose(spectral_density(mixed_model, lam),
                                   spectral_density_bessel(mixed_model, lam), rtol=1e-12)

    def test_even(self, cyclic_model):
        """f(-lam) = f(lam)."""
        lam = np.array([0.2, 0.9, 1.4, 3.0])
        np.testing.assert_allclose(spectral_density(cyclic_model, -lam),
                                   spectral_density(cyclic_model, lam), rtol=1e-14)

    def test_positive(self, mixed_model):
        """Density is positive off the singular set."""
        lam = np.linspace(0.05, 30.0, 300)
        assert np.all(spectral_density(mixed_model, lam) > 0)

    def test_singularity_raises(self, lrd_model, cyclic_model):
        """Evaluating at a singular frequency raises."""
        with pytest.raises(SingularityError):
            spectral_density(lrd_model, 0.0)
        with pytest.raises(SingularityError):
            spectral_density(cyclic_model, -1.0)

    def test_cyclic_finite_at_origin(self, cyclic_model):
        """With A0 = 0 the density is finite at zero."""
        assert math.isfinite(spectral_density(cyclic_model, 0.0))

    def test_unit_mass(self, lrd_model, cyclic_model, mixed_model):
        """Integral of f over the line is one."""
        for model in (lrd_model, cyclic_model, mixed_model):
            assert total_mass(model) == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("kappa", [0.05, 0.1, 0.2])
    def test_unit_mass_strong_singularity(self, kappa):
        """Small kappa0 puts much of the mass next to the origin; the total is still one."""
        model = LongMemoryModel.from_triples([(1.0, 0.0, kappa)])
        assert total_mass(model) == pytest.approx(1.0, abs=1e-6)

    def test_unit_mass_small_kappa_cyclic(self):
        """Same for a cyclic pair with kappa = 0.1."""
        model = LongMemoryModel.from_triples([(0.0, 0.0, 0.5), (1.0, 1.0, 0.1)])
        assert total_mass(model) == pytest.approx(1.0, abs=1e-6)

    def test_fourier_pair(self, lrd_model, cyclic_model, mixed_model):
        """Fourier transform of f reproduces r."""
        for model in (lrd_model, cyclic_model, mixed_model):
            for x in (0.5, 1.0, 2.0, 5.0, 10.0):
                assert covariance_from_spectrum(model, x) == pytest.approx(
                    covariance_initial(model, x), abs=1e-4)

    def test_component_densities_sum(self, mixed_model):
        """Component contributions add up to f."""
        lam = np.array([0.4, 1.3, 3.3])
        total = sum(component_density(mixed_model, j, lam) for j in range(len(mixed_model.components)))
        np.testing.assert_allclose(total, spectral_density(mixed_model, lam), rtol=1e-13)

    def test_rv_density_constant_factor(self, mixed_model):
        """Constant slowly varying functions scale the density."""
        lam = np.array([0.4, 2.0])
        specs = [SlowlyVaryingSpec.constant(3.0)] * 3
        np.testing.assert_allclose(spectral_density_rv(mixed_model, specs, lam),
                                   3.0 * spectral_density(mixed_model, lam), rtol=1e-14)
        np.testing.assert_allclose(spectral_density_rv(mixed_model, None, lam),
                                   spectral_density(mixed_model, lam), rtol=0)

    def test_rv_density_log_growth(self, rv_model):
        """With L0 = log_power(1) the ratio to f grows like ln(1/|lam|) at the origin."""
        ratios = []
        for lam in (1e-2, 1e-4, 1e-6, -1e-6):
            ratio = spectral_density_rv(rv_model, None, lam) / spectral_density(rv_model, lam)
            assert ratio == pytest.approx(1.0 + math.log1p(1.0 / abs(lam)), rel=1e-12)
            assert ratio - math.log(1.0 / abs(lam)) == pytest.approx(1.0, abs=2.0 * abs(lam))
            ratios.append(ratio)
        assert ratios[0] < ratios[1] < ratios[2]

    def test_rv_density_length_mismatch(self, mixed_model):
        """One spec per component is required."""
        with pytest.raises(DomainError):
            spectral_density_rv(mixed_model, [SlowlyVaryingSpec.constant()], 1.0)


class TestTail:
    """Tests for tail asymptotics and the spectral cutoff."""

    def test_tail_asymptotic_ratio(self, lrd_model, cyclic_model):
        """Exact over asymptotic tends to one."""
        for model, j in ((lrd_model, 0), (cyclic_model, 1)):
            near = component_density(model, j, 50.0) / tail_asymptotic(model, j, 50.0)
            far = component_density(model, j, 100.0) / tail_asymptotic(model, j, 100.0)
            assert abs(near - 1.0) < 0.02
            assert abs(far - 1.0) < 0.03

    def test_tail_asymptotic_range(self, cyclic_model):
        """The approximant is only defined far out."""
        with pytest.raises(DomainError):
            tail_asymptotic(cyclic_model, 1, 5.0)

    def test_cutoff_bounds_tail_mass(self, mixed_model):
        """Mass beyond the cutoff is below the requested tail mass."""
        cutoff = spectral_cutoff(mixed_model, 1e-8)
        beyond = 2.0 * spectral_mass(mixed_model, cutoff, cutoff + 50.0)
        assert beyond < 1e-8

    def test_cutoff_validation(self, mixed_model):
        """tail_mass must lie in (0, 1)."""
        with pytest.raises(DomainError):
            spectral_cutoff(mixed_model, 0.0)
