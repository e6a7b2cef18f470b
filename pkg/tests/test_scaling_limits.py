"""
Test suite for FRBE laboratory - Scaling Limits
"""
import math

import numpy as np
import pytest
import sys
import os

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from scipy import special

from core.errors import DomainError, RegimeError
from core.frbe import FrbeParams, SpaceTimePoint
from core.scaling_limits import (
    ScalingRegime,
    certificate_sweep,
    check_regime,
    coupled_msd_cyclic,
    coupled_msd_lrd,
    coupled_msd_rv,
    coupling_bound,
    limit_constant_cyclic,
    limit_constant_lrd,
    limit_covariance,
    limit_covariance_cyclic,
    limit_covariance_lrd,
    make_rescaling,
    q_factor_cyclic,
    q_factor_lrd,
    variance_scaling_slope,
)
from core.scenarios import figure_model, get_model
from core.spectral_model import LongMemoryModel, SlowlyVaryingSpec, spectral_density
from utils.data_processing import ReportGenerator


class TestRegimes:
    """Tests for regime inference and hypothesis checks."""

    def test_infer(self, lrd_model, cyclic_model, rv_model):
        """Regime follows A0 and the slowly varying specs."""
        assert ScalingRegime.infer(cyclic_model) is ScalingRegime.CYCLIC
        assert ScalingRegime.infer(lrd_model) is ScalingRegime.LONG_MEMORY
        assert ScalingRegime.infer(rv_model) is ScalingRegime.LONG_MEMORY_RV

    def test_cyclic_requires_zero_a0(self, example_params, lrd_model):
        """A long-memory component rules out the cyclic limit."""
        with pytest.raises(RegimeError, match="A0 = 0"):
            check_regime("cyclic", example_params, lrd_model)

    def test_cyclic_alpha_bound(self, cyclic_model):
        """alpha <= 1/2 is rejected."""
        with pytest.raises(RegimeError, match="alpha must exceed 1/2, hypothesis of the cyclic scaling limit"):
            check_regime(ScalingRegime.CYCLIC, FrbeParams(alpha=0.4), cyclic_model)

    def test_lrd_alpha_bound(self, lrd_model):
        """alpha <= kappa0/2 is rejected."""
        with pytest.raises(RegimeError, match="alpha must exceed kappa0/2 = 0.25, hypothesis of the long-memory"):
            check_regime(ScalingRegime.LONG_MEMORY, FrbeParams(alpha=0.2), lrd_model)

    def test_lrd_requires_positive_a0(self, example_params, cyclic_model):
        """A0 = 0 rules out the long-memory limit."""
        with pytest.raises(RegimeError, match="A0 > 0"):
            check_regime(ScalingRegime.LONG_MEMORY, example_params, cyclic_model)

    def test_unknown_regime(self, example_params, lrd_model):
        """Unknown regime names raise a domain error."""
        with pytest.raises(DomainError, match="Unknown scaling regime"):
            check_regime("bogus", example_params, lrd_model)


class TestRescaling:
    """Tests for rescaling maps."""

    def test_cyclic_map(self, example_params, cyclic_model):
        """alpha = 1, beta = 1/2, eps = 1e-2."""
        rescaling = make_rescaling("cyclic", example_params, cyclic_model, 1e-2)
        assert rescaling.time_scale == pytest.approx(100.0)
        assert rescaling.space_scale == pytest.approx(10.0)
        assert rescaling.amplitude == pytest.approx(10.0 ** 0.5)
        assert rescaling.freq_scale == pytest.approx(0.1)
        assert rescaling.variance_scale == pytest.approx(1.0)

    def test_lrd_map(self, example_params, lrd_model):
        """Long-memory amplitude carries kappa0."""
        rescaling = make_rescaling("long_memory", example_params, lrd_model, 1e-2)
        assert rescaling.amplitude == pytest.approx(10.0 ** 0.25)
        assert rescaling.rv_normalizer == 1.0

    def test_rv_map_normalizer(self, exponential_params, rv_model):
        """Normalizer is L0 at the space scale."""
        rescaling = make_rescaling("long_memory_rv", exponential_params, rv_model, 1e-2)
        assert rescaling.rv_normalizer == pytest.approx(1.0 + math.log1p(100.0))
        assert rescaling.field_scale == pytest.approx(rescaling.amplitude / math.sqrt(rescaling.rv_normalizer))

    def test_eps_one_is_identity(self, example_params, lrd_model):
        """eps = 1 leaves every scale at one."""
        rescaling = make_rescaling("long_memory", example_params, lrd_model, 1.0)
        assert (rescaling.time_scale, rescaling.space_scale, rescaling.amplitude) == (1.0, 1.0, 1.0)
        point = rescaling.rescale_point(SpaceTimePoint(2.0, 3.0))
        assert (point.t, point.x) == (2.0, 3.0)

    def test_eps_range(self, example_params, lrd_model):
        """eps outside (0, 1] is rejected."""
        for eps in (0.0, 1.5):
            with pytest.raises(DomainError, match="eps"):
                make_rescaling("long_memory", example_params, lrd_model, eps)


class TestLimitConstants:
    """Tests for the limit constants."""

    def test_cyclic_constant_is_density_at_origin(self, cyclic_model, catalog):
        """Constant equals f(0) on presets and random cyclic models."""
        models = [cyclic_model, catalog.get_model("cyclic_two")]
        rng = np.random.default_rng(7)
        for _ in range(5):
            freqs = np.sort(rng.uniform(0.5, 3.0, size=2))
            kappas = rng.uniform(0.1, 0.9, size=2)
            amps = rng.dirichlet([1.0, 1.0])
            amps[-1] = 1.0 - amps[0]
            models.append(LongMemoryModel.from_triples(
                [(float(a), float(w), float(k)) for a, w, k in zip(amps, freqs, kappas)]))
        for model in models:
            assert limit_constant_cyclic(model) == pytest.approx(spectral_density(model, 0.0), rel=1e-10)

    def test_cyclic_constant_is_linear(self):
        """Equal weights average the single-pair constants."""
        both = LongMemoryModel.from_triples([(0.5, 1.0, 0.5), (0.5, 2.0, 0.5)])
        one = LongMemoryModel.from_triples([(1.0, 1.0, 0.5)])
        two = LongMemoryModel.from_triples([(1.0, 2.0, 0.5)])
        expected = 0.5 * limit_constant_cyclic(one) + 0.5 * limit_constant_cyclic(two)
        assert limit_constant_cyclic(both) == pytest.approx(expected, rel=1e-14)

    def test_cyclic_constant_rejects_long_memory(self, lrd_model):
        """A0 > 0 has no cyclic constant."""
        with pytest.raises(RegimeError):
            limit_constant_cyclic(lrd_model)

    def test_lrd_constant(self, lrd_model):
        """A0 c2(kappa0) / 2 with the zero-frequency indicator."""
        assert limit_constant_lrd(lrd_model) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), rel=1e-14)


class TestLimitCovariance:
    """Tests for the limit covariance integrals against closed forms."""

    def test_cyclic_closed_forms(self, exponential_params, cyclic_model):
        """beta = alpha = mu = 1 with unit constant: 2 (t + t2) / ((t + t2)^2 + h^2)."""
        value = limit_covariance_cyclic(exponential_params, cyclic_model, 1.0, 1.0, 0.0, 0.0, constant=1.0)
        assert value == pytest.approx(1.0, rel=1e-6)
        value = limit_covariance_cyclic(exponential_params, cyclic_model, 1.0, 2.0, 0.0, 0.0, constant=1.0)
        assert value == pytest.approx(2.0 / 3.0, rel=1e-6)
        value = limit_covariance_cyclic(exponential_params, cyclic_model, 1.0, 1.0, 0.0, 2.5, constant=1.0)
        assert value == pytest.approx(4.0 / (4.0 + 2.5 ** 2), rel=1e-6)

    def test_cyclic_default_constant(self, exponential_params, cyclic_model):
        """Default constant multiplies the unit-constant value."""
        unit = limit_covariance_cyclic(exponential_params, cyclic_model, 1.0, 1.0, 0.0, 1.0, constant=1.0)
        value = limit_covariance_cyclic(exponential_params, cyclic_model, 1.0, 1.0, 0.0, 1.0)
        assert value == pytest.approx(limit_constant_cyclic(cyclic_model) * unit, rel=1e-12)

    def test_lrd_closed_forms(self, exponential_params, lrd_model):
        """int lam^(-1/2) e^(-(t + t2) lam) = Gamma(1/2) / sqrt(t + t2)."""
        value = limit_covariance_lrd(exponential_params, lrd_model, 1.0, 1.0, 0.0, 0.0, prefactor=1.0)
        assert value == pytest.approx(math.sqrt(math.pi) / math.sqrt(2.0), rel=1e-6)
        value = limit_covariance_lrd(exponential_params, lrd_model, 1.0, 4.0, 0.0, 0.0, prefactor=1.0)
        assert value == pytest.approx(math.sqrt(math.pi) / math.sqrt(5.0), rel=1e-6)

    def test_lrd_default_prefactor(self, exponential_params, lrd_model):
        """Default prefactor is twice the limit constant."""
        unit = limit_covariance_lrd(exponential_params, lrd_model, 1.0, 2.0, 0.0, 0.5, prefactor=1.0)
        value = limit_covariance_lrd(exponential_params, lrd_model, 1.0, 2.0, 0.0, 0.5)
        assert value == pytest.approx(2.0 * limit_constant_lrd(lrd_model) * unit, rel=1e-12)

    def test_lrd_continuity_in_kappa(self, exponential_params):
        """Gamma(kappa) / 2^kappa, approaching the unit cyclic integral as kappa -> 1."""
        for kappa in (0.95, 0.99):
            value = limit_covariance_lrd(exponential_params, figure_model(kappa), 1.0, 1.0, 0.0, 0.0,
                                         prefactor=1.0)
            assert value == pytest.approx(special.gamma(kappa) / 2.0 ** kappa, rel=1e-6)
            assert abs(value - 0.5) < 0.05

    def test_lrd_small_kappa_closed_forms(self, exponential_params):
        """int lam^(kappa - 1) e^(-(1 + t2) lam) = Gamma(kappa) / (1 + t2)^kappa for small kappa."""
        for kappa in (0.05, 0.1, 0.2):
            model = figure_model(kappa)
            for t2 in (1.0, 3.0, 4.0, 10.0):
                value = limit_covariance_lrd(exponential_params, model, 1.0, t2, 0.0, 0.0, prefactor=1.0)
                assert value == pytest.approx(special.gamma(kappa) / (1.0 + t2) ** kappa, rel=1e-6)

    def test_lrd_time_curve_small_kappa(self, example_params):
        """kappa0 = 0.2 curve against t' in 1..20 is finite, positive and decays."""
        model = figure_model(0.2)
        values = np.array([
            limit_covariance_lrd(example_params, model, 1.0, float(tp), 1.0, 0.0, prefactor=1.0)
            for tp in range(1, 21)
        ])
        assert np.all(np.isfinite(values))
        assert np.all(values > 0)
        assert values[-1] < values[0]

    def test_lrd_decays_in_time(self, example_params, lrd_model):
        """Covariance with (1, 0) decreases in t2."""
        values = [limit_covariance_lrd(example_params, lrd_model, 1.0, t2, 0.0, 0.0, prefactor=1.0)
                  for t2 in (1.0, 2.0, 4.0)]
        assert values[0] > values[1] > values[2] > 0

    def test_dispatch(self, example_params, cyclic_model):
        """limit_covariance picks the regime's formula."""
        p, q = SpaceTimePoint(1.0, 0.0), SpaceTimePoint(2.0, 1.0)
        expected = limit_covariance_cyclic(example_params, cyclic_model, 1.0, 2.0, 0.0, 1.0)
        assert limit_covariance("cyclic", example_params, cyclic_model, p, q) == expected

    def test_regime_checked(self, lrd_model):
        """Limit covariance refuses parameters outside the regime."""
        with pytest.raises(RegimeError):
            limit_covariance_lrd(FrbeParams(alpha=0.2), lrd_model, 1.0, 1.0, 0.0, 0.0)


class TestQFactors:
    """Tests for the spectral ratio functions."""

    def test_cyclic_q_factor(self, example_params, cyclic_model):
        """Q_eps(lam) tends to sqrt(f(0))."""
        target = math.sqrt(spectral_density(cyclic_model, 0.0))
        for lam in (0.5, 1.0, 2.0):
            value = q_factor_cyclic(example_params, cyclic_model, 1e-6, 1.0, lam)
            assert value == pytest.approx(target, rel=1e-3)

    def test_lrd_q_factor(self, exponential_params, lrd_model):
        """Q~_eps(lam) tends to one."""
        assert q_factor_lrd(exponential_params, lrd_model, 1e-6, 1.0, 1.0) == pytest.approx(1.0, abs=1e-3)


class TestCertificates:
    """Tests for coupled mean-square distances."""

    @pytest.fixture(scope="class")
    def cyclic_sweep(self):
        """Cyclic certificate over the default eps grid."""
        return certificate_sweep("cyclic", FrbeParams(alpha=1.0, beta=0.5), get_model("cyclic_w1"))

    def test_sweep_frame(self, cyclic_sweep):
        """Columns and ordering of the sweep."""
        assert list(cyclic_sweep.columns) == ["eps", "t", "msd"]
        assert cyclic_sweep["eps"].tolist() == [1e-1, 1e-2, 1e-3, 1e-4]

    def test_cyclic_decreasing(self, cyclic_sweep):
        """Cyclic distances shrink with eps."""
        summary = ReportGenerator.certificate_summary(cyclic_sweep)[1.0]
        assert summary["decreasing"]
        assert summary["ratio"] < 0.05

    def test_sweep_matches_single_call(self, cyclic_sweep, cyclic_model):
        """Sweep entries equal direct evaluations."""
        direct = coupled_msd_cyclic(FrbeParams(alpha=1.0, beta=0.5), cyclic_model, 1e-2, 1.0)
        assert cyclic_sweep["msd"].iloc[1] == pytest.approx(direct, rel=1e-12)

    def test_lrd_decreasing(self, exponential_params, lrd_model):
        """Long-memory distances shrink with eps."""
        sweep = certificate_sweep(ScalingRegime.LONG_MEMORY, exponential_params, lrd_model, workers=2)
        msd = sweep["msd"].to_numpy()
        assert np.all(np.diff(msd) < 0)
        assert msd[-1] / msd[0] < 0.05

    @pytest.mark.parametrize("beta, bound", [(1.0, 0.01), (0.5, 0.05)])
    def test_mixed_model_decreasing(self, mixed_model, beta, bound):
        """Long memory plus cyclic pairs: the cyclic terms do not spoil the rate."""
        sweep = certificate_sweep(ScalingRegime.LONG_MEMORY, FrbeParams(alpha=1.0, beta=beta), mixed_model)
        msd = sweep["msd"].to_numpy()
        assert np.all(msd > 0)
        assert np.all(np.diff(msd) < 0)
        assert msd[-1] / msd[0] < bound

    def test_rv_decreasing(self, exponential_params, rv_model):
        """Logarithmic slowly varying factor: slower, but still monotone."""
        sweep = certificate_sweep(ScalingRegime.LONG_MEMORY_RV, exponential_params, rv_model)
        msd = sweep["msd"].to_numpy()
        assert np.all(np.diff(msd) < 0)
        assert msd[-1] / msd[0] < 0.25

    def test_rv_with_constant_factor_equals_lrd(self, exponential_params, lrd_model):
        """Constant L cancels against its normalizer."""
        lrd = coupled_msd_lrd(exponential_params, lrd_model, 1e-2, 1.0)
        unit = coupled_msd_rv(exponential_params, lrd_model, [SlowlyVaryingSpec.constant()], 1e-2, 1.0)
        scaled = coupled_msd_rv(exponential_params, lrd_model, [SlowlyVaryingSpec.constant(3.0)], 1e-2, 1.0)
        assert unit == pytest.approx(lrd, rel=1e-12)
        assert scaled == pytest.approx(lrd, rel=1e-8)

    def test_coupling_bound(self):
        """sqrt(Rp)(sqrt(Vq) + sqrt(Rq)) + sqrt(Vp) sqrt(Rq)."""
        assert coupling_bound(0.0, 0.0, 1.0, 1.0) == 0.0
        assert coupling_bound(0.01, 0.04, 1.0, 1.0) == pytest.approx(0.32)


class TestVarianceScaling:
    """Tests for the variance-scaling slope."""

    def test_lrd_slope(self, exponential_params, lrd_model):
        """Slope approaches -kappa0 beta / alpha."""
        result = variance_scaling_slope(exponential_params, lrd_model, times=np.logspace(2, 4, 5))
        assert result["expected_slope"] == pytest.approx(-0.5)
        assert result["relative_error"] < 0.05
        assert np.all(np.diff(result["variances"]) < 0)

    def test_requires_long_memory(self, exponential_params, cyclic_model):
        """Cyclic models have no long-memory slope."""
        with pytest.raises(RegimeError):
            variance_scaling_slope(exponential_params, cyclic_model)
