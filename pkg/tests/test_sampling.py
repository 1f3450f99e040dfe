"""
Tests for the samplers
"""

import math

import numpy as np
import pytest
from scipy import integrate, stats

from src.bayes.priors import HypothesisKind, PerturbationConfig, PriorSpec, compute_p0
from src.circular import sampling
from src.circular.models import GvMParams, VM2Params, VMParams, gvm_log_density, vm2_log_density, vm_log_density
from src.circular.sampling import (
    MixtureVM2Prior,
    RejectionStats,
    RngSeed,
    UniformPrior,
    gvm_acceptance_rate,
    sample_gvm,
    sample_gvm_stratified,
    sample_mixture_vm2,
    sample_uniform,
    sample_vm,
    sample_vm2,
)
from src.circular.special_functions import bessel_ratio
from src.utils.exceptions import DomainError, RejectionCapError

DRAWS = 1_000_000
BINS = 64


def bin_probabilities(log_density, lo: float, hi: float) -> np.ndarray:
    edges = np.linspace(lo, hi, BINS + 1)
    probs = np.array([integrate.quad(lambda t: math.exp(log_density(t)), a, b, epsabs=1e-13)[0]
                      for a, b in zip(edges[:-1], edges[1:])])
    return probs / probs.sum()


def binned_chisquare(draws: np.ndarray, log_density, lo: float, hi: float) -> float:
    """p-value of a chi-square test against quadrature-binned probabilities"""
    observed, _ = np.histogram(draws, np.linspace(lo, hi, BINS + 1))
    expected = bin_probabilities(log_density, lo, hi) * draws.size
    return stats.chisquare(observed, expected).pvalue


def near(draws: np.ndarray, point: float, eps: float) -> float:
    """Fraction of draws within eps/2 of point on the circle of circumference pi"""
    d = np.abs(draws - point) % math.pi
    return float(np.mean(np.minimum(d, math.pi - d) <= eps / 2))


class TestRngSeed:
    """Test stream derivation"""

    def test_same_keys_same_stream(self):
        """Test the same seed and keys reproduce the same draws"""
        a = sample_vm(VMParams(1.0, 2.0), RngSeed(7).generator(0, 3, 1), 10)
        b = sample_vm(VMParams(1.0, 2.0), RngSeed(7).generator(0, 3, 1), 10)
        np.testing.assert_array_equal(a, b)

    def test_different_keys_differ(self):
        """Test streams that differ in one key give different draws"""
        a = RngSeed(7).generator(0, 3, 0).random(5)
        b = RngSeed(7).generator(0, 3, 1).random(5)
        assert not np.array_equal(a, b)

    def test_invalid_seed(self):
        """Test a negative seed is rejected"""
        with pytest.raises(DomainError):
            RngSeed(-1)


class TestVonMises:
    """Test the Best-Fisher sampler"""

    def test_scalar_draw(self, rng):
        """Test omitting the size returns one float in [0, 2*pi)"""
        value = sample_vm(VMParams(1.0, 2.0), rng)
        assert isinstance(value, float)
        assert 0 <= value < 2 * math.pi

    def test_tiny_kappa_is_uniform(self, rng):
        """Test a vanishing concentration gives uniform draws"""
        draws = sample_vm(VMParams(0.0, 1e-12), rng, DRAWS)
        assert stats.kstest(draws / (2 * math.pi), "uniform").pvalue > 0.001

    def test_first_moment(self, rng):
        """Test the circular mean of vM(pi, 0.1) is pi within four standard errors"""
        draws = sample_vm(VMParams(math.pi, 0.1), rng, DRAWS)
        se = 1 / math.sqrt(draws.size)
        assert np.mean(np.cos(draws)) == pytest.approx(-bessel_ratio(1, 0.1), abs=4 * se)
        assert np.mean(np.sin(draws)) == pytest.approx(0.0, abs=4 * se)

    @pytest.mark.parametrize("params", [
        VMParams(1.0, 2.0), VMParams(5.0, 0.3), VMParams(0.1, 30.0), VMParams(math.pi, 0.1), VMParams(3.7, 8.0),
    ])
    def test_goodness_of_fit(self, rng, params):
        """Test a 64-bin chi-square against the vM density passes at the 0.001 level"""
        draws = sample_vm(params, rng, DRAWS)
        assert binned_chisquare(draws, lambda t: vm_log_density(t, params), 0, 2 * math.pi) > 0.001


class TestAxialVonMises:
    """Test vM2 draws by angle halving"""

    @pytest.mark.parametrize("params", [
        VM2Params(0.4, 5.0), VM2Params(0.0, 50.0), VM2Params(math.pi / 2, 1.0),
        VM2Params(2.9, 0.2), VM2Params(1.2, 20.0),
    ])
    def test_range_and_fit(self, rng, params):
        """Test vM2 draws lie in [0, pi) and pass a 64-bin chi-square"""
        draws = sample_vm2(params, rng, DRAWS)
        assert np.all((draws >= 0) & (draws < math.pi))
        assert binned_chisquare(draws, lambda t: vm2_log_density(t, params), 0, math.pi) > 0.001

    @pytest.mark.parametrize("tau,mass", [(250.0, 0.570), (50.0, 0.276), (20.0, 0.176)])
    def test_neighbourhood_mass(self, rng, tau, mass):
        """Test the share of vM2(0, tau) draws within 0.025 of zero matches the published mass"""
        draws = sample_vm2(VM2Params(0.0, tau), rng, DRAWS)
        assert near(draws, 0.0, 0.05) == pytest.approx(mass, abs=0.003)


class TestGeneralizedVonMises:
    """Test the vM-envelope rejection sampler"""

    @pytest.mark.parametrize("params", [
        GvMParams(math.pi, 0.0, 0.1, 5.5),
        GvMParams(4.095, 0.869, 0.304, 1.910),
        GvMParams(1.0, 2.5, 1.5, 0.8),
        GvMParams(math.pi, math.pi / 2, 0.1, 0.4),
        GvMParams(0.5, 1.3, 4.0, 2.0),
    ])
    def test_goodness_of_fit(self, rng, params):
        """Test a 64-bin chi-square against the GvM density passes at the 0.001 level"""
        draws = sample_gvm(params, rng, DRAWS)
        assert binned_chisquare(draws, lambda t: gvm_log_density(t, params), 0, 2 * math.pi) > 0.001

    def test_tiny_kappa2_matches_vm(self, rng):
        """Test a GvM with vanishing kappa2 is indistinguishable from its vM part"""
        gvm = sample_gvm(GvMParams(2.0, 0.5, 1.2, 1e-12), rng, 50_000)
        vm = sample_vm(VMParams(2.0, 1.2), rng, 50_000)
        assert stats.ks_2samp(gvm, vm).pvalue > 0.001

    def test_second_moment(self, rng):
        """Test the second trigonometric moment matches quadrature within four standard errors"""
        params = GvMParams(math.pi, 0.0, 0.1, 5.5)
        draws = sample_gvm(params, rng, DRAWS)
        theta = np.arange(8192) * (2 * math.pi / 8192)
        weights = np.exp(gvm_log_density(theta, params))
        oracle = np.mean(weights * np.cos(2 * theta)) * 2 * math.pi
        se = np.std(np.cos(2 * draws)) / math.sqrt(draws.size)
        assert np.mean(np.cos(2 * draws)) == pytest.approx(oracle, abs=4 * se)

    def test_acceptance_rate(self, rng):
        """Test the observed acceptance rate is within 5% of its closed form"""
        params = GvMParams(math.pi, 0.0, 0.1, 5.5)
        rejection = RejectionStats()
        sample_gvm(params, rng, 200_000, stats=rejection)
        exact = gvm_acceptance_rate(params)
        assert rejection.accepted == 200_000
        assert rejection.rate == pytest.approx(exact, rel=0.05)

    def test_rejection_cap(self, rng, monkeypatch):
        """Test a hopeless target raises once the consecutive-rejection cap is reached"""
        monkeypatch.setattr(sampling, "MAX_CONSECUTIVE_REJECTIONS", 1000)
        with pytest.raises(RejectionCapError):
            sample_gvm(GvMParams(0.0, math.pi / 2, 100.0, 30.0), rng, 10)


class TestStratifiedGvM:
    """Test stratified inverse-CDF draws"""

    PARAMS = GvMParams(4.095, 0.869, 0.304, 1.910)

    def test_bin_counts_track_probabilities(self, rng):
        """Test every bin holds its expected count to within two draws"""
        n = 20_000
        draws = sample_gvm_stratified(self.PARAMS, rng, n)
        observed, _ = np.histogram(draws, np.linspace(0, 2 * math.pi, BINS + 1))
        expected = bin_probabilities(lambda t: gvm_log_density(t, self.PARAMS), 0, 2 * math.pi) * n
        assert np.max(np.abs(observed - expected)) <= 2.0

    def test_draws_are_shuffled_and_in_range(self, rng):
        """Test draws lie in [0, 2*pi) and do not come out sorted"""
        draws = sample_gvm_stratified(self.PARAMS, rng, 1000)
        assert np.all((draws >= 0) & (draws < 2 * math.pi))
        assert not np.all(np.diff(draws) >= 0)

    def test_reproducible_per_stream(self):
        """Test the same stream reproduces the same draws"""
        a = sample_gvm_stratified(self.PARAMS, RngSeed(4).generator(0), 100)
        b = sample_gvm_stratified(self.PARAMS, RngSeed(4).generator(0), 100)
        np.testing.assert_array_equal(a, b)

    def test_negative_size(self, rng):
        """Test a negative size is rejected"""
        with pytest.raises(DomainError):
            sample_gvm_stratified(self.PARAMS, rng, -1)


class TestPriorSamplers:
    """Test the mixture and uniform priors"""

    def test_mixture_weight_one_is_first_component(self):
        """Test weight one reproduces the first component's stream exactly"""
        comp1, comp2 = VM2Params(0.0, 250.0), VM2Params(math.pi / 2, 250.0)
        a = sample_mixture_vm2(MixtureVM2Prior(1.0, comp1, comp2), RngSeed(3).generator(), 100)
        b = sample_vm2(comp1, RngSeed(3).generator(), 100)
        np.testing.assert_array_equal(a, b)

    @pytest.mark.parametrize("prior", [
        MixtureVM2Prior(0.5, VM2Params(0.0, 20.0), VM2Params(math.pi / 2, 20.0)),
        MixtureVM2Prior(0.5, VM2Params(0.0, 2.0), VM2Params(math.pi / 2, 2.0)),
        MixtureVM2Prior(0.3, VM2Params(0.4, 5.0), VM2Params(2.0, 1.0)),
        MixtureVM2Prior(0.8, VM2Params(1.0, 0.5), VM2Params(3.0, 10.0)),
        MixtureVM2Prior(0.5, VM2Params(0.0, 250.0), VM2Params(math.pi / 2, 50.0)),
    ])
    def test_mixture_goodness_of_fit(self, rng, prior):
        """Test a 64-bin chi-square against the mixture density passes at the 0.001 level"""
        draws = sample_mixture_vm2(prior, rng, DRAWS)
        assert np.all((draws >= 0) & (draws < math.pi))
        assert binned_chisquare(draws, prior.log_density, 0, math.pi) > 0.001

    @pytest.mark.parametrize("tau,mass", [(250.0, 0.285), (20.0, 0.088)])
    def test_mixture_masses(self, rng, tau, mass):
        """Test each atom neighbourhood of the S-case mixtures holds the published mass"""
        prior = MixtureVM2Prior(0.5, VM2Params(0.0, tau), VM2Params(math.pi / 2, tau))
        draws = sample_mixture_vm2(prior, rng, DRAWS)
        assert near(draws, 0.0, 0.05) == pytest.approx(mass, abs=0.003)
        assert near(draws, math.pi / 2, 0.05) == pytest.approx(mass, abs=0.003)

    def test_empirical_mass_matches_quadrature(self, rng):
        """Test the empirical neighbourhood share matches compute_p0 within 0.002"""
        prior = PriorSpec.vm2(0.0, 50.0)
        p0 = compute_p0(prior, PerturbationConfig(0.05, HypothesisKind.NO_SHIFT)).p0
        draws = sample_vm2(prior.component, rng, DRAWS)
        assert near(draws, 0.0, 0.05) == pytest.approx(p0, abs=0.002)

    def test_mixture_weight_range(self):
        """Test a mixture weight above one is rejected"""
        with pytest.raises(DomainError):
            MixtureVM2Prior(1.5, VM2Params(0.0, 1.0), VM2Params(1.0, 1.0))

    def test_uniform(self, rng):
        """Test uniform draws stay in range and the density is flat inside and zero outside"""
        prior = UniformPrior(0.0, 0.5)
        draws = sample_uniform(prior, rng, 10_000)
        assert draws.min() >= 0 and draws.max() <= 0.5
        assert prior.log_density(0.25) == pytest.approx(math.log(2.0))
        assert prior.log_density(0.6) == -math.inf
        with pytest.raises(DomainError):
            UniformPrior(1.0, 1.0)
