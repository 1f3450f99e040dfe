"""
Tests for the likelihoods and the maximum-likelihood fit
"""

import math

import numpy as np
import pytest

from src.circular.models import (
    LOG_TWO_PI,
    GvMParams,
    VMParams,
    circular_distance_pi,
    gvm_log_density,
    vm_log_density,
)
from src.circular.sampling import RngSeed, sample_gvm, sample_vm
from src.data.synthetic import WIND_PARAMS, synthetic_wind_sample
from src.inference.likelihood import FixedNuisance, Sample, gvm_loglik, loglik_delta, loglik_kappa2
from src.inference.mle import (
    GRADIENT_TOL,
    MLEFit,
    fit_mle,
    influence_scores,
    loglik_gradient,
    standard_errors,
    trim_influential,
)
from src.utils.exceptions import DomainError, InsufficientDataError, MissingNuisanceError
from src.utils.records import parse_record


def circular_gap(a: float, b: float) -> float:
    d = abs(a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


def parameter_errors(p: GvMParams, truth: GvMParams) -> np.ndarray:
    """Componentwise distance of (mu1, mu2, kappa1, kappa2) from the truth"""
    return np.array([
        circular_gap(p.mu1, truth.mu1),
        circular_distance_pi(p.mu2, truth.mu2),
        abs(p.kappa1 - truth.kappa1),
        abs(p.kappa2 - truth.kappa2),
    ])


def finite_difference_gradient(sample: Sample, p: GvMParams, step: float = 1e-6) -> np.ndarray:
    """Central differences of the total log-likelihood in (mu1, mu2, kappa1, kappa2)"""
    x = np.array([p.mu1, p.mu2, p.kappa1, p.kappa2])
    grad = np.empty(4)
    for i in range(4):
        e = np.zeros(4)
        e[i] = step
        grad[i] = (gvm_loglik(sample, *(x + e)) - gvm_loglik(sample, *(x - e))) / (2 * step)
    return grad


@pytest.fixture(scope="module")
def wind_sample():
    return synthetic_wind_sample()


@pytest.fixture(scope="module")
def wind_fit(wind_sample):
    return fit_mle(wind_sample)


class TestSample:
    """Test the sample container"""

    def test_reduction(self):
        """Test raw angles are reduced into [0, 2*pi)"""
        sample = Sample([-math.pi / 2, 7.0])
        np.testing.assert_allclose(sample.angles, [1.5 * math.pi, 7.0 - 2 * math.pi])
        assert sample.n == len(sample) == 2

    def test_angles_are_read_only(self):
        """Test the stored angles cannot be modified in place"""
        sample = Sample([0.1, 0.2])
        with pytest.raises(ValueError):
            sample.angles[0] = 1.0

    def test_rejects_non_finite(self):
        """Test a NaN angle is rejected"""
        with pytest.raises(DomainError):
            Sample([0.1, float("nan")])

    def test_degrees_and_concat(self):
        """Test building a sample from degrees and joining two samples"""
        a = Sample.from_degrees([90.0, 180.0])
        b = Sample([0.5])
        np.testing.assert_allclose(a.angles, [math.pi / 2, math.pi])
        assert a.concat(b).n == 3

    def test_empty_sample(self):
        """Test an empty sample has a zero resultant and a flat log-likelihood"""
        sample = Sample([])
        assert sample.n == 0
        assert sample.resultant(1) == 0j
        assert gvm_loglik(sample, 1.0, 0.5, 2.0, 3.0) == 0.0


class TestLikelihood:
    """Test the sufficient-statistic likelihoods"""

    def test_matches_density_sum(self, rng):
        """Test the log-likelihood equals the sum of pointwise log densities"""
        params = GvMParams(4.095, 0.869, 0.304, 1.910)
        sample = Sample(sample_gvm(params, rng, 300))
        direct = float(np.sum(gvm_log_density(sample.angles, params)))
        assert gvm_loglik(sample, *vars(params).values()) == pytest.approx(direct, rel=1e-10)

    def test_uniform_limit(self, rng):
        """Test vanishing concentrations give the circular uniform log-likelihood"""
        sample = Sample(rng.uniform(0, 2 * math.pi, 40))
        assert gvm_loglik(sample, 0.3, 0.2, 1e-14, 1e-14) == pytest.approx(-40 * LOG_TWO_PI, rel=1e-12)

    def test_additive_over_samples(self, rng):
        """Test the log-likelihood of two joined samples is the sum of their log-likelihoods"""
        a = Sample(rng.uniform(0, 2 * math.pi, 30))
        b = Sample(rng.uniform(0, 2 * math.pi, 20))
        args = (1.0, 2.5, 1.5, 0.8)
        joint = gvm_loglik(a.concat(b), *args)
        assert joint == pytest.approx(gvm_loglik(a, *args) + gvm_loglik(b, *args), rel=1e-12)

    def test_kappa2_zero_is_von_mises(self, rng, kappa2_nuisance):
        """Test kappa2' = 0 reproduces the von Mises log-likelihood"""
        sample = Sample(sample_vm(VMParams(math.pi, 2.0), rng, 100))
        expected = float(np.sum(vm_log_density(sample.angles, VMParams(math.pi, 0.1))))
        assert loglik_kappa2(sample, 0.0, kappa2_nuisance) == pytest.approx(expected, rel=1e-12)

    def test_vectorized_delta(self, rng, delta_nuisance):
        """Test an array of delta values gives the same values as scalar calls"""
        sample = Sample(rng.uniform(0, 2 * math.pi, 50))
        grid = np.linspace(0, math.pi, 9)
        values = loglik_delta(sample, grid, delta_nuisance)
        assert values.shape == grid.shape
        for d, v in zip(grid, values):
            assert v == pytest.approx(loglik_delta(sample, float(d), delta_nuisance), rel=1e-12)

    def test_vectorized_kappa2(self, rng, kappa2_nuisance):
        """Test an array of kappa2 values gives the same values as scalar calls"""
        sample = Sample(rng.uniform(0, 2 * math.pi, 50))
        grid = np.linspace(0, 0.5, 6)
        values = loglik_kappa2(sample, grid, kappa2_nuisance)
        for k, v in zip(grid, values):
            assert v == pytest.approx(loglik_kappa2(sample, float(k), kappa2_nuisance), rel=1e-12)

    def test_delta_is_pi_periodic(self, rng, delta_nuisance):
        """Test shifting delta by pi leaves the log-likelihood unchanged"""
        sample = Sample(rng.uniform(0, 2 * math.pi, 50))
        assert loglik_delta(sample, 0.3, delta_nuisance) == pytest.approx(
            loglik_delta(sample, 0.3 + math.pi, delta_nuisance), rel=1e-12)

    def test_true_delta_dominates(self, rng, delta_nuisance):
        """Test data generated at delta = 0 favour delta = 0 over delta = pi/2"""
        params = delta_nuisance.params_at_delta(0.0)
        sample = Sample(sample_gvm(params, rng, 500))
        assert loglik_delta(sample, 0.0, delta_nuisance) > loglik_delta(sample, math.pi / 2, delta_nuisance)

    def test_missing_nuisance(self, rng, delta_nuisance, kappa2_nuisance):
        """Test each likelihood rejects nuisance values meant for the other test"""
        sample = Sample(rng.uniform(0, 2 * math.pi, 10))
        with pytest.raises(MissingNuisanceError):
            loglik_delta(sample, 0.1, kappa2_nuisance)
        with pytest.raises(MissingNuisanceError):
            loglik_kappa2(sample, 0.1, delta_nuisance)

    def test_negative_kappa2(self, rng, kappa2_nuisance):
        """Test a negative kappa2' is rejected"""
        sample = Sample(rng.uniform(0, 2 * math.pi, 10))
        with pytest.raises(DomainError):
            loglik_kappa2(sample, -0.1, kappa2_nuisance)

    def test_nuisance_reduction(self):
        """Test nuisance locations are reduced and delta0 follows from them"""
        nuis = FixedNuisance.for_kappa2_test(3 * math.pi, 1.5 * math.pi, 0.1)
        assert nuis.mu1_0 == pytest.approx(math.pi)
        assert nuis.mu2_0 == pytest.approx(math.pi / 2)
        assert nuis.delta0 == pytest.approx(math.pi / 2)


class TestGradient:
    """Test the analytic gradient and the standard errors"""

    def test_matches_finite_differences(self, rng):
        """Test the analytic gradient agrees with central differences away from the optimum"""
        params = GvMParams(1.0, 2.5, 1.5, 0.8)
        sample = Sample(rng.uniform(0, 2 * math.pi, 300))
        np.testing.assert_allclose(loglik_gradient(sample, params),
                                   finite_difference_gradient(sample, params), rtol=1e-5, atol=1e-4)

    def test_standard_errors_shrink_with_n(self):
        """Test standard errors are positive and scale as one over root n"""
        small = standard_errors(WIND_PARAMS, 500)
        large = standard_errors(WIND_PARAMS, 5000)
        assert np.all(small > 0)
        np.testing.assert_allclose(small / large, math.sqrt(10), rtol=1e-9)

    def test_standard_errors_need_data(self):
        """Test standard errors are refused for an empty sample"""
        with pytest.raises(DomainError):
            standard_errors(WIND_PARAMS, 0)


class TestFitMLE:
    """Test the maximum-likelihood fit"""

    def test_recovers_wind_parameters(self, wind_fit):
        """Test the bundled wind fixture refits within 0.15 of its generating values"""
        assert wind_fit.converged
        assert np.all(parameter_errors(wind_fit.params, WIND_PARAMS) < 0.15)

    def test_converged_fit_has_zero_gradient(self, wind_sample, wind_fit):
        """Test a converged fit is a stationary point of the total log-likelihood"""
        assert wind_fit.gradient_norm <= GRADIENT_TOL
        assert np.linalg.norm(loglik_gradient(wind_sample, wind_fit.params)) <= GRADIENT_TOL
        assert np.linalg.norm(finite_difference_gradient(wind_sample, wind_fit.params)) <= 1e-5

    def test_fit_beats_truth(self, wind_sample, wind_fit):
        """Test the fitted log-likelihood is at least that of the generating values"""
        truth = gvm_loglik(wind_sample, *vars(WIND_PARAMS).values())
        assert wind_fit.log_likelihood >= truth - 1e-9

    def test_trace_is_monotone(self, wind_fit):
        """Test the recorded mean log-likelihood never decreases during the search"""
        trace = np.asarray(wind_fit.trace)
        assert trace.size > 0
        assert np.all(np.diff(trace) >= -1e-12)

    def test_permutation_invariance(self, wind_sample, wind_fit):
        """Test shuffling the angles does not move the fit"""
        shuffled = Sample(np.random.default_rng(1).permutation(wind_sample.angles))
        other = fit_mle(shuffled)
        for a, b in zip(vars(wind_fit.params).values(), vars(other.params).values()):
            assert a == pytest.approx(b, abs=1e-6)

    def test_von_mises_data_has_small_kappa2(self):
        """Test von Mises data fit kappa2 below 0.1 in at least 90% of 20 replicates"""
        small = 0
        for seed in range(20):
            sample = Sample(sample_vm(VMParams(math.pi, 2.0), RngSeed(11).generator(seed), 5000))
            fit = fit_mle(sample)
            assert circular_gap(fit.params.mu1, math.pi) < 0.1
            small += fit.params.kappa2 <= 0.1
        assert small >= 18

    def test_too_few_angles(self):
        """Test a fit needs at least four angles"""
        with pytest.raises(InsufficientDataError):
            fit_mle(Sample([0.1, 0.2, 0.3]))

    def test_record_round_trip(self, wind_fit):
        """Test a fit survives writing and parsing its record"""
        restored = MLEFit.from_record(parse_record(wind_fit.to_record()))
        assert restored.params == wind_fit.params
        assert restored.log_likelihood == wind_fit.log_likelihood
        assert restored.converged is wind_fit.converged
        assert restored.n == 5000

    def test_wrong_record_kind(self):
        """Test parsing a record of another kind as a fit fails"""
        with pytest.raises(DomainError):
            MLEFit.from_record({"record": "density"})


@pytest.mark.slow
class TestFitReplicates:
    """Test the fit over 50 replicate samples of the wind model"""

    REPLICATES = 50

    def test_wind_fixture_recovery_rate(self):
        """Test at least 90% of stratified wind fixtures refit within 0.15 componentwise"""
        within = sum(
            bool(np.all(parameter_errors(fit_mle(synthetic_wind_sample(seed)).params, WIND_PARAMS) < 0.15))
            for seed in range(self.REPLICATES)
        )
        assert within >= 0.9 * self.REPLICATES

    def test_independent_draws_scatter_as_predicted(self, record_property):
        """Test independent-draw fits stay within 3.5 standard errors of the truth"""
        se = standard_errors(WIND_PARAMS, 5000)
        inside = within_015 = 0
        for seed in range(self.REPLICATES):
            sample = Sample(sample_gvm(WIND_PARAMS, RngSeed(seed).generator(7), 5000))
            errors = parameter_errors(fit_mle(sample).params, WIND_PARAMS)
            inside += bool(np.all(errors <= 3.5 * se))
            within_015 += bool(np.all(errors < 0.15))
        record_property("within_0.15_rate", within_015 / self.REPLICATES)
        assert inside >= 0.9 * self.REPLICATES


class TestTrimming:
    """Test leave-one-out influence and the removal of influential points"""

    @pytest.fixture
    def contaminated(self, rng):
        clean = sample_vm(VMParams(0.0, 10.0), rng, 200)
        return Sample(np.concatenate([clean, np.full(3, math.pi / 2)]))

    @pytest.fixture
    def contaminated_fit(self, contaminated):
        return fit_mle(contaminated)

    def test_outliers_are_most_influential(self, contaminated, contaminated_fit):
        """Test the three planted outliers carry the three largest influence scores"""
        scores = influence_scores(contaminated, contaminated_fit)
        assert set(np.argsort(scores)[-3:]) == {200, 201, 202}

    def test_removes_outliers(self, contaminated, contaminated_fit):
        """Test trimming between the third and fourth largest scores drops exactly the outliers"""
        ordered = np.sort(influence_scores(contaminated, contaminated_fit))
        threshold = 0.5 * (ordered[-3] + ordered[-4])
        kept, removed = trim_influential(contaminated, threshold, fit=contaminated_fit)
        np.testing.assert_array_equal(removed, [200, 201, 202])
        assert kept.n == 200

    def test_scores_are_non_negative_at_the_optimum(self, contaminated, contaminated_fit):
        """Test leaving a point out never raises the full-sample likelihood above its maximum"""
        assert np.all(influence_scores(contaminated, contaminated_fit) >= -1e-6)

    def test_one_step_agrees_with_refits(self):
        """Test the one-step scores rank points like exact leave-one-out refits"""
        rng = np.random.default_rng(8)
        sample = Sample(np.concatenate([sample_vm(VMParams(0.0, 10.0), rng, 40), [math.pi / 2]]))
        fit = fit_mle(sample)
        approx = influence_scores(sample, fit)
        exact = influence_scores(sample, fit, exact=True)
        assert np.argmax(approx) == np.argmax(exact) == 40
        assert np.all(exact >= -1e-6)
        assert np.corrcoef(approx, exact)[0, 1] > 0.9

    def test_threshold_must_be_positive(self, contaminated, contaminated_fit):
        """Test a non-positive trimming threshold is rejected"""
        with pytest.raises(DomainError):
            trim_influential(contaminated, 0.0, fit=contaminated_fit)
