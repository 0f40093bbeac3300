import numpy as np
import pytest
import scipy.integrate
import scipy.stats
from kernhmc.exceptions import (
    KernhmcDimensionError,
    KernhmcGridTruncationError,
    KernhmcInputError,
)
from kernhmc.core.streams import make_rng
from kernhmc.targets import (
    ABCObservation,
    ABCParams,
    BananaParams,
    abc_estimate_log_likelihood,
    banana_gradient,
    banana_log_density,
    banana_sample,
    lognormal_data,
    lognormal_true_posterior,
    make_isotropic_gaussian,
    make_noisy,
    make_target,
    rotated_gamma_covariance,
    skew_normal_log_density,
    skew_normal_simulate,
    synthetic_gaussian_posterior,
)
from kernhmc.targets.abc import simulate_summaries
from kernhmc.targets.banana import banana_log_density_batch
from kernhmc.targets.lognormal import grid_mean
from kernhmc.test.utils import central_difference


def test_banana_gradient(rng):
    params = BananaParams(d=4)
    for y in banana_sample(params, rng, size=5):
        np.testing.assert_allclose(
            banana_gradient(y, params),
            central_difference(lambda v: banana_log_density(v, params), y),
            rtol=1e-6,
            atol=1e-6,
        )


def test_banana_sample_moments():
    params = BananaParams()
    Y = banana_sample(params, make_rng(0), size=100000)
    assert Y.shape == (100000, 8)
    assert abs(Y[:, 0].mean()) < 0.15
    assert abs(Y[:, 1].mean()) < 0.1
    assert Y[:, 0].var() == pytest.approx(100.0, rel=0.05)
    np.testing.assert_allclose(
        banana_log_density_batch(Y[:5], params),
        [banana_log_density(y, params) for y in Y[:5]],
    )
    with pytest.raises(ValueError):
        BananaParams(d=1)


def test_skew_normal_density_normalised():
    total, _ = scipy.integrate.quad(
        lambda y: np.exp(skew_normal_log_density([y], [0.5], [3.0])), -15, 15
    )
    assert total == pytest.approx(1.0, abs=1e-6)


def test_skew_normal_simulated_mean():
    theta = np.array([1.0, -2.0])
    alpha = np.array([3.0, 1.0])
    draws = skew_normal_simulate(theta, alpha, make_rng(5), size=200000)
    delta = alpha / np.sqrt(1 + alpha @ alpha)
    np.testing.assert_allclose(
        draws.mean(axis=0), theta + delta * np.sqrt(2 / np.pi), atol=0.01
    )
    single = skew_normal_simulate(theta, alpha, make_rng(5))
    assert single.shape == (2,)


def test_abc_observation_fixture():
    observation = ABCObservation.load()
    assert observation.theta_true.shape == (10,)
    again = ABCObservation.load()
    np.testing.assert_array_equal(observation.summary(), again.summary())


def test_abc_summaries_average_batches():
    observation = ABCObservation.load()
    params = ABCParams(n_lik=2000)
    assert params.batch_size == observation.n_obs == 10
    assert observation.data().shape == (10, 10)
    rng = make_rng(21)
    summaries = simulate_summaries(observation.theta_true, params, rng)
    assert summaries.shape == (2000, 10)
    single = skew_normal_simulate(
        observation.theta_true, observation.alpha, rng, size=20000
    )
    ratio = summaries.var(axis=0).mean() / single.var(axis=0).mean()
    assert ratio == pytest.approx(0.1, rel=0.1)


def test_abc_estimate_is_noisy_and_finite():
    observation = ABCObservation.load()
    params = ABCParams()
    rng = make_rng(8)
    estimates = [
        abc_estimate_log_likelihood(
            observation.theta_true, observation.summary(), params, rng
        )
        for _ in range(5)
    ]
    assert np.all(np.isfinite(estimates))
    assert len(set(estimates)) > 1
    target = make_target("abc")
    assert target.is_noisy
    assert np.isfinite(target.evaluate(observation.theta_true, rng))
    with pytest.raises(KernhmcDimensionError):
        ABCParams(theta_dim=2, alpha=[1.0, 2.0, 3.0])


def test_abc_observation_save_load(work_dir):
    observation = ABCObservation(
        theta_true=[1.0, 2.0], alpha=[0.0, 1.0], n_obs=5, seed=3
    )
    observation.save(work_dir / "observed.yaml")
    loaded = ABCObservation.load(work_dir / "observed.yaml")
    np.testing.assert_array_equal(loaded.data(), observation.data())


def test_lognormal_posteriors():
    data = lognormal_data(100, mu=2.0, tau=1.0, seed=0)
    mean, precision = lognormal_true_posterior(data, mu0=0.0, tau0=0.01, tau=1.0)
    assert precision == pytest.approx(100.01)
    assert mean == pytest.approx(2.0, abs=0.4)
    assert mean == pytest.approx(
        (0.01 * 0.0 + np.log(data).sum()) / (0.01 + 100 * 1.0)
    )
    assert lognormal_true_posterior([], mu0=0.5, tau0=2.0, tau=1.0) == (0.5, 2.0)
    with pytest.raises(KernhmcInputError):
        lognormal_true_posterior(-data, mu0=0.0, tau0=0.01, tau=1.0)


def test_synthetic_posterior_biased_upwards():
    data = lognormal_data(100, mu=2.0, tau=1.0, seed=0)
    true_mean, _ = lognormal_true_posterior(data, mu0=0.0, tau0=0.01, tau=1.0)
    grid = np.linspace(0.0, 4.0, 4001)
    weights = synthetic_gaussian_posterior(
        data, grid, mu0=0.0, tau0=0.01, tau=1.0, epsilon=0.1
    )
    assert weights.sum() == pytest.approx(1.0)
    synthetic_mean = grid_mean(grid, weights)
    assert synthetic_mean > true_mean
    exact_moments = synthetic_gaussian_posterior(
        data, grid, mu0=0.0, tau0=0.01, tau=1.0, epsilon=0.1, n_lik=None
    )
    assert synthetic_mean > grid_mean(grid, exact_moments)
    fine_grid = np.linspace(0.0, 4.0, 8001)
    refined = synthetic_gaussian_posterior(
        data, fine_grid, mu0=0.0, tau0=0.01, tau=1.0, epsilon=0.1
    )
    assert grid_mean(fine_grid, refined) == pytest.approx(synthetic_mean, abs=1e-4)


def test_synthetic_posterior_errors():
    data = lognormal_data(100, mu=2.0, tau=1.0, seed=0)
    with pytest.raises(KernhmcGridTruncationError):
        synthetic_gaussian_posterior(
            data, np.linspace(3.5, 4.0, 51), mu0=0.0, tau0=0.01, tau=1.0, epsilon=0.1
        )
    with pytest.raises(KernhmcInputError):
        synthetic_gaussian_posterior(
            data, np.linspace(0.0, 4.0, 51), 0.0, 0.01, 1.0, 0.1, n_lik=1
        )
    with pytest.raises(KernhmcInputError):
        synthetic_gaussian_posterior(
            data, np.linspace(0.0, 4.0, 51), 0.0, 0.01, 1.0, epsilon=-1.0
        )


def test_noisy_wrapper_unbiased():
    exact = make_isotropic_gaussian(2)
    noisy = make_noisy(exact, noise_sd=0.5)
    x = np.array([0.3, -0.2])
    rng = make_rng(6)
    ratios = np.exp(
        [noisy.evaluate(x, rng) - exact.log_density(x) for _ in range(20000)]
    )
    assert ratios.mean() == pytest.approx(1.0, abs=0.02)
    assert noisy.log_density is exact.log_density
    with pytest.raises(KernhmcInputError):
        make_noisy(make_target("abc"), 0.5)


def test_rotated_gamma_covariance():
    eigenvalues, rotation, covariance = rotated_gamma_covariance(4, seed=2)
    np.testing.assert_allclose(rotation @ rotation.T, np.eye(4), atol=1e-12)
    np.testing.assert_allclose(np.linalg.eigvalsh(covariance), np.sort(eigenvalues))
    target = make_target("rotated_gamma_gaussian", {"d": 4, "seed": 2})
    assert target.dim == 4


def test_make_target_errors():
    with pytest.raises(KernhmcInputError):
        make_target("unknown")
    with pytest.raises(KernhmcInputError):
        make_target("banana", {"d": 1})
    assert make_target("isotropic_gaussian", {"d": 3}, noise_sd=0.1).is_noisy


def test_skew_normal_without_skew_is_gaussian():
    theta = np.array([0.5, -1.0, 2.0])
    draws = skew_normal_simulate(theta, np.zeros(3), make_rng(17), size=20000)
    for i in range(3):
        result = scipy.stats.kstest(draws[:, i], "norm", args=(theta[i], 1.0))
        assert result.pvalue > 0.001
    np.testing.assert_allclose(
        skew_normal_log_density(theta + 0.3, theta, np.zeros(3)),
        scipy.stats.multivariate_normal(theta, np.eye(3)).logpdf(theta + 0.3),
    )


def test_abc_likelihood_flat_for_wide_kernel():
    observation = ABCObservation.load()
    params = ABCParams(epsilon=1e8)
    y_obs = observation.summary()
    values = [
        abc_estimate_log_likelihood(theta, y_obs, params, make_rng(seed))
        for seed, theta in enumerate(
            [observation.theta_true, np.zeros(10), np.full(10, -25.0)]
        )
    ]
    assert max(values) - min(values) <= 1e-6
