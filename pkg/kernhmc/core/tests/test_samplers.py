import numpy as np
import pytest
import scipy.stats
from kernhmc.exceptions import KernhmcInputError
from kernhmc.core.dynamics import HamiltonianParams
from kernhmc.core.estimators import fit_finite_batch
from kernhmc.core.samplers import (
    AdaptationSchedule,
    ChainResult,
    CVConfig,
    MHProposal,
    SamplerConfig,
    run_hmc,
    run_mh,
    run_rw,
    run_sampler,
    should_adapt,
)
from kernhmc.core.streams import make_rng
from kernhmc.core.target import Target
from kernhmc.targets import make_isotropic_gaussian, make_noisy


class CountingGaussian:
    def __init__(self):
        self.calls = 0

    def __call__(self, x):
        self.calls += 1
        return -0.5 * float(x @ x)


def kmc_config(**kwargs):
    defaults = dict(
        algorithm="kmc_finite",
        T=300,
        burn_in=0,
        seed=3,
        n_basis=50,
        sigma=2.0,
        lambda_=1.0,
        hamiltonian=HamiltonianParams(0.1, 0.3, 5, 10),
    )
    defaults.update(kwargs)
    return SamplerConfig(**defaults)


def test_rw_evaluates_target_once_per_iteration():
    log_density = CountingGaussian()
    target = Target(dim=2, log_density=log_density, name="counting")
    chain = run_rw(target, 200, seed=1)
    assert log_density.calls == 201
    assert chain.T == 200


def test_stored_log_target_recycled():
    target = make_noisy(make_isotropic_gaussian(2), noise_sd=1.0)
    chain = run_rw(target, 300, seed=4)
    rejected = np.flatnonzero(~chain.accepted[1:]) + 1
    assert rejected.size > 0
    np.testing.assert_array_equal(
        chain.log_targets[rejected], chain.log_targets[rejected - 1]
    )
    np.testing.assert_array_equal(chain.samples[rejected], chain.samples[rejected - 1])


def test_rw_tuned_acceptance():
    chain = run_rw(make_isotropic_gaussian(2), 5000, seed=0, burn_in=2000)
    assert 0.15 <= chain.accepted[2000:].mean() <= 0.35


def test_hmc_tuned_acceptance():
    config = SamplerConfig(algorithm="hmc", T=1500, burn_in=500, seed=2)
    chain = run_hmc(make_isotropic_gaussian(2), config)
    assert 0.65 <= chain.accepted[500:].mean() <= 0.95
    assert chain.step_scale[-1] == chain.step_scale[600]


def test_hmc_needs_gradient():
    target = Target(dim=1, log_density=lambda x: -0.5 * float(x @ x))
    with pytest.raises(KernhmcInputError):
        run_hmc(target, SamplerConfig(algorithm="hmc", T=10, burn_in=0))


@pytest.mark.parametrize("algorithm", ["rw", "hmc", "kmc_lite", "kmc_finite"])
def test_samplers_deterministic(algorithm):
    config = kmc_config(algorithm=algorithm, T=100)
    target = make_isotropic_gaussian(2)
    first = run_sampler(target, config)
    second = run_sampler(target, config)
    np.testing.assert_array_equal(first.samples, second.samples)
    np.testing.assert_array_equal(first.accepted, second.accepted)
    assert first.algorithm == algorithm


def test_finite_surrogate_covers_history():
    chain = run_sampler(make_isotropic_gaussian(2), kmc_config())
    model = chain.surrogate
    assert model.t > 0
    assert chain.adapted.sum() > 0
    batch = fit_finite_batch(chain.samples[: model.t], model.basis, 1.0)
    np.testing.assert_allclose(model.theta, batch.theta, rtol=1e-6, atol=1e-10)
    assert chain.accepted.mean() > 0.1


def test_lite_surrogate_sub_sample():
    chain = run_sampler(make_isotropic_gaussian(2), kmc_config(algorithm="kmc_lite"))
    assert chain.surrogate.n == 50
    assert np.all(np.isfinite(chain.samples))


def test_surrogate_frozen_after_stop():
    config = kmc_config(
        stop_adaptation_at=150, schedule=AdaptationSchedule(exponent=1.0, scale=0.01)
    )
    chain = run_sampler(make_isotropic_gaussian(2), config)
    assert chain.adapted[150]
    assert not chain.adapted[151:].any()
    assert chain.surrogate.t == 150


def test_hyperparameters_learned_on_history():
    config = kmc_config(
        sigma="cv",
        lambda_="cv",
        cv=CVConfig(
            sigma_grid=[1.0, 4.0], lambda_grid=[0.1, 1.0], iterations=[100]
        ),
    )
    chain = run_sampler(make_isotropic_gaussian(2), config)
    assert not chain.adapted[:100].any()
    assert chain.adapted[100]
    assert len(chain.hyperparameters) == 1
    learned = chain.hyperparameters[0]
    assert learned["iteration"] == 100
    assert learned["sigma"] in (1.0, 4.0)
    assert learned["lambda"] in (0.1, 1.0)


def test_sampler_config_validation():
    with pytest.raises(ValueError):
        SamplerConfig(T=10, burn_in=10)
    with pytest.raises(ValueError):
        SamplerConfig(sigma="auto")
    with pytest.raises(ValueError):
        SamplerConfig(lambda_=-1.0)
    with pytest.raises(ValueError):
        AdaptationSchedule(exponent=0.0)
    assert AdaptationSchedule(0.5, 1.0).probability(3) == pytest.approx(0.5)


def test_chain_csv(work_dir):
    chain = run_sampler(make_isotropic_gaussian(2), kmc_config(T=50))
    chain.to_csv(work_dir / "chain.csv")
    loaded = ChainResult.from_csv(work_dir / "chain.csv")
    np.testing.assert_array_equal(loaded.samples, chain.samples)
    np.testing.assert_array_equal(loaded.accepted, chain.accepted)
    np.testing.assert_array_equal(loaded.L, chain.L)
    summary = chain.summary(burn_in=10)
    assert summary["T"] == 50
    assert summary["algorithm"] == "kmc_finite"
    assert "ess" in summary


@pytest.mark.slow
def test_pseudo_marginal_kmc_targets_gaussian():
    target = make_noisy(make_isotropic_gaussian(1), noise_sd=0.5)
    frozen_at = 2000
    config = kmc_config(
        T=frozen_at + 100000,
        burn_in=frozen_at,
        stop_adaptation_at=frozen_at,
        n_basis=100,
        seed=11,
    )
    chain = run_sampler(target, config)
    frozen = chain.samples[frozen_at:, 0]
    assert frozen.shape[0] == 100000
    assert scipy.stats.kstest(frozen, "norm").statistic <= 0.02


@pytest.mark.parametrize("t", [9, 99, 399])
def test_should_adapt_frequency(t):
    schedule = AdaptationSchedule(exponent=0.5, scale=1.0)
    rng = make_rng(t)
    draws = 20000
    fired = sum(should_adapt(schedule, t, rng) for _ in range(draws))
    result = scipy.stats.binomtest(fired, draws, schedule.probability(t))
    assert result.pvalue > 0.001
    assert should_adapt(schedule, 0, rng)
    assert not should_adapt(AdaptationSchedule(scale=0.0), 0, rng)


def test_identity_proposal_always_accepted():
    target = make_isotropic_gaussian(2)
    chain = run_mh(
        target,
        lambda state, rng: MHProposal(position=state.position.copy()),
        50,
        seed=0,
        x0=[0.5, -0.5],
    )
    assert chain.accepted.all()
    np.testing.assert_array_equal(chain.samples, np.tile([0.5, -0.5], (50, 1)))


def test_flat_target_free_particle_hmc():
    target = Target(
        dim=2,
        log_density=lambda x: 0.0,
        gradient=lambda x: np.zeros(2),
        name="flat",
    )
    config = SamplerConfig(algorithm="hmc", T=50, burn_in=0, tune_step=False)
    chain = run_hmc(target, config)
    assert chain.accepted.all()
