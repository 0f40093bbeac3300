import time
import numpy as np
import pytest
from kernhmc.exceptions import KernhmcInputError
from kernhmc.core.estimators import (
    FiniteModel,
    finite_absorb,
    finite_grad,
    finite_update,
    fit_finite_batch,
)
from kernhmc.core.estimators.finite import finite_system_terms
from kernhmc.core.features import FeatureBasis, sample_basis
from kernhmc.core.kernels import KernelSpec
from kernhmc.core.streams import make_rng
from kernhmc.test.utils import central_difference


def test_finite_single_point_example():
    basis = FeatureBasis(
        KernelSpec.gaussian(1.0), omegas=[[1.0], [2.0]], offsets=[0.0, 0.0]
    )
    model = fit_finite_batch([[0.0]], basis, lambda_=1.0)
    np.testing.assert_allclose(model.b_sum, [1.0, 4.0])
    np.testing.assert_allclose(model.C_sum, np.zeros((2, 2)))
    np.testing.assert_allclose(model.theta, [1.0, 4.0])


def test_finite_online_matches_batch(normal_2d):
    basis = sample_basis(KernelSpec.gaussian(2.0), 30, 2, seed=2)
    X = normal_2d[:50]
    batch = fit_finite_batch(X, basis, lambda_=1.0)
    for order in range(3):
        model = FiniteModel.initial(basis, 1.0)
        for i in make_rng(order).permutation(X.shape[0]):
            model = finite_update(model, X[i])
        assert model.t == X.shape[0]
        np.testing.assert_allclose(model.theta, batch.theta, rtol=1e-8, atol=1e-10)


def test_finite_absorb_matches_batch(normal_2d):
    basis = sample_basis(KernelSpec.gaussian(2.0), 100, 2, seed=2)
    X = normal_2d[:60]
    batch = fit_finite_batch(X, basis, lambda_=0.5)
    model = FiniteModel.initial(basis, 0.5)
    # one point at a time goes through rank-one updates, the rest is refactorised
    model = finite_absorb(model, X[:1])
    model = finite_absorb(model, X[1:])
    assert model.t == 60
    np.testing.assert_allclose(model.theta, batch.theta, rtol=1e-8, atol=1e-10)


def test_finite_grad_finite_difference(finite_model, rng):
    for x in rng.standard_normal((5, 2)):
        numeric = central_difference(lambda v: finite_model.log_density(v)[0], x)
        np.testing.assert_allclose(finite_grad(finite_model, x), numeric, atol=1e-6)
        np.testing.assert_allclose(
            finite_grad(finite_model, x), finite_model.grad(x)[0], atol=1e-12
        )


def test_finite_system_psd(normal_2d):
    basis = sample_basis(KernelSpec.rational_quadratic(1.0, 2.0), 40, 2, seed=9)
    _, C = finite_system_terms(normal_2d, basis)
    assert np.linalg.eigvalsh(C).min() > -1e-8 * np.abs(C).max()


def test_finite_regularisation_path(normal_2d):
    basis = sample_basis(KernelSpec.gaussian(2.0), 40, 2, seed=4)
    norms = [
        np.linalg.norm(fit_finite_batch(normal_2d, basis, lambda_).theta)
        for lambda_ in (0.1, 1.0, 10.0, 100.0)
    ]
    assert all(a > b for a, b in zip(norms, norms[1:]))


def test_finite_save_load(finite_model, work_dir, rng):
    finite_model.save(work_dir / "finite.yaml")
    loaded = FiniteModel.load(work_dir / "finite.yaml")
    X = rng.standard_normal((10, 2))
    assert np.array_equal(loaded.grad(X), finite_model.grad(X))
    assert loaded.t == finite_model.t


def test_finite_input_errors():
    basis = sample_basis(KernelSpec.gaussian(1.0), 10, 2, seed=0)
    with pytest.raises(KernhmcInputError):
        FiniteModel.initial(basis, 0.0)
    with pytest.raises(KernhmcInputError):
        fit_finite_batch(np.zeros((0, 2)), basis, 1.0)


@pytest.mark.slow
def test_finite_update_cost_independent_of_history():
    basis = sample_basis(KernelSpec.gaussian(1.0), 100, 2, seed=0)
    X = make_rng(0).standard_normal((1000, 2))
    model = FiniteModel.initial(basis, 1.0)
    durations = []
    for x in X:
        start = time.perf_counter()
        model = finite_update(model, x)
        durations.append(time.perf_counter() - start)
    blocks = np.median(np.reshape(durations, (20, 50)), axis=1)
    t = np.arange(20) * 50 + 25
    slope, intercept = np.polyfit(t, blocks, 1)
    assert model.t == 1000
    assert abs(slope) * X.shape[0] < 0.25 * intercept
