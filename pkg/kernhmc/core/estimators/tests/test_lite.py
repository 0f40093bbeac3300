import numpy as np
import pytest
from kernhmc.exceptions import KernhmcInputError
from kernhmc.core.estimators import (
    LiteModel,
    fit_lite,
    fit_lite_lowrank,
    lite_grad,
    lite_log_density,
    score_objective,
)
from kernhmc.core.estimators.lite import lite_system_terms
from kernhmc.core.kernels import KernelSpec
from kernhmc.test.utils import central_difference, second_central_difference


def test_lite_derivatives_finite_difference(lite_model, rng):
    for x in rng.standard_normal((5, 2)):
        np.testing.assert_allclose(
            lite_grad(lite_model, x),
            central_difference(lambda v: lite_log_density(lite_model, v), x),
            atol=1e-6,
        )
        np.testing.assert_allclose(
            lite_model.laplacian_diag(x)[0],
            second_central_difference(lambda v: lite_log_density(lite_model, v), x),
            atol=1e-4,
        )


def test_lite_objective_matches_generic(lite_model, normal_2d):
    data = normal_2d[100:130]
    generic = score_objective(
        lambda x: lite_grad(lite_model, x),
        lambda x, ell: lite_model.laplacian_diag(x)[0, ell],
        data,
    )
    assert lite_model.objective(data) == pytest.approx(generic, rel=1e-10)


def test_lite_system_psd(normal_2d):
    _, C = lite_system_terms(normal_2d[:50], KernelSpec.gaussian(1.0))
    np.testing.assert_allclose(C, C.T, atol=1e-12)
    assert np.linalg.eigvalsh(C).min() > -1e-8 * np.abs(C).max()


def test_lite_regularisation_path(normal_2d):
    norms = [
        np.linalg.norm(fit_lite(normal_2d[:60], 2.0, lambda_).alpha)
        for lambda_ in (0.01, 0.1, 1.0, 10.0)
    ]
    assert all(a > b for a, b in zip(norms, norms[1:]))


def test_lite_dense_and_lowrank_agree(normal_2d):
    Z = normal_2d[:80]
    dense = fit_lite(Z, 2.0, 1.0)
    lowrank = fit_lite_lowrank(Z, 2.0, 1.0, tol=1e-12, max_iters=800, cg_tol=1e-10)
    np.testing.assert_allclose(
        lowrank.alpha, dense.alpha, rtol=1e-4, atol=1e-4 * np.abs(dense.alpha).max()
    )


def test_lite_lowrank_hot_start(normal_2d):
    Z = normal_2d[:80]
    cold = fit_lite_lowrank(Z, 2.0, 1.0, tol=1e-12, max_iters=800, cg_tol=1e-10)
    hot = fit_lite_lowrank(
        Z, 2.0, 1.0, tol=1e-12, max_iters=1, cg_tol=1e-6, alpha0=cold.alpha
    )
    assert hot.converged
    np.testing.assert_allclose(hot.alpha, cold.alpha, rtol=1e-6)


def test_lite_tail_decay(lite_model):
    sigma = lite_model.spec.sigma
    far = np.abs(lite_model.Z).max() * np.sqrt(2) + 10 * np.sqrt(sigma)
    assert np.linalg.norm(lite_grad(lite_model, [far, far])) < 1e-6


def test_lite_save_load(lite_model, work_dir, rng):
    lite_model.save(work_dir / "lite.yaml")
    loaded = LiteModel.load(work_dir / "lite.yaml")
    X = rng.standard_normal((10, 2))
    assert np.array_equal(loaded.grad(X), lite_model.grad(X))


def test_lite_input_errors(normal_2d):
    with pytest.raises(KernhmcInputError):
        fit_lite(normal_2d[:10], 1.0, 0.0)
    with pytest.raises(KernhmcInputError):
        fit_lite(normal_2d[:10], -1.0, 1.0)
    with pytest.raises(KernhmcInputError):
        fit_lite(np.zeros((0, 2)), 1.0, 1.0)


def test_lite_minimises_regularised_objective():
    Z = np.array([[-1.0], [0.0], [1.0]])
    sigma, lambda_ = 2.0, 0.1

    def objective(alpha):
        def grad(x):
            r = x[0] - Z[:, 0]
            slope = -2 * r / sigma
            return np.array([np.sum(alpha * slope * np.exp(-(r**2) / sigma))])

        def second(x, ell):
            r = x[0] - Z[:, 0]
            curvature = 4 * r**2 / sigma**2 - 2 / sigma
            return np.sum(alpha * curvature * np.exp(-(r**2) / sigma))

        penalty = 2 * lambda_ / (Z.shape[0] * sigma**2) * alpha @ alpha
        return score_objective(grad, second, Z) + penalty

    # exact for a quadratic
    e = np.eye(3)
    linear = np.array([(objective(u) - objective(-u)) / 2 for u in e])
    hessian = np.array(
        [
            [
                (
                    objective(u + v)
                    - objective(u - v)
                    - objective(v - u)
                    + objective(-u - v)
                )
                / 4
                for v in e
            ]
            for u in e
        ]
    )
    expected = np.linalg.solve(hessian, -linear)
    model = fit_lite(Z, sigma, lambda_)
    np.testing.assert_allclose(model.alpha, expected, atol=1e-6)
