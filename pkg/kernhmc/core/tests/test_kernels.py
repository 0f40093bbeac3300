import numpy as np
import pytest
from kernhmc.exceptions import KernhmcDimensionError
from kernhmc.core.kernels import (
    KernelSpec,
    incomplete_cholesky,
    kernel_eval,
    kernel_grad_x,
    kernel_matrix,
)
from kernhmc.test.utils import central_difference


SPECS = [KernelSpec.gaussian(1.5), KernelSpec.rational_quadratic(1.5, 2.0)]


@pytest.mark.parametrize("spec", SPECS, ids=["gaussian", "rq"])
def test_kernel_grad_finite_difference(spec, rng):
    for _ in range(5):
        x, y = rng.standard_normal((2, 3))
        numeric = central_difference(lambda v: kernel_eval(spec, v, y), x)
        np.testing.assert_allclose(kernel_grad_x(spec, x, y), numeric, atol=1e-6)


def test_gaussian_kernel_values():
    spec = KernelSpec.gaussian(2.0)
    assert kernel_eval(spec, [0.0, 0.0], [0.0, 0.0]) == 1.0
    assert kernel_eval(spec, [1.0, 1.0], [0.0, 0.0]) == pytest.approx(np.exp(-1.0))


def test_rational_quadratic_tends_to_gaussian(rng):
    x, y = rng.standard_normal((2, 2))
    rq = KernelSpec.rational_quadratic(1.0, 1e6)
    gaussian = KernelSpec.gaussian(1.0)
    assert kernel_eval(rq, x, y) == pytest.approx(kernel_eval(gaussian, x, y), abs=1e-5)


def test_kernel_matrix_psd(rng):
    X = rng.standard_normal((40, 3))
    for spec in SPECS:
        K = kernel_matrix(spec, X)
        np.testing.assert_allclose(K, K.T)
        assert np.linalg.eigvalsh(K).min() > -1e-10


def test_kernel_dimension_mismatch():
    with pytest.raises(KernhmcDimensionError):
        kernel_eval(SPECS[0], [0.0, 1.0], [0.0])
    with pytest.raises(KernhmcDimensionError):
        kernel_matrix(SPECS[0], np.zeros((3, 2)), np.zeros((3, 1)))


def test_incomplete_cholesky_residual_bound(rng):
    X = rng.standard_normal((60, 2))
    spec = KernelSpec.gaussian(2.0)
    for tol in (1e-2, 1e-6):
        factor = incomplete_cholesky(spec, X, tol)
        assert factor.residual <= tol
        error = np.abs(kernel_matrix(spec, X) - factor.L @ factor.L.T).max()
        assert error <= tol + 1e-12
        assert len(set(factor.pivots.tolist())) == factor.rank
    coarse = incomplete_cholesky(spec, X, 1e-2)
    fine = incomplete_cholesky(spec, X, 1e-6)
    assert coarse.rank <= fine.rank


def test_incomplete_cholesky_max_rank(rng):
    X = rng.standard_normal((30, 2))
    factor = incomplete_cholesky(KernelSpec.gaussian(1.0), X, 1e-12, max_rank=5)
    assert factor.rank == 5
