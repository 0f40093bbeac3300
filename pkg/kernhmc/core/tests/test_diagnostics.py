import numpy as np
import pytest
from kernhmc.exceptions import (
    KernhmcDegenerateSeriesError,
    KernhmcDimensionError,
    KernhmcInputError,
)
from kernhmc.core.diagnostics import (
    acceptance_rate,
    autocorrelation,
    effective_sample_size,
    mean_norm,
    min_ess,
    mmd_curve,
    mmd_poly3,
)
from kernhmc.core.streams import make_rng


def test_ess_independent_draws():
    x = make_rng(0).standard_normal(5000)
    ess, _ = effective_sample_size(x)
    assert 0.8 * 5000 <= ess <= 5000


def test_ess_duplicated_draws():
    x = np.repeat(make_rng(1).standard_normal(5000), 2)
    ess, _ = effective_sample_size(x)
    assert 0.4 * 10000 <= ess <= 0.6 * 10000


def test_constant_series():
    with pytest.raises(KernhmcDegenerateSeriesError):
        autocorrelation(np.ones(50), 10)
    samples = np.column_stack([make_rng(2).standard_normal(100), np.ones(100)])
    report = min_ess(samples)
    assert report.degenerate.tolist() == [False, True]
    assert report.per_dim[1] == 100
    assert report.min_ess == report.per_dim.min()


def test_autocorrelation_lag_zero():
    rho = autocorrelation(make_rng(3).standard_normal(200), 20)
    assert rho.shape == (21,)
    assert rho[0] == pytest.approx(1.0)
    with pytest.raises(KernhmcInputError):
        autocorrelation(np.arange(10.0), 10)


def test_mmd_identical_sets(normal_2d):
    assert mmd_poly3(normal_2d, normal_2d) == 0.0


def test_mmd_brute_force(rng):
    X = rng.standard_normal((15, 2))
    Y = rng.standard_normal((10, 2)) + 0.5

    def mean_kernel(A, B):
        return np.mean([(1.0 + a @ b) ** 3 for a in A for b in B])

    expected = np.sqrt(mean_kernel(X, X) + mean_kernel(Y, Y) - 2 * mean_kernel(X, Y))
    assert mmd_poly3(X, Y) == pytest.approx(expected, rel=1e-10)
    with pytest.raises(KernhmcDimensionError):
        mmd_poly3(X, Y[:, :1])


def test_mmd_curve(normal_2d):
    reference = normal_2d[100:]
    curve = mmd_curve(normal_2d[:100], reference, [10, 50, 100])
    assert [t for t, _ in curve] == [10, 50, 100]
    assert curve[-1][1] == pytest.approx(mmd_poly3(normal_2d[:100], reference))
    with pytest.raises(KernhmcInputError):
        mmd_curve(normal_2d[:100], reference, [101])


def test_acceptance_and_mean_norm():
    flags = [True, False, True, True]
    assert acceptance_rate(flags) == 0.75
    assert acceptance_rate(flags, burn_in=1) == pytest.approx(2 / 3)
    with pytest.raises(KernhmcInputError):
        acceptance_rate(flags, burn_in=4)
    assert mean_norm([[3.0, 0.0], [3.0, 8.0]]) == pytest.approx(5.0)


def test_ess_invariant_under_affine_maps():
    noise = make_rng(4).standard_normal((2000, 2))
    chain = np.zeros_like(noise)
    for t in range(1, chain.shape[0]):
        chain[t] = 0.8 * chain[t - 1] + noise[t]
    report = min_ess(chain)
    moved = min_ess(chain * np.array([3.0, -0.5]) + np.array([-7.0, 100.0]))
    np.testing.assert_allclose(moved.per_dim, report.per_dim, rtol=1e-8)
    assert report.min_ess < 0.5 * chain.shape[0]


def test_mmd_orders_by_separation():
    rng = make_rng(5)
    X = rng.standard_normal((2000, 2))
    scores = [
        mmd_poly3(X, rng.standard_normal((2000, 2)) + shift)
        for shift in (0.0, 0.5, 1.5, 3.0)
    ]
    assert scores == sorted(scores)
    assert len(set(scores)) == 4
