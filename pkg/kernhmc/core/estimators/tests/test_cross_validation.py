import numpy as np
import pytest
from kernhmc.exceptions import KernhmcGridError, KernhmcNumericError
from kernhmc.core.estimators import cross_validate, log_grid
from kernhmc.core.estimators import cross_validation
from kernhmc.core.estimators.cross_validation import fold_indices
from kernhmc.core.streams import make_rng


class ConstantModel:
    def objective(self, X):
        return 1.0


def test_fold_indices_partition():
    folds = fold_indices(23, 5, seed=3)
    assert len(folds) == 5
    assert sorted(np.concatenate(folds).tolist()) == list(range(23))
    assert all(len(f) in (4, 5) for f in folds)
    again = fold_indices(23, 5, seed=3)
    assert all(np.array_equal(a, b) for a, b in zip(folds, again))


def test_cross_validation_tie_break(normal_2d, monkeypatch):
    monkeypatch.setattr(cross_validation, "_fit", lambda *args: ConstantModel())
    result = cross_validate(normal_2d, [4.0, 1.0, 2.0], [0.1, 10.0, 1.0])
    assert result.sigma == 1.0
    assert result.lambda_ == 10.0


def test_cross_validation_failed_fits(normal_2d, monkeypatch):
    def fit(estimator, train, sigma, *args):
        if sigma < 2.0:
            raise KernhmcNumericError("singular")
        return ConstantModel()

    monkeypatch.setattr(cross_validation, "_fit", fit)
    result = cross_validate(normal_2d, [1.0, 2.0], [1.0])
    assert result.sigma == 2.0
    assert np.isinf(result.fold_scores[0, 0])
    assert result.to_dict()["fold_scores"][0][0] is None
    with pytest.raises(KernhmcNumericError):
        cross_validate(normal_2d, [1.0], [1.0])


def test_cross_validation_grid_errors(normal_2d):
    with pytest.raises(KernhmcGridError):
        cross_validate(normal_2d, [], [1.0])
    with pytest.raises(KernhmcGridError):
        cross_validate(normal_2d, [1.0], [0.0])
    with pytest.raises(KernhmcGridError):
        log_grid(1.0, 0.1, 3)


def test_cross_validation_lite_prefers_sensible_bandwidth():
    data = make_rng(5).standard_normal((200, 1))
    result = cross_validate(data, [0.01, 4.0], [0.1], estimator="lite")
    assert result.sigma == 4.0
    assert result.best_score == result.fold_scores.min()


def test_cross_validation_finite(normal_2d):
    result = cross_validate(
        normal_2d, [1.0, 4.0], [0.1, 1.0], estimator="finite", m=30, seed=1
    )
    assert result.sigma in (1.0, 4.0)
    assert np.all(np.isfinite(result.fold_scores))
    assert log_grid(0.1, 10.0, 3) == pytest.approx([0.1, 1.0, 10.0])
