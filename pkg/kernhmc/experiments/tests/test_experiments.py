import csv
import json
import numpy as np
import pytest
from kernhmc.exceptions import (
    KernhmcDimensionError,
    KernhmcDivergenceError,
    KernhmcInputError,
)
from kernhmc.core.dynamics import HamiltonianParams
from kernhmc.core.estimators import FiniteModel, LiteModel
from kernhmc.core.samplers import SamplerConfig
from kernhmc.core.streams import make_rng
from kernhmc.core.utils import fromdict
from kernhmc.experiments import (
    AbcConfig,
    AcceptanceBenchmarkConfig,
    BananaConfig,
    FitConfig,
    SampleConfig,
    TrajectoriesConfig,
    run_abc,
    run_acceptance_benchmark,
    run_banana,
    run_diagnose,
    run_fit,
    run_sample,
    run_trajectories,
)
from kernhmc.experiments.config import GridConfig, TargetConfig
from kernhmc.experiments.io import write_samples_csv
from kernhmc.targets import ABCParams, BananaParams


def read_rows(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def read_json(path):
    with open(path) as f:
        return json.load(f)


def small_sampler(**kwargs):
    defaults = dict(
        algorithm="kmc_finite",
        T=150,
        burn_in=50,
        n_basis=30,
        sigma=2.0,
        lambda_=1.0,
        hamiltonian=HamiltonianParams(0.1, 0.3, 5, 10),
    )
    defaults.update(kwargs)
    return SamplerConfig(**defaults)


def test_fit_lite_with_reference(normal_samples_file, work_dir):
    config = FitConfig(
        input=str(normal_samples_file),
        estimator="lite",
        sigma=2.0,
        lambda_="cv",
        cv=GridConfig(sigma_grid=[1.0], lambda_grid=[0.01, 0.1]),
        reference={"name": "isotropic_gaussian", "params": {"d": 1}},
    )
    out = work_dir / "fit"
    report = run_fit(config, out)
    assert report["n"] == 500 and report["d"] == 1
    assert report["sigma"] == 2.0
    assert report["lambda"] in (0.01, 0.1)
    assert report["cross_validation"]["sigma_grid"] == [2.0]
    assert report["converged"]
    grid = np.linspace(-3, 3, 61)
    assert 0 <= report["gradient_mse"] < np.mean(grid**2)
    assert len(read_rows(out / "gradients.csv")) == 61
    model = LiteModel.load(out / "model.yaml")
    assert model.n == 500
    saved = read_json(out / "report.json")
    assert saved["schema_version"] == 1
    assert (out / "config.yaml").exists() and (out / "timings.json").exists()


def test_fit_finite(normal_2d, work_dir):
    write_samples_csv(work_dir / "samples.csv", normal_2d)
    config = FitConfig(
        input=str(work_dir / "samples.csv"),
        estimator="finite",
        sigma=2.0,
        lambda_=1.0,
        m=40,
        seed=5,
    )
    report = run_fit(config, work_dir / "fit")
    assert report["cross_validation"] is None
    assert "converged" not in report
    model = FiniteModel.load(work_dir / "fit" / "model.yaml")
    assert model.t == 200 and model.m == 40


def test_fit_errors(normal_samples_file, work_dir):
    config = FitConfig(
        input=str(normal_samples_file),
        sigma=1.0,
        lambda_=1.0,
        reference={"name": "isotropic_gaussian", "params": {"d": 2}},
    )
    with pytest.raises(KernhmcInputError):
        run_fit(config, work_dir / "fit")
    with pytest.raises(KernhmcInputError):
        run_fit(
            FitConfig(
                input=str(normal_samples_file),
                family="rational_quadratic",
                sigma=1.0,
                lambda_=1.0,
            ),
            work_dir / "fit",
        )
    with pytest.raises(KernhmcInputError):
        run_fit(FitConfig(input=str(work_dir / "missing.csv")), work_dir / "fit")


def test_config_templates_merge_partial_blocks():
    config = fromdict(AbcConfig, {"sampler": {"T": 300}})
    assert config.sampler.T == 300
    assert config.sampler.stop_adaptation_at == 200
    assert config.sampler.cv.iterations == [200]
    config = fromdict(AcceptanceBenchmarkConfig, {"cv": {"folds": 3}})
    assert config.cv.folds == 3
    assert config.cv.lambda_grid == [1e-2, 1.0, 100.0]
    with pytest.raises(KernhmcInputError):
        fromdict(FitConfig, {"unknown": 1})
    with pytest.raises(KernhmcInputError):
        fromdict(AcceptanceBenchmarkConfig, {"target": "banana"})


def test_run_sample(work_dir):
    config = SampleConfig(
        target=TargetConfig(params={"d": 2}),
        sampler=small_sampler(),
        reference_samples=200,
        mmd_checkpoints=[50, 100],
    )
    chain = run_sample(config, work_dir / "sample")
    assert chain.T == 150
    out = work_dir / "sample"
    assert len(read_rows(out / "chain.csv")) == 150
    assert [int(r["t"]) for r in read_rows(out / "mmd.csv")] == [50, 100]
    summary = read_json(out / "summary.json")
    assert summary["burn_in"] == 50
    assert summary["mmd"] >= 0
    assert FiniteModel.load(out / "surrogate.yaml").t == chain.surrogate.t


def test_run_trajectories(work_dir):
    config = TrajectoriesConfig(
        n_train=500, m=100, sigma=2.0, lambda_=1.0, n_trajectories=5
    )
    report = run_trajectories(config, work_dir / "trajectories")
    assert report["mean_exact_acceptance"] >= 0.95
    assert 0 <= report["mean_kernel_acceptance"] <= 1
    rows = read_rows(work_dir / "trajectories" / "trajectories.csv")
    assert sum(r["kind"] == "exact" for r in rows) == 5 * 21
    assert len(read_rows(work_dir / "trajectories" / "endpoints.csv")) == 5
    with pytest.raises(KernhmcInputError):
        run_trajectories(
            TrajectoriesConfig(target=TargetConfig(name="abc", params={})),
            work_dir / "abc",
        )
    with pytest.raises(KernhmcDivergenceError):
        run_trajectories(
            TrajectoriesConfig(
                n_train=100, m=20, sigma=2.0, lambda_=1.0, eps=5.0, n_trajectories=1
            ),
            work_dir / "unstable",
        )


def test_acceptance_benchmark_reproducible(work_dir):
    config = AcceptanceBenchmarkConfig(
        dims=[2],
        sizes=[50, 100],
        trials=2,
        n_trajectories=3,
        sigma=2.0,
        lambda_=1.0,
    )
    report = run_acceptance_benchmark(config, work_dir / "serial")
    assert np.shape(report["mean_acceptance"]) == (1, 2)
    parallel = AcceptanceBenchmarkConfig(
        dims=[2],
        sizes=[50, 100],
        trials=2,
        n_trajectories=3,
        sigma=2.0,
        lambda_=1.0,
        workers=2,
    )
    run_acceptance_benchmark(parallel, work_dir / "parallel")
    for name in ("acceptance.csv", "heatmap.csv"):
        assert (work_dir / "serial" / name).read_text() == (
            work_dir / "parallel" / name
        ).read_text()


def test_acceptance_benchmark_rescales_regulariser(work_dir):
    config = AcceptanceBenchmarkConfig(
        target="rotated_gamma_gaussian",
        dims=[2],
        sizes=[60],
        trials=1,
        n_trajectories=2,
        cv=GridConfig(sigma_grid=[2.0], lambda_grid=[1.0], folds=3),
        cv_points=30,
    )
    run_acceptance_benchmark(config, work_dir / "bench")
    (row,) = read_rows(work_dir / "bench" / "acceptance.csv")
    assert float(row["sigma"]) == 2.0
    assert float(row["lambda"]) == 2.0


def test_run_banana(work_dir):
    config = BananaConfig(
        banana=BananaParams(d=2),
        sizes=[30],
        samplers=["rw", "kmc_finite"],
        trials=2,
        sampler=small_sampler(sigma=10.0),
    )
    report = run_banana(config, work_dir / "banana")
    assert len(read_rows(work_dir / "banana" / "runs.csv")) == 4
    aggregate = {row["sampler"]: row for row in report["aggregate"]}
    assert aggregate["rw"]["n"] is None
    assert aggregate["kmc_finite"]["n"] == 30
    assert report["banana"]["d"] == 2
    with pytest.raises(ValueError):
        BananaConfig(samplers=["nuts"])


def test_run_abc(work_dir):
    config = AbcConfig(
        sampler=small_sampler(
            T=120,
            burn_in=20,
            n_basis=20,
            stop_adaptation_at=20,
            hamiltonian=HamiltonianParams(0.01, 0.1, 5, 5),
        ),
        samplers=["kmc_lite", "rw"],
        max_lag=10,
        bins=5,
    )
    report = run_abc(config, work_dir / "abc")
    out = work_dir / "abc"
    for name in ("chain_kmc_lite.csv", "chain_rw.csv", "summary_rw.json"):
        assert (out / name).exists()
    assert len(read_rows(out / "autocorrelation.csv")) == 11
    assert len(read_rows(out / "histogram.csv")) == 5
    assert len(read_rows(out / "lognormal.csv")) == 4001
    assert report["marginal_contrast"]["samplers"] == ["kmc_lite", "rw"]
    assert set(report["lognormal"]) == {
        "true_posterior_mean",
        "true_posterior_precision",
        "synthetic_posterior_mean",
    }
    lognormal = report["lognormal"]
    assert lognormal["synthetic_posterior_mean"] > lognormal["true_posterior_mean"]
    with pytest.raises(KernhmcDimensionError):
        run_abc(AbcConfig(abc=ABCParams(theta_dim=2)), work_dir / "mismatch")


def test_run_diagnose(normal_samples_file, work_dir):
    metrics = run_diagnose(
        normal_samples_file,
        output=work_dir / "metrics.json",
        reference=normal_samples_file,
    )
    assert metrics["T"] == 500
    assert metrics["acceptance_rate"] == 1.0
    assert metrics["mmd"] == 0.0
    assert 350 <= metrics["ess"]["min_ess"] <= 500
    assert read_json(work_dir / "metrics.json")["d"] == 1
    with pytest.raises(KernhmcInputError):
        run_diagnose(normal_samples_file, reference=work_dir / "missing.csv")
    with pytest.raises(KernhmcInputError):
        run_diagnose(work_dir / "missing.csv")


@pytest.mark.slow
def test_banana_random_walk_reaches_target_acceptance(work_dir):
    config = BananaConfig(samplers=["rw"], sizes=[200], trials=3)
    report = run_banana(config, work_dir / "banana")
    (row,) = report["aggregate"]
    assert 0.18 <= row["acceptance"] <= 0.29


@pytest.mark.slow
def test_exact_trajectories_accepted(work_dir):
    config = TrajectoriesConfig(
        n_train=200, m=50, sigma=2.0, lambda_=1.0, n_trajectories=500
    )
    report = run_trajectories(config, work_dir / "trajectories")
    assert report["mean_exact_acceptance"] >= 0.95


@pytest.mark.slow
def test_lite_gradient_error_with_cross_validation(normal_samples_file, work_dir):
    config = FitConfig(
        input=str(normal_samples_file),
        estimator="lite",
        reference={"name": "isotropic_gaussian", "params": {"d": 1}},
    )
    report = run_fit(config, work_dir / "fit")
    assert report["n"] == 500
    assert report["cross_validation"] is not None
    assert report["gradient_mse"] <= 0.05


@pytest.mark.slow
def test_finite_gradient_error_with_cross_validation(work_dir):
    write_samples_csv(
        work_dir / "samples.csv", make_rng(7).standard_normal((2000, 1))
    )
    config = FitConfig(
        input=str(work_dir / "samples.csv"),
        estimator="finite",
        m=300,
        reference={"name": "isotropic_gaussian", "params": {"d": 1}},
    )
    report = run_fit(config, work_dir / "fit")
    assert report["n"] == 2000
    assert report["gradient_mse"] <= 0.05


@pytest.mark.slow
def test_acceptance_trends(work_dir):
    config = AcceptanceBenchmarkConfig(workers=4)
    report = run_acceptance_benchmark(config, work_dir / "acceptance")
    heatmap = np.asarray(report["mean_acceptance"])
    d8 = config.dims.index(8)
    assert np.all(np.diff(heatmap[d8]) > 0)
    n1000 = config.sizes.index(1000)
    assert np.all(np.diff(heatmap[:, n1000]) <= 0)


@pytest.mark.slow
def test_banana_trends(work_dir):
    config = BananaConfig(workers=4)
    report = run_banana(config, work_dir / "banana")
    rows = {(row["sampler"], row["n"]): row for row in report["aggregate"]}
    kmc = [rows[("kmc_finite", n)] for n in config.sizes]
    assert kmc[-1]["min_ess"] >= 2 * rows[("rw", None)]["min_ess"]
    norms = [row["mean_norm"] for row in kmc]
    assert norms[-1] < norms[0]
    for earlier, later in zip(norms, norms[1:]):
        assert later <= 1.1 * earlier
    assert 0.7 <= rows[("hmc", None)]["acceptance"] <= 0.9


@pytest.mark.slow
def test_surrogate_trajectories_match_exact(work_dir):
    config = TrajectoriesConfig(n_train=2000, n_trajectories=100)
    report = run_trajectories(config, work_dir / "trajectories")
    exact = report["mean_exact_acceptance"]
    assert exact >= 0.95
    assert abs(report["mean_kernel_acceptance"] - exact) <= 0.1
