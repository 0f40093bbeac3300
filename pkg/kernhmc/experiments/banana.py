"""Mixing of random-walk, HMC and kernel HMC chains on the banana target as the
surrogate's basis grows"""
import itertools
import logging
import typing as ty
from pathlib import Path
import attrs
import numpy as np
from kernhmc.core.diagnostics import acceptance_rate, mean_norm, min_ess
from kernhmc.core.enum import Algorithm
from kernhmc.core.samplers import run_sampler
from kernhmc.core.utils import asdict
from kernhmc.targets import make_banana
from .config import BananaConfig
from .io import Timings, map_trials, prepare_output, write_csv, write_report


logger = logging.getLogger("kernhmc")

KERNEL_ALGORITHMS = (Algorithm.kmc_lite, Algorithm.kmc_finite)


def banana_run(
    config: BananaConfig, algorithm: Algorithm, n: ty.Optional[int], trial: int
) -> ty.Tuple[float, float, float]:
    """One chain; returns its acceptance rate, the norm of its mean and its
    minimum ESS, all after burn-in"""
    sampler = attrs.evolve(
        config.sampler,
        algorithm=algorithm,
        n_basis=n if n is not None else config.sampler.n_basis,
        seed=config.seed + trial,
    )
    chain = run_sampler(make_banana(config.banana), sampler)
    kept = chain.post_burn_in(sampler.burn_in)
    result = (
        acceptance_rate(chain.accepted, sampler.burn_in),
        mean_norm(kept),
        min_ess(kept).min_ess,
    )
    logger.info(
        "Banana %s n=m=%s trial %d: acceptance %g, mean norm %g, min ESS %g",
        algorithm,
        n if n is not None else "-",
        trial,
        *result,
    )
    return result


def banana_runs(config: BananaConfig) -> ty.List[tuple]:
    """(algorithm, n, trial) of every run. The baselines have no basis, so they
    run once per trial with n = None"""
    runs = []
    for name in config.samplers:
        algorithm = Algorithm.parse(name)
        sizes = config.sizes if algorithm in KERNEL_ALGORITHMS else [None]
        for n, trial in itertools.product(sizes, range(config.trials)):
            runs.append((algorithm, n, trial))
    return runs


def run_banana(config: BananaConfig, output_dir: ty.Union[str, Path]) -> dict:
    """Runs every sampler on the banana with repeated seeds and writes

    * ``runs.csv``, one row per chain
    * ``aggregate.csv``, means over trials per (sampler, n = m), with the
      standard deviation of the minimum ESS
    * ``report.json``, the aggregated rows
    """
    output_dir = prepare_output(output_dir, config)
    timings = Timings()
    runs = banana_runs(config)
    with timings.stage("chains"):
        results = map_trials(
            banana_run,
            [(config,) + run for run in runs],
            workers=config.workers,
        )
    header = ["sampler", "n", "trial", "acceptance", "mean_norm", "min_ess"]
    write_csv(
        output_dir / "runs.csv",
        header,
        [
            [str(algorithm), n, trial] + list(result)
            for (algorithm, n, trial), result in zip(runs, results)
        ],
    )
    aggregate = []
    groups = {}
    for (algorithm, n, _), result in zip(runs, results):
        groups.setdefault((str(algorithm), n), []).append(result)
    for (algorithm, n), group in groups.items():
        group = np.array(group)
        aggregate.append(
            {
                "sampler": algorithm,
                "n": n,
                "acceptance": float(group[:, 0].mean()),
                "mean_norm": float(group[:, 1].mean()),
                "min_ess": float(group[:, 2].mean()),
                "sd_min_ess": float(group[:, 2].std()),
            }
        )
    write_csv(
        output_dir / "aggregate.csv",
        list(aggregate[0]),
        [list(row.values()) for row in aggregate],
    )
    report = {"banana": asdict(config.banana), "aggregate": aggregate}
    write_report(output_dir / "report.json", report)
    timings.save(output_dir)
    return report
