"""Running one chain on a named target"""
import logging
import typing as ty
from pathlib import Path
from kernhmc.core.diagnostics import mmd_curve
from kernhmc.core.samplers import ChainResult, run_sampler
from kernhmc.core.streams import make_rng
from .config import SampleConfig
from .io import Timings, prepare_output, write_csv, write_report


logger = logging.getLogger("kernhmc")

# sub-stream of the experiment seed the reference draws come from, kept clear of
# the chain's own streams
REFERENCE_STREAM = 100


def run_sample(config: SampleConfig, output_dir: ty.Union[str, Path]) -> ChainResult:
    """Runs the configured sampler and writes

    * ``chain.csv``, one row per iteration
    * ``summary.json``, acceptance rate, ESS and mean norm after burn-in
    * ``mmd.csv``, the MMD between growing prefixes of the chain and exact
      draws from the target, when reference samples are requested
    * ``surrogate.yaml``, the final surrogate of the kernel samplers
    """
    output_dir = prepare_output(output_dir, config)
    timings = Timings()
    target = config.target.build()
    sampler = config.sampler
    with timings.stage("sampling"):
        chain = run_sampler(target, sampler)
    chain.to_csv(output_dir / "chain.csv")
    summary = chain.summary(sampler.burn_in)
    if chain.surrogate is not None:
        chain.surrogate.save(output_dir / "surrogate.yaml")
    if config.reference_samples > 0:
        with timings.stage("mmd"):
            reference = target.sample(
                config.reference_samples, make_rng(sampler.seed, REFERENCE_STREAM)
            )
            checkpoints = config.mmd_checkpoints or [chain.T]
            kept = chain.post_burn_in(sampler.burn_in)
            curve = mmd_curve(kept, reference, checkpoints)
        write_csv(output_dir / "mmd.csv", ["t", "mmd"], curve)
        summary["mmd"] = curve[-1][1]
    write_report(output_dir / "summary.json", summary)
    timings.save(output_dir)
    return chain
