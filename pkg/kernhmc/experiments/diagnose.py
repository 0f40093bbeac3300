"""Metrics of a chain file"""
import logging
import typing as ty
from pathlib import Path
from kernhmc.exceptions import KernhmcInputError
from kernhmc.core.diagnostics import acceptance_rate, mean_norm, min_ess, mmd_poly3
from kernhmc.core.samplers import ChainResult
from .io import read_samples_csv, write_report


logger = logging.getLogger("kernhmc")


def run_diagnose(
    chain_path: ty.Union[str, Path],
    output: ty.Optional[ty.Union[str, Path]] = None,
    reference: ty.Optional[ty.Union[str, Path]] = None,
    burn_in: int = 0,
) -> dict:
    """Computes the acceptance rate, ESS report and mean norm of a chain after
    burn-in, and its MMD against a reference sample file if one is given

    Parameters
    ----------
    chain_path : str or Path
        a chain written by the sample command, or any sample file whose
        coordinate columns are named x1, x2, ...
    output : str or Path, optional
        where to write the metrics as JSON
    reference : str or Path, optional
        sample file to compare the chain with
    burn_in : int
        number of initial iterations to discard
    """
    chain = ChainResult.from_csv(chain_path)
    if reference is not None and not Path(reference).exists():
        raise KernhmcInputError(f"Reference sample file '{reference}' does not exist")
    kept = chain.post_burn_in(burn_in)
    metrics = {
        "chain": str(chain_path),
        "T": chain.T,
        "d": chain.d,
        "burn_in": burn_in,
        "acceptance_rate": acceptance_rate(chain.accepted, burn_in),
        "mean_norm": mean_norm(kept),
        "ess": min_ess(kept).to_dict(),
    }
    if reference is not None:
        metrics["mmd"] = mmd_poly3(kept, read_samples_csv(reference))
    logger.info(
        "Chain '%s': acceptance %g, min ESS %g",
        chain_path,
        metrics["acceptance_rate"],
        metrics["ess"]["min_ess"],
    )
    if output is not None:
        write_report(output, metrics)
    return metrics
