"""Random number streams. Every random draw in the package comes from a Philox
counter-based generator, so that a (seed, stream) pair reproduces the same
numbers bit-exactly on every platform numpy supports."""
import numpy as np


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Creates an independent random stream

    Parameters
    ----------
    seed : int
        the base seed of the experiment/chain
    *stream : int
        optional keys that identify a sub-stream (e.g. trial index, chain
        index). Different keys give statistically independent streams

    Returns
    -------
    numpy.random.Generator
        a generator driven by the Philox bit generator
    """
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [int(s) for s in stream]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def as_rng(rng) -> np.random.Generator:
    """Accepts either a generator or an integer seed"""
    if isinstance(rng, np.random.Generator):
        return rng
    return make_rng(rng)
