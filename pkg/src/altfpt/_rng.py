"""Random-stream helpers shared by the samplers and the engine."""

import numpy as np

_TWO_M53 = 2.0 ** -53


def open_uniform(rng, size=None):
    """Uniform draws on the open interval (0, 1).

    ``Generator.random`` can return exactly 0.0, which breaks ``log`` and
    inverse-cdf transforms; the 53-bit lattice is shifted by half a step.
    """
    k = rng.integers(0, 2 ** 53, size=size, dtype=np.int64)
    return (k + 0.5) * _TWO_M53


def spawn_generators(seed, n_streams):
    """Independent counter-based generators derived from ``(seed, index)``."""
    children = np.random.SeedSequence(seed).spawn(n_streams)
    return [np.random.Generator(np.random.Philox(ss)) for ss in children]
