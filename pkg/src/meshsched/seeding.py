"""Seeded random streams.

All randomness goes through numpy's PCG64 bit generator seeded by a
``SeedSequence``. PCG64 output is specified bit-for-bit and identical across
platforms, and ``SeedSequence`` spawn keys give independent substreams
(one per network, per path group, ...) that do not depend on the order in
which they are requested.
"""

from __future__ import annotations

import numpy as np

__all__ = ["make_rng", "substream"]


def substream(seed: int, *keys: int) -> np.random.SeedSequence:
    """Return the seed sequence for ``seed`` refined by the integer ``keys``."""
    return np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))


def make_rng(seed: int | np.random.SeedSequence, *keys: int) -> np.random.Generator:
    """PCG64 generator for ``seed`` (optionally refined by ``keys``)."""
    if isinstance(seed, np.random.SeedSequence):
        if keys:
            seed = np.random.SeedSequence(
                entropy=seed.entropy, spawn_key=tuple(seed.spawn_key) + tuple(int(k) for k in keys)
            )
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(substream(seed, *keys)))
