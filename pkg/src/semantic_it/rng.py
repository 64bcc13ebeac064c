"""Seeded random streams.

All randomness goes through Philox4x64-10, a counter-based generator. A
master seed plus a tuple of stream indices (block number, size index, ...)
is mixed by ``numpy.random.SeedSequence`` into an independent substream, so
results depend only on (seed, stream) and not on evaluation order.
"""
import numpy as np


def make_generator(seed: int, *stream: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(ss))
