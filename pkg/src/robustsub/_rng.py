"""Seeded random streams.

Every stochastic routine takes an explicit integer seed.  Streams are
Philox (counter-based) generators keyed by ``(seed, *key)`` so independent
pieces of work, such as the block pairs of one graph, get independent
substreams that do not depend on evaluation order.
"""

import numpy as np


def substream(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))
