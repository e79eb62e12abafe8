"""Counter-based random streams.

Every randomized operation takes an integer master seed and derives
independent substreams from (seed, key...) tuples via Philox.  Trial t of a
Monte Carlo run always uses stream(seed, t), so trials can be generated in
any order (or in parallel) and still reproduce bit-identically.
"""

from __future__ import annotations

import numpy as np


def stream(seed: int, *key: int) -> np.random.Generator:
    """Return the generator for substream `key` of master seed `seed`."""
    entropy = (int(seed),) + tuple(int(k) for k in key)
    if any(part < 0 for part in entropy):
        raise ValueError("seeds and stream keys must be nonnegative integers")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
