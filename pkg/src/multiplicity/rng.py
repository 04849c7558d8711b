"""Seeded random streams.

All randomness goes through :func:`stream`, a Philox (counter-based)
generator keyed by a 64-bit seed plus any number of integer keys such as a
repetition index.  Distinct keys give statistically independent streams, so
repetitions can run in any order or in parallel and still produce identical
results.
"""

import numpy as np

_MASK64 = (1 << 64) - 1


def stream(seed: int, *keys: int) -> np.random.Generator:
    entropy = [int(seed) & _MASK64] + [int(k) & _MASK64 for k in keys]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
