"""
Random number substreams.

All randomness goes through numpy's Philox-4x64-10 counter-based generator
seeded by a `SeedSequence(seed, spawn_key=key)`. A key is a tuple of
non-negative integers naming the consumer, for example `(b,)` for bootstrap
replicate b or `(s, r)` for replication r of design s. Streams with
different keys are independent and do not depend on how work is scheduled.
"""

import numpy as np

GENERATOR_NAME = "numpy.random.Philox (4x64-10) seeded by SeedSequence(seed, spawn_key)"


def child_generator(seed: int, *key: int) -> np.random.Generator:
    """Return the generator for substream `key` of master `seed`."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def derive_seed(seed: int, *key: int) -> int:
    """Derive a 63-bit integer seed for substream `key` of master `seed`."""
    state = np.random.SeedSequence(seed, spawn_key=key).generate_state(1, dtype=np.uint64)
    return int(state[0] >> np.uint64(1))
