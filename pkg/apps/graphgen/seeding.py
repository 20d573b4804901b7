"""Seed derivation.

Every random stream in the project comes from one 64-bit master seed. A
stream is addressed by a key path (for example ``(3, group, root_index)``)
and built from ``numpy.random.SeedSequence`` with that path as its spawn
key, feeding a counter-based Philox generator. Streams with different
keys are independent and do not depend on the order tasks are executed.
"""

import numpy as np

SEED_MAX = 2**64 - 1


def make_rng(seed, *key):
    sequence = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(sequence))


def derive_seed(seed, *key):
    """Return a 64-bit integer seed for the sub-stream at ``key``."""
    sequence = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])
