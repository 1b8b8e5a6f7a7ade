"""Seed derivation for independent, reproducible runs, repeats and folds."""

import numpy as np


def derive_seed(master_seed: int, *path: int) -> int:
    """Derive a 63-bit child seed from a master seed and an index path.

    ``derive_seed(s, run)`` and ``derive_seed(s, repeat, fold)`` give
    independent streams that depend only on their arguments.
    """
    sequence = np.random.SeedSequence([int(master_seed) & 0xFFFFFFFFFFFFFFFF, *path])
    return int(sequence.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)
