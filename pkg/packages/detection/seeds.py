"""Per-row random streams.

Row i of a sweep seeded with s draws from SeedSequence(s, spawn_key=(i,)),
so rows are independent and reproducible in any execution order.
"""

import numpy as np

MAX_SEED = 2**64 - 1


def row_sequence(seed: int, row: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=(row,))


def row_generator(seed: int, row: int) -> np.random.Generator:
    return np.random.default_rng(row_sequence(seed, row))


def row_seed(seed: int, row: int) -> int:
    """64-bit word identifying the row stream, recorded in sidecars."""
    return int(row_sequence(seed, row).generate_state(1, dtype=np.uint64)[0])
