"""
Random stream management.

Every trial gets its own generator derived from (seed, stream key, index), so a
trial's draws never depend on how many workers ran or in which order.
"""
import numpy as np


def child_rng(seed: int, *key: int) -> np.random.Generator:
    """
    Derive an independent child stream from a master seed and an integer key.

    Args:
        seed: Master seed (64-bit integer)
        *key: Counter path, e.g. (cell_index, trial_index)

    Returns:
        A fresh numpy Generator; identical arguments always give identical streams
    """
    sequence = np.random.SeedSequence(entropy=int(seed) & ((1 << 64) - 1), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(sequence))


def open_unit(rng: np.random.Generator, size=None) -> np.ndarray:
    """Uniform draws on the open interval (0, 1)."""
    return rng.uniform(np.finfo(float).tiny, 1.0, size)
