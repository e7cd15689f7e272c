"""Counter-based seed derivation.

Every random stream in a run (one per network's weights, one per episode's
initial state) gets its own 64-bit seed computed from the master seed and the
cell coordinates.  Nothing depends on evaluation order, so results do not
change with the number of workers.
"""

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF

TAG_WEIGHTS = 1
TAG_EPISODE = 2

_GOLDEN_A = 0x9E3779B97F4A7C15
_GOLDEN_N = 0xC2B2AE3D27D4EB4F
_GOLDEN_E = 0x165667B19E3779F9


def finalize64(z: int) -> int:
    """SplitMix64 output finalizer (bijective 64-bit mixer)."""
    z &= MASK64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & MASK64
    z ^= z >> 31
    return z


def derive_seed(master: int, tag: int, a: int, n: int, e: int = 0) -> int:
    # Python ints: numpy scalars would overflow instead of wrapping
    master, tag, a, n, e = int(master), int(tag), int(a), int(n), int(e)
    inner = (tag + a * _GOLDEN_A + n * _GOLDEN_N + e * _GOLDEN_E) & MASK64
    return finalize64((master + finalize64(inner)) & MASK64)


def weight_seed(master: int, a: int, n: int) -> int:
    return derive_seed(master, TAG_WEIGHTS, a, n, 0)


def episode_seed(master: int, a: int, n: int, e: int) -> int:
    return derive_seed(master, TAG_EPISODE, a, n, e)


def make_rng(seed: int) -> np.random.Generator:
    """Private generator for one stream; depends on ``seed`` only."""
    return np.random.Generator(np.random.PCG64(seed & MASK64))
