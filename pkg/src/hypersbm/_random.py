"""Counter-based 64-bit mixing used for every seeded draw in the package.

All arithmetic is modulo 2**64 on unsigned integers, so the streams are
identical on every platform and independent of evaluation order.
"""

import numpy as np

GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX_MUL_1 = 0xBF58476D1CE4E5B9
MIX_MUL_2 = 0x94D049BB133111EB
MASK64 = (1 << 64) - 1


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a Python int."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX_MUL_1) & MASK64
    z = ((z ^ (z >> 27)) * MIX_MUL_2) & MASK64
    return z ^ (z >> 31)


def split_seed(seed: int, *indices: int) -> int:
    """Derive a child seed: ``s <- mix64(s + GOLDEN_GAMMA * (i + 1))`` per index."""
    s = seed & MASK64
    for i in indices:
        s = mix64(s + GOLDEN_GAMMA * (i + 1))
    return s


def uniforms(seed: int, counters: np.ndarray) -> np.ndarray:
    """Uniform doubles in [0, 1) for each counter, keyed by ``seed``.

    ``u = (mix64(seed + GOLDEN_GAMMA * (counter + 1)) >> 11) * 2**-53``.
    """
    c = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & MASK64) + np.uint64(GOLDEN_GAMMA) * (c + np.uint64(1))
        z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX_MUL_1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX_MUL_2)
        z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))
