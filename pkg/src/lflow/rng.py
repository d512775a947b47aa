"""Counter-based deterministic random numbers.

Every random draw in the package comes from a stateless hash of
(master_seed, counter), so results never depend on call order, thread
count, or process layout.  The hash is the SplitMix64 output mixer
applied to master_seed + (counter + 1) * GOLDEN, and the 64-bit result
is scaled into [0, 1) by taking the top 53 bits.
"""

from __future__ import annotations

import numpy as np

GOLDEN = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1
_INV_2_53 = 2.0 ** -53


def splitmix64(value: int) -> int:
    """SplitMix64 output mixer on a 64-bit integer."""
    z = value & _MASK
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK
    return z ^ (z >> 31)


def unit_uniform(master_seed: int, counter: int) -> float:
    """U(master_seed, counter) in [0, 1)."""
    x = splitmix64((master_seed + (counter + 1) * GOLDEN) & _MASK)
    return (x >> 11) * _INV_2_53


def unit_uniform_array(master_seed: int, start: int, count: int) -> np.ndarray:
    """Vector of U(master_seed, k) for k = start .. start+count-1.

    Bit-identical to calling unit_uniform counter by counter.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    k = np.arange(start, start + count, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(master_seed & _MASK) + (k + np.uint64(1)) * np.uint64(GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * _INV_2_53
