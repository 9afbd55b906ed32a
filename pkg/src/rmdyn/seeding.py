"""Deterministic per-trial random streams.

Every stochastic component draws from a numpy Generator seeded by

    key = mix64(master_seed XOR (trial_index * GOLDEN mod 2**64))

where mix64 is the splitmix64 finalizer.  GOLDEN is odd, so distinct trial
indices give distinct keys for a fixed master seed, and results never depend
on scheduling or worker count.  Non-trial streams (calibration, sub-runs)
use reserved index domains far above any realistic trial count.
"""

from __future__ import annotations

import numpy as np

__all__ = ["GOLDEN", "mix64", "derive_key", "trial_rng", "CALIBRATION_DOMAIN", "SUBRUN_DOMAIN"]

_MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

CALIBRATION_DOMAIN = 1 << 48
SUBRUN_DOMAIN = 1 << 49


def mix64(x: int) -> int:
    """splitmix64 output mix; a bijection on 64-bit integers."""
    x &= _MASK
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _MASK
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _MASK
    x ^= x >> 31
    return x


def derive_key(master_seed: int, trial_index: int) -> int:
    return mix64((master_seed ^ ((trial_index * GOLDEN) & _MASK)) & _MASK)


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    return np.random.default_rng(derive_key(master_seed, trial_index))
