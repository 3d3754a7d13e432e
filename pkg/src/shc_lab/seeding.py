"""Deterministic RNG stream derivation.

All samplers take a 64-bit master seed.  Independent streams (per
replica, per experiment row) are derived with a counter-based spawn key
so that results are reproducible and independent of worker count or
completion order.
"""

from __future__ import annotations

import numpy as np

__all__ = ["derive_rng", "derive_seed_sequence"]


def derive_seed_sequence(seed: int, *key: int) -> np.random.SeedSequence:
    """SeedSequence for (seed, key) with a stable counter-based split."""
    return np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))


def derive_rng(seed: int, *key: int) -> np.random.Generator:
    """Generator for the stream identified by (seed, *key)."""
    return np.random.default_rng(derive_seed_sequence(seed, *key))
