"""Deterministic random number streams.

Every randomised stage draws from a generator derived from one 64-bit
run seed plus a short stage label. The derivation is fixed: the label
bytes are folded into a ``numpy.random.SeedSequence`` alongside the run
seed, so two runs with the same seed and the same label always see the
same stream, and distinct labels give statistically independent streams.
"""

from __future__ import annotations

import numpy as np

__all__ = ["stage_seed", "stage_rng"]


def stage_seed(seed: int, label: str) -> np.random.SeedSequence:
    """Seed material for one named stage of a run.

    The label is encoded big-endian and appended to the entropy pool, so
    the scheme is reproducible across platforms and numpy versions that
    keep the SeedSequence hashing stable.
    """
    if not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    if seed < 0 or seed >= 2**64:
        raise ValueError("seed must fit in an unsigned 64-bit integer")
    if not label:
        raise ValueError("stage label must be non-empty")
    tag = int.from_bytes(label.encode("utf-8"), "big")
    return np.random.SeedSequence([int(seed), tag])


def stage_rng(seed: int, label: str) -> np.random.Generator:
    """Generator for one named stage (PCG64 under the hood)."""
    return np.random.default_rng(stage_seed(seed, label))
