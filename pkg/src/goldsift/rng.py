"""Seed derivation so every random choice in a run flows from one master seed.

Each consumer asks for a named substream (``derive_seed(seed, "folds", "V_R1U")``)
instead of sharing one RNG, so adding or reordering pipeline stages never
shifts the random draws of unrelated stages.
"""

from __future__ import annotations

import hashlib
import random

import numpy as np


def derive_seed(master_seed: int, *parts: object) -> int:
    """Derive a 63-bit child seed from the master seed and a substream name."""
    tag = ":".join([str(int(master_seed))] + [str(p) for p in parts])
    digest = hashlib.sha256(tag.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def substream(master_seed: int, *parts: object) -> np.random.Generator:
    """Seeded numpy generator for the named substream."""
    return np.random.default_rng(derive_seed(master_seed, *parts))


def py_substream(master_seed: int, *parts: object) -> random.Random:
    """Seeded stdlib generator for the named substream."""
    return random.Random(derive_seed(master_seed, *parts))
