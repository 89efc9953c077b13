"""Deterministic substream derivation for parallel-safe randomness.

Every random draw in the library flows from a Generator obtained through
`substream`, keyed by a tuple such as (master_seed, sample_size,
replicate_id, "bootstrap").  Keys map to SeedSequence entropy, so streams
for distinct keys are independent and the mapping is identical across
runs, platforms, and worker counts.
"""

from __future__ import annotations

import zlib

import numpy as np

__all__ = ["substream", "key_to_entropy"]


def key_to_entropy(key: tuple) -> list[int]:
    """Stable conversion of a mixed int/str key tuple to entropy words."""
    words: list[int] = []
    for part in key:
        if isinstance(part, (int, np.integer)):
            words.append(int(part) & 0xFFFFFFFFFFFFFFFF)
        elif isinstance(part, str):
            words.append(zlib.crc32(part.encode("utf-8")))
        else:
            raise TypeError(f"substream key parts must be int or str, got {type(part)}")
    return words


def substream(*key) -> np.random.Generator:
    """Generator for the substream identified by `key`."""
    return np.random.default_rng(np.random.SeedSequence(key_to_entropy(key)))
