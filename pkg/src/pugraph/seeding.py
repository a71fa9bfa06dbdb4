"""Deterministic derivation of per-task random generators.

All stochastic components take an integer master seed and derive child
generators from ``(seed, *keys)`` so that work units (walks, bagging rounds,
benchmark repeats) can run in any order, or in parallel, and still produce
identical numbers.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _key_to_int(key) -> int:
    if isinstance(key, (int, np.integer)):
        return int(key) & 0xFFFFFFFFFFFFFFFF
    digest = hashlib.sha256(str(key).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def derive_rng(seed: int, *keys) -> np.random.Generator:
    """Child generator for the work unit identified by ``keys``.

    Independent of call order: the stream depends only on the seed and keys.
    """
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [_key_to_int(k) for k in keys]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def derive_seed(seed: int, *keys) -> int:
    """Integer child seed, for APIs that take a seed rather than a generator."""
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [_key_to_int(k) for k in keys]
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])
