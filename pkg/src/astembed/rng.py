"""Named, reproducible random substreams derived from one root seed.

Every stochastic stage (sampling, training, forest, k-means, ...) pulls its
generator from ``substream(seed, name)`` so stages are independently
reproducible and adding a stage never perturbs another stage's stream.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["substream", "substream_seq"]


def _name_key(name: str) -> int:
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def substream_seq(seed: int, name: str, *indices: int) -> np.random.SeedSequence:
    """Seed sequence for stream ``name`` (optionally sub-indexed, e.g. per epoch)."""
    return np.random.SeedSequence([int(seed), _name_key(name), *map(int, indices)])


def substream(seed: int, name: str, *indices: int) -> np.random.Generator:
    """Fresh generator for the named stream."""
    return np.random.default_rng(substream_seq(seed, name, *indices))
