"""Deterministic random-stream derivation.

Every stochastic component draws from a numpy Generator keyed by the run
seed plus a purpose path, e.g. ``rng_for(seed, "eval", 12)`` or
``rng_for(seed, "probe", shots, trial)``. Paths are collapsed with sha256,
so stream identity never depends on Python hash randomization, thread
layout, or call order, and distinct purposes never share a stream.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def derive_seed(seed: int, *path: int | str) -> int:
    """Collapse (seed, *path) into a stable 64-bit stream key."""
    h = hashlib.sha256()
    h.update((int(seed) & _MASK64).to_bytes(8, "little"))
    for part in path:
        if isinstance(part, str):
            raw = part.encode("utf-8")
            h.update(b"s" + len(raw).to_bytes(4, "little") + raw)
        else:
            h.update(b"i" + (int(part) & _MASK64).to_bytes(8, "little"))
    return int.from_bytes(h.digest()[:8], "little")


def rng_for(seed: int, *path: int | str) -> np.random.Generator:
    """Independent PCG64 stream for (seed, *path)."""
    return np.random.default_rng(np.random.SeedSequence(derive_seed(seed, *path)))
