"""Deterministic seed derivation.

Every random draw in a run flows from one top-level seed.  Sub-streams
(topology, trace, policy) get their own seeds derived by hashing the
parent seed together with a purpose label, so adding a consumer never
shifts the draws of another.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(*parts: object) -> int:
    """Stable 63-bit seed from any printable parts (seed, labels, indices)."""
    text = "\x1f".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def new_rng(*parts: object) -> np.random.Generator:
    """Generator seeded from :func:`derive_seed` of the given parts."""
    return np.random.default_rng(derive_seed(*parts))
