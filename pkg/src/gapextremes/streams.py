"""Derivation of independent, reproducible random substreams.

All randomness in the package flows through numpy ``Generator`` objects
created here.  A substream is keyed by ``(master_seed, replication,
label)``; the label string is hashed into the seed material, so the
``"path"`` and ``"indicators"`` streams of one replication can never
collide, and the stream assigned to a replication does not depend on how
replications are scheduled across workers.
"""
from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["label_key", "substream"]


def label_key(label: str) -> int:
    """Stable 64-bit key for a component label."""
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def substream(master_seed: int, replication: int, label: str) -> np.random.Generator:
    """Generator for one (replication, component) cell of an experiment.

    Identical arguments always yield a generator producing an identical
    stream; distinct arguments yield statistically independent streams.
    """
    seq = np.random.SeedSequence([int(master_seed), int(replication), label_key(label)])
    return np.random.Generator(np.random.PCG64(seq))
