"""
Seed derivation for reproducible, schedule-independent Monte-Carlo runs.

A master seed is combined with a tuple of keys (distribution label, q, n,
repetition index, ...) into a numpy SeedSequence. Equal keys always give the
same stream; different keys give statistically independent streams.
"""

from __future__ import annotations

import hashlib
import struct

import numpy as np

from errors import ValidationError


def _key_to_int(key) -> int:
    """Map a key (str, int or float) to a nonnegative integer deterministically."""
    if isinstance(key, (bool, np.bool_)):
        return int(key)
    if isinstance(key, (int, np.integer)):
        if key < 0:
            raise ValidationError(f"Seed keys must be nonnegative, got {key}")
        return int(key)
    if isinstance(key, (float, np.floating)):
        # IEEE bits, so 0.4 and 0.40000000000000002 agree but 0.4 and 0.41 do not
        return struct.unpack("<Q", struct.pack("<d", float(key)))[0]
    digest = hashlib.blake2b(str(key).encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def derive_seed(master_seed: int, *keys) -> np.random.SeedSequence:
    """Derive the seed sequence for the stream identified by ``keys``."""
    if master_seed < 0:
        raise ValidationError(f"master_seed must be nonnegative, got {master_seed}")
    return np.random.SeedSequence(
        entropy=int(master_seed),
        spawn_key=tuple(_key_to_int(k) for k in keys),
    )


def make_rng(seed) -> np.random.Generator:
    """Accept an int, a SeedSequence or a Generator and return a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
