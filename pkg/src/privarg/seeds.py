"""Deterministic seed derivation for reproducible pipelines."""

from __future__ import annotations

from hashlib import blake2b


def derive_seed(*parts: object) -> int:
    """Collapse a tuple of labels into a stable 64-bit seed."""
    joined = "\x1f".join(str(part) for part in parts)
    return int.from_bytes(blake2b(joined.encode(), digest_size=8).digest(), "big")
