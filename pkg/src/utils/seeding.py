"""Deterministic seed derivation."""

import hashlib


def derive_seed(base_seed: int, *keys: object) -> int:
    """
    Derive a child seed from a base seed and a key path.

    The derivation is ``blake2b("base:key1:key2...")`` truncated to 63 bits,
    so it is stable across processes and Python versions (unlike ``hash``).

    Args:
        base_seed: Run-level seed
        *keys: Path components, e.g. a record index or a stream name

    Returns:
        Non-negative 63-bit integer seed
    """
    text = ":".join(str(part) for part in (base_seed, *keys))
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big") & ((1 << 63) - 1)
