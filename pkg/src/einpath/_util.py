"""Small shared helpers."""

import hashlib


def derive_seed(*parts):
    """Derive a stable 63-bit sub-seed from a tuple of hashable parts.

    Uses sha256 of the repr, so the result is reproducible across runs,
    platforms and Python versions (unlike built-in `hash`).
    """
    digest = hashlib.sha256(repr(parts).encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1
