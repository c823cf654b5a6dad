"""Stable sub-seed derivation for reproducible, order-independent sampling.

Python's builtin hash() is salted per process, so sub-seeds are derived with
SHA-256 over a canonical string of the seed path. Identical inputs give
identical streams on any machine, in any execution order.
"""

import hashlib

import numpy as np


def derive_seed(*parts) -> int:
    """Derive a 63-bit seed from an arbitrary path of hashable parts.

    Floats are canonicalized through repr() so 0.1 and 0.1000... collide
    exactly when their float values do.
    """
    key = "\x1f".join(_canon(p) for p in parts)
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def rng_for(*parts) -> np.random.Generator:
    """Generator seeded from a derived sub-seed."""
    return np.random.default_rng(derive_seed(*parts))


def _canon(part) -> str:
    if isinstance(part, float):
        return repr(float(part))
    if isinstance(part, (int, np.integer)):
        return str(int(part))
    return str(part)
