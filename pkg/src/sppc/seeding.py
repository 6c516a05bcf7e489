"""Deterministic RNG streams split from a master seed."""

import random


def derive_rng(seed: int, *labels) -> random.Random:
    """Independent ``random.Random`` stream for ``labels`` under ``seed``.

    String seeds are hashed with SHA-512 by CPython, so streams are stable
    across runs and platforms.
    """
    return random.Random(f"{seed}:" + "/".join(str(x) for x in labels))
