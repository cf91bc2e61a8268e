"""Named random substreams derived from one run seed."""

import hashlib

import numpy as np

DEFAULT_SEED = 20200817


def substream(seed: int, name: str) -> np.random.Generator:
    """Return an independent generator for ``name`` (e.g. ``"split"``, ``"tree/7"``).

    The stream depends only on ``(seed, name)``, so work can be reordered or
    parallelized without changing results.
    """
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    words = [int.from_bytes(digest[i : i + 4], "little") for i in range(0, 32, 4)]
    seed = int(seed) & 0xFFFFFFFFFFFFFFFF
    entropy = [seed & 0xFFFFFFFF, seed >> 32, *words]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def check_seed(seed) -> int:
    if seed is None:
        return DEFAULT_SEED
    if isinstance(seed, np.random.Generator):
        return int(seed.integers(0, 2**63))
    return int(seed) & 0xFFFFFFFFFFFFFFFF
