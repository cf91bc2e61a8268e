"""Label reduction and train/test splitting."""

from __future__ import annotations

from collections import defaultdict

import numpy as np

from ..errors import DatasetTooSmall
from ..seeding import DEFAULT_SEED, substream
from ..taxonomy import ALL_TAGS

PRIORITY = ("feature_add", "bug_fix", "refactoring", "build", "testing", "documentation")
_RANK = {tag: i for i, tag in enumerate(PRIORITY + tuple(sorted(ALL_TAGS - set(PRIORITY))))}


def primary_tag(tags):
    """Reduce a tag set to the single tag used as single-label ground truth."""
    if not tags:
        return None
    return min(tags, key=lambda t: (_RANK.get(t, len(_RANK)), t))


def split_train_test(rows, fraction=0.8, seed=DEFAULT_SEED, key=None):
    """Seeded, stratified split of ``rows`` into ``(train, test)``.

    Rows are grouped by primary tag (``key`` overrides), shuffled within each
    group, then interleaved by within-group rank so every group is spread over
    both sides. ``round(fraction * n)`` rows go to train.
    """
    rows = list(rows)
    if not 0 < fraction < 1:
        raise DatasetTooSmall(f"fraction must be strictly between 0 and 1, got {fraction}")
    n = len(rows)
    n_train = int(round(fraction * n))
    if n_train < 1 or n_train > n - 1:
        raise DatasetTooSmall(f"{n} rows cannot be split {fraction:.2f}/{1 - fraction:.2f}")
    if key is None:
        key = lambda r: primary_tag(getattr(r, "tags", None)) or ""
    rng = substream(seed, "split")
    groups = defaultdict(list)
    for i, row in enumerate(rows):
        groups[key(row)].append(i)
    order = []
    for name in sorted(groups):
        members = groups[name]
        perm = rng.permutation(len(members))
        for rank, m in enumerate(perm):
            order.append(((rank + 0.5) / len(members), rng.random(), members[m]))
    order.sort()
    train_idx = sorted(i for _, _, i in order[:n_train])
    test_idx = sorted(i for _, _, i in order[n_train:])
    return [rows[i] for i in train_idx], [rows[i] for i in test_idx]


def indicator_matrix(tagsets, tags) -> np.ndarray:
    tags = list(tags)
    return np.array([[1 if t in s else 0 for t in tags] for s in tagsets], dtype=np.int8).reshape(-1, len(tags))
