"""Candidate verification against the original, unmapped patterns."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .alphabet import HashTable
from .core import Occurrence, PatternSet, as_array, occurrence_key
from .filter import Candidate
from .qgram import GramConfig


@dataclass(frozen=True)
class VerifyWindow:
    start_lo: int
    start_hi: int

    def __iter__(self):
        return iter(range(self.start_lo, self.start_hi + 1))

    def __len__(self) -> int:
        return max(0, self.start_hi - self.start_lo + 1)


def window_for(c: Candidate, q: int, n: int, m: int, overlapping: bool = False) -> VerifyWindow:
    """Byte offsets a candidate can stand for.

    With non-overlapping grams a hit at gram ``s`` may come from any of the
    q shifted copies, so ``2q - 1`` starts around ``q * s`` are checked.
    """
    if overlapping:
        return VerifyWindow(c.super_start, min(n - m, c.super_start))
    centre = q * c.super_start
    return VerifyWindow(max(0, centre - (q - 1)), min(n - m, centre + (q - 1)))


def verify(ps: PatternSet, text, c: Candidate, cfg: GramConfig, overlapping: bool = False) -> list[Occurrence]:
    arr = as_array(text)
    found = []
    for a in window_for(c, cfg.q, len(arr), ps.m, overlapping):
        for i, p in enumerate(ps.patterns):
            end = a + len(p)
            if end > len(arr):
                continue
            if arr[a:end].tobytes() == p:
                found.append(Occurrence(i, a))
    return found


def dedup_merge(streams: Iterable[Iterable[Occurrence]]) -> list[Occurrence]:
    """Union of occurrence lists, sorted by (offset, pattern index)."""
    merged = {Occurrence(*o) for s in streams for o in s}
    return sorted(merged, key=occurrence_key)


KEY_BYTES = 8


class VerifyIndex:
    """Patterns grouped by their first ``min(m, 8)`` bytes.

    The compiled verifier hashes the same number of text bytes at each
    start and only compares the patterns in the matching group.
    """

    def __init__(self, ps: PatternSet) -> None:
        self.key_len = min(ps.m, KEY_BYTES)
        data, offsets, lengths = ps.packed()
        self.data, self.offsets, self.lengths = data, offsets, lengths
        keys = np.array([prefix_key(p[: self.key_len]) for p in ps.patterns], dtype=np.uint64)
        self.perm = np.argsort(keys, kind="stable").astype(np.int64)
        sorted_keys = keys[self.perm]
        uniq, first = np.unique(sorted_keys, return_index=True)
        self.bucket_start = np.append(first, len(keys)).astype(np.int64)
        self.table = HashTable(uniq, np.arange(len(uniq), dtype=np.int64))

    @property
    def min_length(self) -> int:
        return int(self.lengths.min())

    def kernel_args(self):
        return (self.data, self.offsets, self.lengths, self.min_length, self.key_len, self.perm,
                self.bucket_start, self.table.keys, self.table.values, self.table.used)


def prefix_key(prefix: bytes) -> int:
    key = 0
    for c in prefix:
        key = (key << 8) | c
    return key
