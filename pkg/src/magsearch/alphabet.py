"""Alphabet reduction for the filter.

A map sends each byte (or each q-gram code) to one of ``sigma_prime`` codes.
Only the filter sees mapped symbols; verification always compares raw bytes.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from numba import njit

from .core import PatternSet

TEXT_SAMPLE_CAP = 1 << 20

STRATEGIES = ("identity", "freq", "balance", "lowbits", "qgram")


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class Histogram:
    counts: np.ndarray  # 256 int64

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @classmethod
    def from_counts(cls, counts: Mapping[int | str | bytes, int]) -> "Histogram":
        """Keys may be byte values, one-character strings or one-byte strings."""
        arr = np.zeros(256, dtype=np.int64)
        for key, v in counts.items():
            if isinstance(key, str):
                key = ord(key)
            elif isinstance(key, bytes):
                key = key[0]
            arr[key] += v
        return cls(arr)

    @classmethod
    def from_patterns(cls, ps: PatternSet, text: bytes | None = None) -> "Histogram":
        """Byte counts over the pattern set, optionally plus a capped text prefix."""
        arr = np.zeros(256, dtype=np.int64)
        for p in ps.patterns:
            arr += np.bincount(np.frombuffer(p, dtype=np.uint8), minlength=256)
        if text is not None:
            sample = np.frombuffer(text, dtype=np.uint8)[:TEXT_SAMPLE_CAP]
            arr += np.bincount(sample, minlength=256)
        return cls(arr)

    def distinct(self) -> int:
        return int(np.count_nonzero(self.counts))


@dataclass(frozen=True)
class AlphabetMap:
    table: np.ndarray  # 256 entries, uint64 codes
    sigma_prime: int
    strategy: str

    def __post_init__(self) -> None:
        if self.table.shape != (256,):
            raise ParameterError("alphabet table must have 256 entries")
        if int(self.table.max()) >= self.sigma_prime:
            raise ParameterError("alphabet code out of range")

    def __getitem__(self, c: int) -> int:
        return int(self.table[c])

    def apply(self, data: bytes) -> np.ndarray:
        return self.table[np.frombuffer(data, dtype=np.uint8)]

    def to_csv(self) -> str:
        rows = ["byte,code"]
        rows += [f"{c},{int(code)}" for c, code in enumerate(self.table)]
        return "\n".join(rows) + "\n"


def _check_sigma(sigma_prime: int) -> None:
    if not 2 <= sigma_prime <= 256:
        raise ParameterError(f"sigma_prime must be in 2..256, got {sigma_prime}")


def _by_frequency(counts: np.ndarray) -> list[int]:
    # descending count, ties by ascending byte value
    return sorted(range(256), key=lambda c: (-int(counts[c]), c))


def build_identity_map() -> AlphabetMap:
    return AlphabetMap(np.arange(256, dtype=np.uint64), 256, "identity")


def build_frequency_map(h: Histogram, sigma_prime: int) -> AlphabetMap:
    """Rank bytes by count; the top ``sigma_prime - 1`` get their rank, the rest share the last code."""
    _check_sigma(sigma_prime)
    table = np.full(256, sigma_prime - 1, dtype=np.uint64)
    for rank, c in enumerate(_by_frequency(h.counts)[: sigma_prime - 1]):
        table[c] = rank
    return AlphabetMap(table, sigma_prime, "freq")


def _lpt(weights: list[tuple[int, object]], bins: int) -> tuple[dict[object, int], list[int]]:
    """Greedy longest-processing-time packing: each item into the lightest bin.

    ``weights`` must already be in placement order. Ties between bins go to
    the lowest bin index.
    """
    heap = [(0, b) for b in range(bins)]
    loads = [0] * bins
    assign = {}
    for w, item in weights:
        load, b = heapq.heappop(heap)
        assign[item] = b
        loads[b] = load + w
        heapq.heappush(heap, (loads[b], b))
    return assign, loads


def build_balanced_map(h: Histogram, sigma_prime: int) -> AlphabetMap:
    """Spread bytes over ``sigma_prime`` bins so that bin weights are close to equal."""
    _check_sigma(sigma_prime)
    order = _by_frequency(h.counts)
    assign, _ = _lpt([(int(h.counts[c]), c) for c in order], sigma_prime)
    table = np.array([assign[c] for c in range(256)], dtype=np.uint64)
    return AlphabetMap(table, sigma_prime, "balance")


def build_lowbits_map(ell: int) -> AlphabetMap:
    if not 1 <= ell <= 8:
        raise ParameterError(f"lowbits width must be in 1..8, got {ell}")
    table = np.arange(256, dtype=np.uint64) & np.uint64((1 << ell) - 1)
    return AlphabetMap(table, 1 << ell, f"lowbits:{ell}")


def bin_weights(table: np.ndarray, counts: np.ndarray, sigma_prime: int) -> np.ndarray:
    return np.bincount(table.astype(np.int64), weights=counts, minlength=sigma_prime).astype(np.int64)


class HashTable:
    """Open-addressing ``uint64 -> int64`` table readable from compiled code."""

    def __init__(self, keys: np.ndarray, values: np.ndarray, default: int = -1) -> None:
        cap = 16
        while cap < 2 * max(1, len(keys)):
            cap <<= 1
        self.default = default
        self.keys = np.zeros(cap, dtype=np.uint64)
        self.values = np.full(cap, default, dtype=np.int64)
        self.used = np.zeros(cap, dtype=np.bool_)
        if len(keys):
            _hash_insert(self.keys, self.values, self.used,
                         np.asarray(keys, dtype=np.uint64), np.asarray(values, dtype=np.int64))

    def lookup_array(self, codes: np.ndarray) -> np.ndarray:
        return _hash_lookup_many(self.keys, self.values, self.used, codes.astype(np.uint64), self.default)


class QGramMap:
    """Balanced reduction of q-gram codes to ``sigma_prime`` bins.

    Grams never seen at build time fall into the last bin.
    """

    def __init__(self, gram_counts: Mapping[int, int], sigma_prime: int) -> None:
        if sigma_prime < 2:
            raise ParameterError(f"sigma_prime must be >= 2, got {sigma_prime}")
        self.sigma_prime = sigma_prime
        order = sorted(gram_counts.items(), key=lambda kv: (-kv[1], kv[0]))
        assign, loads = _lpt([(cnt, g) for g, cnt in order], sigma_prime)
        self.mapping: dict[int, int] = assign
        self.loads = loads
        self.table = HashTable(
            np.fromiter(assign.keys(), dtype=np.uint64, count=len(assign)),
            np.fromiter(assign.values(), dtype=np.int64, count=len(assign)),
            default=sigma_prime - 1,
        )

    def __getitem__(self, code: int) -> int:
        return self.mapping.get(int(code), self.sigma_prime - 1)

    def __len__(self) -> int:
        return len(self.mapping)

    def lookup_array(self, codes: np.ndarray) -> np.ndarray:
        return self.table.lookup_array(codes)


def build_qgram_map(gram_counts: Mapping[int, int], sigma_prime: int) -> QGramMap:
    return QGramMap(gram_counts, sigma_prime)


@njit(cache=True, nogil=True, inline="always")
def hash_slot(key, mask):
    h = key * np.uint64(0x9E3779B97F4A7C15)
    return np.int64((h >> np.uint64(29)) & mask)


@njit(cache=True, nogil=True, inline="always")
def hash_get(keys, values, used, key, default):
    mask = np.uint64(keys.shape[0] - 1)
    s = hash_slot(key, mask)
    while used[s]:
        if keys[s] == key:
            return values[s]
        s = (s + 1) & (keys.shape[0] - 1)
    return default


@njit(cache=True)
def _hash_insert(keys, values, used, new_keys, new_values):
    mask = np.uint64(keys.shape[0] - 1)
    for t in range(new_keys.shape[0]):
        key = new_keys[t]
        s = hash_slot(key, mask)
        while used[s] and keys[s] != key:
            s = (s + 1) & (keys.shape[0] - 1)
        used[s] = True
        keys[s] = key
        values[s] = new_values[t]


@njit(cache=True)
def _hash_lookup_many(keys, values, used, codes, default):
    out = np.empty(codes.shape[0], dtype=np.int64)
    for t in range(codes.shape[0]):
        out[t] = hash_get(keys, values, used, codes[t], default)
    return out


def parse_mapping(value: str) -> tuple[str, int | None]:
    """Split a CLI mapping name such as ``lowbits:2`` or ``qgram:4096``."""
    name, _, arg = value.partition(":")
    aliases = {"frequency": "freq", "balanced": "balance"}
    name = aliases.get(name, name)
    if name not in STRATEGIES and name != "auto":
        raise ParameterError(f"unknown mapping strategy {value!r}")
    if name in ("lowbits", "qgram"):
        if not arg:
            raise ParameterError(f"mapping {name} needs a parameter, e.g. {name}:2")
        return name, int(arg)
    if arg:
        raise ParameterError(f"mapping {name} takes no parameter")
    return name, None
