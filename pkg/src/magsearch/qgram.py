"""q-gram super-characters.

A q-gram ``S[0..q)`` becomes the integer ``sum(map(S[i]) * sigma'**i)``,
evaluated with Horner's rule from the last byte down. When a
:class:`~magsearch.alphabet.QGramMap` is attached, that integer is further
reduced to a bin number.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .alphabet import AlphabetMap, QGramMap, build_identity_map, hash_get
from .core import as_array

MAX_Q = 8
# largest code space the filter stores as a dense mask table
GRAM_BUDGET = 1 << 24


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GramConfig:
    q: int
    map: AlphabetMap
    gram_map: QGramMap | None = None

    def __post_init__(self) -> None:
        if not 1 <= self.q <= MAX_Q:
            raise ConfigError(f"q must be in 1..{MAX_Q}, got {self.q}")
        if self.gram_space > 1 << 63:
            raise ConfigError(f"gram codes {self.sigma_prime}^{self.q} do not fit in a signed 64-bit word")

    @property
    def sigma_prime(self) -> int:
        return self.map.sigma_prime

    @property
    def gram_space(self) -> int:
        return self.sigma_prime**self.q

    @property
    def code_space(self) -> int:
        """Number of distinct codes the filter may see."""
        return self.gram_map.sigma_prime if self.gram_map is not None else self.gram_space

    def kernel_args(self):
        """Positional arguments describing this encoding to the compiled scanners."""
        if self.gram_map is None:
            keys = np.zeros(1, dtype=np.uint64)
            values = np.zeros(1, dtype=np.int64)
            used = np.zeros(1, dtype=np.bool_)
            return self.map.table, np.uint64(self.sigma_prime), self.q, False, keys, values, used, 0
        gm = self.gram_map
        t = gm.table
        return (self.map.table, np.uint64(self.sigma_prime), self.q, True,
                t.keys, t.values, t.used, gm.sigma_prime - 1)


def make_config(q: int, amap: AlphabetMap | None = None, gram_map: QGramMap | None = None) -> GramConfig:
    return GramConfig(q, amap if amap is not None else build_identity_map(), gram_map)


@dataclass(frozen=True)
class EncodedText:
    supers: np.ndarray  # int64 codes, one per non-overlapping gram
    origin: np.ndarray  # raw bytes
    q: int

    def __len__(self) -> int:
        return len(self.supers)


def horner(mapped: np.ndarray, radix: int) -> np.ndarray:
    """Horner evaluation along the last axis, weight radix**i for column i."""
    radix = np.uint64(radix)
    acc = np.zeros(mapped.shape[:-1], dtype=np.uint64)
    for i in range(mapped.shape[-1] - 1, -1, -1):
        acc = acc * radix + mapped[..., i]
    return acc


def reduce_codes(cfg: GramConfig, raw: np.ndarray) -> np.ndarray:
    if cfg.gram_map is None:
        return raw.astype(np.int64)
    return cfg.gram_map.lookup_array(raw)


def encode_raw(cfg: GramConfig, data: bytes) -> int:
    """Horner code of exactly q bytes, before any q-gram map."""
    if len(data) != cfg.q:
        raise ConfigError(f"expected {cfg.q} bytes, got {len(data)}")
    acc = 0
    for c in reversed(data):
        acc = acc * cfg.sigma_prime + int(cfg.map.table[c])
    return acc


def encode_gram(cfg: GramConfig, data: bytes) -> int:
    raw = encode_raw(cfg, data)
    if cfg.gram_map is not None:
        return cfg.gram_map[raw]
    return raw


def encode_text(cfg: GramConfig, text) -> EncodedText:
    """Pre-encode every non-overlapping gram; trailing ``n mod q`` bytes are dropped."""
    arr = as_array(text)
    n_q = len(arr) // cfg.q
    mapped = cfg.map.table[arr[: n_q * cfg.q]].reshape(n_q, cfg.q)
    return EncodedText(reduce_codes(cfg, horner(mapped, cfg.sigma_prime)), arr, cfg.q)


def gram_at(cfg: GramConfig, text, u: int) -> int:
    """Code of the u-th non-overlapping gram, computed from the raw text."""
    arr = as_array(text)
    if u < 0 or u * cfg.q + cfg.q > len(arr):
        raise IndexError(f"gram {u} out of range for text of {len(arr)} bytes with q={cfg.q}")
    return int(gram_code(arr, u * cfg.q, *cfg.kernel_args()))


@njit(cache=True, nogil=True, inline="always")
def gram_code(text, pos, table, radix, q, use_hash, keys, values, used, default):
    code = np.uint64(0)
    for i in range(q - 1, -1, -1):
        code = code * radix + table[text[pos + i]]
    if use_hash:
        return hash_get(keys, values, used, code, default)
    return np.int64(code)


def factor_pattern(cfg: GramConfig, p: bytes, shift: int, length: int) -> np.ndarray:
    """Non-overlapping grams of ``p`` starting at ``shift``: gram j covers ``p[shift+jq : shift+(j+1)q]``."""
    if shift < 0 or shift + length * cfg.q > len(p):
        raise ConfigError(
            f"pattern of length {len(p)} cannot supply {length} grams of {cfg.q} from shift {shift}"
        )
    arr = np.frombuffer(p, dtype=np.uint8)[shift : shift + length * cfg.q]
    mapped = cfg.map.table[arr].reshape(length, cfg.q)
    return reduce_codes(cfg, horner(mapped, cfg.sigma_prime))


def factor_pattern_overlapping(cfg: GramConfig, p: bytes) -> np.ndarray:
    """All ``len(p) - q + 1`` overlapping grams of ``p``."""
    if len(p) < cfg.q:
        raise ConfigError(f"pattern of length {len(p)} is shorter than q={cfg.q}")
    arr = cfg.map.table[np.frombuffer(p, dtype=np.uint8)]
    windows = np.lib.stride_tricks.sliding_window_view(arr, cfg.q)
    return reduce_codes(cfg, horner(windows, cfg.sigma_prime))


def gram_counts(amap: AlphabetMap, q: int, patterns, length: int | None = None) -> dict[int, int]:
    """Raw gram frequencies over every shift of every pattern, for building a q-gram map.

    ``length`` caps the number of grams taken per shift.
    """
    counts: dict[int, int] = {}
    for p in patterns:
        arr = amap.table[np.frombuffer(p, dtype=np.uint8)]
        for s in range(q):
            L = (len(p) - s) // q if length is None else length
            if L <= 0:
                continue
            raw = horner(arr[s : s + L * q].reshape(L, q), amap.sigma_prime)
            vals, cnt = np.unique(raw, return_counts=True)
            for v, c in zip(vals.tolist(), cnt.tolist()):
                counts[v] = counts.get(v, 0) + c
    return counts
