"""Superimposition of a pattern set into one pattern of gram classes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PatternSet
from .qgram import ConfigError, GramConfig, reduce_codes, horner


@dataclass(frozen=True)
class SuperPattern:
    classes: tuple[np.ndarray, ...]  # sorted distinct codes admitted at each position
    r: int
    q: int
    m: int
    code_space: int
    overlapping: bool = False

    @property
    def length(self) -> int:
        return len(self.classes)

    def admits(self, codes) -> bool:
        """True if the code sequence matches every class position-wise."""
        return len(codes) == self.length and all(
            _contains(cls, c) for cls, c in zip(self.classes, codes)
        )


def _contains(cls: np.ndarray, code: int) -> bool:
    i = np.searchsorted(cls, code)
    return bool(i < len(cls) and cls[i] == code)


def superimposed_length(m: int, q: int) -> int:
    return (m - q + 1) // q


def _prefix_matrix(ps: PatternSet) -> np.ndarray:
    m = ps.m
    return np.frombuffer(b"".join(p[:m] for p in ps.patterns), dtype=np.uint8).reshape(ps.r, m)


def shifted_codes(ps: PatternSet, cfg: GramConfig) -> np.ndarray:
    """Gram codes of every (shift, pattern) copy, shape ``(q * r, L)``, shift-major."""
    q = cfg.q
    L = superimposed_length(ps.m, q)
    if L < 1:
        raise ConfigError(
            f"shortest pattern ({ps.m} bytes) is too short for q={q}; need at least {2 * q - 1}, lower q"
        )
    mat = cfg.map.table[_prefix_matrix(ps)]
    blocks = [horner(mat[:, s : s + L * q].reshape(ps.r, L, q), cfg.sigma_prime) for s in range(q)]
    raw = np.concatenate(blocks, axis=0)
    return reduce_codes(cfg, raw.ravel()).reshape(raw.shape)


def build_superpattern(ps: PatternSet, cfg: GramConfig) -> SuperPattern:
    """Union, position by position, the non-overlapping grams of all q shifts of all patterns.

    Every copy is cut to the common length ``(m - q + 1) // q`` so that each
    shift contributes the same number of grams.
    """
    codes = shifted_codes(ps, cfg)
    classes = tuple(np.unique(codes[:, j]) for j in range(codes.shape[1]))
    return SuperPattern(classes, ps.r, cfg.q, ps.m, cfg.code_space)


def build_superpattern_overlapping(ps: PatternSet, cfg: GramConfig) -> SuperPattern:
    """Classes over overlapping grams: length ``m - q + 1``, no shifted copies needed."""
    q = cfg.q
    if ps.m < q:
        raise ConfigError(f"shortest pattern ({ps.m} bytes) is shorter than q={q}")
    mat = cfg.map.table[_prefix_matrix(ps)]
    windows = np.lib.stride_tricks.sliding_window_view(mat, q, axis=1)
    raw = horner(windows, cfg.sigma_prime)
    codes = reduce_codes(cfg, raw.ravel()).reshape(raw.shape)
    classes = tuple(np.unique(codes[:, j]) for j in range(codes.shape[1]))
    return SuperPattern(classes, ps.r, q, ps.m, cfg.code_space, overlapping=True)


def class_match_count(sp: SuperPattern) -> tuple[int, bool]:
    """Number of code strings the superimposed pattern admits.

    Returns ``(count, saturated)``; the count saturates at 2**63 - 1.
    """
    limit = (1 << 63) - 1
    total = 1
    for cls in sp.classes:
        total *= len(cls)
        if total > limit:
            return limit, True
    return total, False
