"""The matcher front end: choose parameters, build the filter, search texts."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .alphabet import (
    AlphabetMap,
    Histogram,
    build_balanced_map,
    build_frequency_map,
    build_identity_map,
    build_lowbits_map,
    build_qgram_map,
    parse_mapping,
)
from .core import (
    AhoCorasick,
    Occurrence,
    PatternSet,
    as_array,
    naive_search_arrays,
    sort_arrays,
    to_occurrences,
    validate,
)
from .filter import FilterMachine, build_machine, run_kernel
from .qgram import GRAM_BUDGET, EncodedText, GramConfig, encode_text, gram_counts, make_config
from .superimpose import build_superpattern, build_superpattern_overlapping, superimposed_length
from .tuner import TuningInput, choose_k, choose_q
from .verify import VerifyIndex

log = logging.getLogger(__name__)

VARIANTS = ("mag", "smag", "shiftor_og", "naive", "ac")
AUTO_COMPACT_LIMIT = 64
DEFAULT_REDUCED_SIGMA = 16


@dataclass
class ScanStats:
    reads: int = 0
    candidates: int = 0

    def __iadd__(self, other: "ScanStats") -> "ScanStats":
        self.reads += other.reads
        self.candidates += other.candidates
        return self


def build_alphabet_map(mapping: str, ps: PatternSet, sigma_prime: int | None = None,
                       text_sample: bytes | None = None) -> AlphabetMap:
    """Byte-level map for a strategy name (``auto``, ``identity``, ``freq``, ``balance``, ``lowbits:L``)."""
    name, arg = parse_mapping(mapping)
    if name == "lowbits":
        return build_lowbits_map(arg)
    if name == "identity":
        return build_identity_map()
    observed = Histogram.from_patterns(ps, text_sample)
    sigma_obs = max(2, observed.distinct())
    if name in ("auto", "qgram"):
        if sigma_prime is not None:
            return build_frequency_map(observed, sigma_prime) if sigma_prime < 256 else build_identity_map()
        if sigma_obs <= AUTO_COMPACT_LIMIT:
            return build_frequency_map(observed, sigma_obs)
        return build_identity_map()
    h = Histogram.from_patterns(ps)
    sp = sigma_prime if sigma_prime is not None else min(sigma_obs, DEFAULT_REDUCED_SIGMA)
    if name == "freq":
        return build_frequency_map(h, sp)
    return build_balanced_map(h, sp)


class Matcher:
    """Multiple exact pattern matcher.

    ``variant`` selects the search path: ``mag`` encodes grams on the fly,
    ``smag`` pre-encodes the whole text, ``shiftor_og`` runs a plain Shift-Or
    over overlapping grams, and ``naive``/``ac`` are the reference matchers.
    Unset ``q`` and ``k`` are picked by the tuner; ``text_size`` is the
    expected text length used in its cost model.
    """

    def __init__(self, patterns, variant: str = "mag", *, q: int | None = None, k: int | None = None,
                 sigma_prime: int | None = None, mapping: str = "auto", w: int = 64,
                 text_sample: bytes | None = None, text_size: int = 1 << 20) -> None:
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}; choose from {', '.join(VARIANTS)}")
        self.ps = validate(patterns)
        self.variant = variant
        self.mapping = mapping
        self.stats = ScanStats()
        self._vindex = VerifyIndex(self.ps)
        self.cfg: GramConfig | None = None
        self.machine: FilterMachine | None = None
        self._ac: AhoCorasick | None = None
        if variant == "ac":
            self._ac = AhoCorasick(self.ps)
        elif variant != "naive":
            self._build_filter(q, k, sigma_prime, w, text_sample, text_size)

    def _build_filter(self, q, k, sigma_prime, w, text_sample, text_size) -> None:
        ps = self.ps
        name, arg = parse_mapping(self.mapping)
        amap = build_alphabet_map(self.mapping, ps, None if name == "qgram" else sigma_prime, text_sample)
        sigma_obs = max(2, Histogram.from_patterns(ps, text_sample).distinct())
        ti = TuningInput(sigma=max(sigma_obs, amap.sigma_prime), sigma_prime=amap.sigma_prime,
                         r=ps.r, m=ps.m, n=max(1, text_size), w=w)
        gram_map = None
        code_space = None
        if name == "qgram":
            if q is None:
                q = choose_q(ti, budget=None)
            while q > 1 and ps.m < 2 * q - 1:
                q -= 1
            L = None if self.variant == "shiftor_og" else superimposed_length(ps.m, q)
            gram_map = build_qgram_map(gram_counts(amap, q, [p[: ps.m] for p in ps.patterns], L), arg)
            code_space = arg
        elif q is None:
            q = choose_q(ti)
        self.cfg = GramConfig(q, amap, gram_map)

        if self.variant == "shiftor_og":
            sp = build_superpattern_overlapping(ps, self.cfg)
            k = 1
        else:
            sp = build_superpattern(ps, self.cfg)
            if k is None:
                k = choose_k(ti, q, code_space)
        self.superpattern = sp
        self.machine = build_machine(sp, k, w)
        log.debug("built filter q=%d k=%d m'=%d sigma'=%d code_space=%d",
                  q, k, self.machine.m_prime, amap.sigma_prime, self.cfg.code_space)

    @property
    def q(self) -> int | None:
        return self.cfg.q if self.cfg else None

    @property
    def k(self) -> int | None:
        return self.machine.k if self.machine else None

    @property
    def sigma_prime(self) -> int | None:
        return self.cfg.sigma_prime if self.cfg else None

    def encode(self, text) -> EncodedText:
        """Pre-encoding step of the ``smag`` variant."""
        return encode_text(self.cfg, text)

    def _search_chunk(self, arr: np.ndarray, encoded: EncodedText | None = None):
        if self.variant == "naive":
            idx, off = naive_search_arrays(self.ps, arr)
            return idx, off, ScanStats()
        if self.variant == "ac":
            idx, off = self._ac.search_arrays(arr)
            return idx, off, ScanStats()
        if self.variant == "smag":
            if encoded is None:
                encoded = self.encode(arr)
            codes, use_codes = encoded.supers, True
            enc = make_config(1).kernel_args()
        else:
            codes, use_codes = np.zeros(1, dtype=np.int64), False
            enc = self.cfg.kernel_args()
        idx, off, _, cnt, reads, hits = run_kernel(
            self.machine, arr, codes, use_codes, enc, verify=True, vindex=self._vindex
        )
        return idx[:cnt], off[:cnt], ScanStats(reads, hits)

    def search_arrays(self, text, encoded: EncodedText | None = None,
                      threads: int = 1) -> tuple[np.ndarray, np.ndarray]:
        """Occurrences as ``(pattern_indices, offsets)`` sorted by offset, then index."""
        arr = as_array(text)
        if threads <= 1 or len(arr) < 2 * threads * self.ps.max_length:
            idx, off, stats = self._search_chunk(arr, encoded)
            self.stats = stats
            return sort_arrays(idx, off)
        return self._search_parallel(arr, threads)

    def _search_parallel(self, arr: np.ndarray, threads: int):
        # chunks overlap so an occurrence starting in a chunk ends inside its slice
        n = len(arr)
        overlap = self.ps.max_length - 1
        bounds = np.linspace(0, n, threads + 1).astype(np.int64)

        def work(t):
            lo, hi = int(bounds[t]), int(bounds[t + 1])
            idx, off, stats = self._search_chunk(arr[lo : min(n, hi + overlap)])
            keep = off < hi - lo
            return idx[keep], off[keep] + lo, stats

        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(work, range(threads)))
        self.stats = ScanStats()
        for _, _, s in parts:
            self.stats += s
        idx = np.concatenate([p[0] for p in parts])
        off = np.concatenate([p[1] for p in parts])
        return sort_arrays(idx, off)

    def search(self, text, threads: int = 1) -> list[Occurrence]:
        return to_occurrences(*self.search_arrays(text, threads=threads))


def search(patterns, text, variant: str = "mag", **kwargs) -> list[Occurrence]:
    """One-shot convenience wrapper around :class:`Matcher`."""
    kwargs.setdefault("text_size", len(text))
    return Matcher(patterns, variant, **kwargs).search(text)


__all__ = ["Matcher", "ScanStats", "VARIANTS", "build_alphabet_map", "search", "GRAM_BUDGET"]
