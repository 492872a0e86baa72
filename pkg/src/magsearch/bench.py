"""Benchmark harness: pattern sampling, timing cells and CSV rows."""

from __future__ import annotations

import csv
import io
import time
from dataclasses import asdict, dataclass, fields
from typing import Iterable, Iterator, Sequence

import numpy as np

from .core import AhoCorasick, as_array, naive_search_arrays, validate
from .engine import Matcher

DEFAULT_RS = (10, 100, 1000, 10000)
DEFAULT_MS = (8, 16, 32, 64)
MIB = float(1 << 20)


@dataclass
class BenchRow:
    dataset: str
    variant: str
    r: int
    m: int
    q: int | str
    k: int | str
    sigma_prime: int | str
    mapping: str
    mb_per_s: float
    filter_reads: int
    candidates: int
    occurrences: int


BENCH_FIELDS = [f.name for f in fields(BenchRow)]


@dataclass(frozen=True)
class PatternSample:
    patterns: list[bytes]
    offsets: list[int]
    seed: int


class SampleError(ValueError):
    pass


def sample_patterns(corpus, r: int, m: int, seed: int = 0, forbid: bytes | None = b"\n") -> PatternSample:
    """Draw r substrings of length m at seeded uniform offsets.

    Windows containing a ``forbid`` byte are redrawn so that the sample can be
    written as a newline-delimited pattern file.
    """
    arr = as_array(corpus)
    n = len(arr)
    if r < 1:
        raise SampleError("r must be at least 1")
    if m > n:
        raise SampleError(f"pattern length {m} exceeds corpus length {n}")
    rng = np.random.default_rng(seed)
    bad = None
    if forbid:
        hit = np.isin(arr, np.frombuffer(forbid, dtype=np.uint8)).astype(np.int64)
        prefix = np.concatenate(([0], np.cumsum(hit)))
        bad = prefix[m:] - prefix[:-m]  # forbidden bytes inside each window
        if not (bad == 0).any():
            raise SampleError(f"no window of length {m} avoids the forbidden bytes")
    offsets: list[int] = []
    while len(offsets) < r:
        draw = rng.integers(0, n - m + 1, size=2 * (r - len(offsets)) + 8)
        if bad is not None:
            draw = draw[bad[draw] == 0]
        offsets.extend(draw[: r - len(offsets)].tolist())
    raw = arr.tobytes()
    return PatternSample([raw[a : a + m] for a in offsets], offsets, seed)


def _time(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def oracle_count(patterns, text) -> int:
    ac = AhoCorasick(validate(patterns))
    return len(ac.search_arrays(text)[0])


def run_cell(dataset: str, text: bytes, patterns: Sequence[bytes], variant: str, *,
             mapping: str = "auto", q: int | None = None, k: int | None = None,
             sigma_prime: int | None = None, include_prep: bool = False, check: bool = False,
             repeat: int = 1) -> BenchRow:
    """Time one (variant, pattern set) cell; ``repeat`` keeps the fastest search."""
    arr = as_array(text)
    matcher, prep = _time(lambda: Matcher(patterns, variant, q=q, k=k, sigma_prime=sigma_prime,
                                          mapping=mapping, text_size=len(arr)))
    best = None
    for _ in range(max(1, repeat)):
        encoded, enc_time = (None, 0.0)
        if variant == "smag":
            encoded, enc_time = _time(lambda: matcher.encode(arr))
        (idx, _), search_time = _time(lambda: matcher.search_arrays(arr, encoded=encoded))
        elapsed = search_time + (enc_time + prep if include_prep else 0.0)
        best = elapsed if best is None else min(best, elapsed)
    occurrences = len(idx)
    if check:
        expected = (len(naive_search_arrays(validate(patterns), arr)[0]) if variant == "ac"
                    else oracle_count(patterns, arr))
        if expected != occurrences:
            raise AssertionError(
                f"{dataset} {variant} r={len(patterns)}: {occurrences} occurrences, oracle says {expected}"
            )
    filtered = matcher.machine is not None
    return BenchRow(
        dataset=dataset,
        variant=variant,
        r=len(patterns),
        m=min(len(p) for p in patterns),
        q=matcher.q if filtered else "",
        k=matcher.k if filtered else "",
        sigma_prime=matcher.sigma_prime if filtered else "",
        mapping=mapping if filtered else "",
        mb_per_s=len(arr) / max(best, 1e-9) / MIB,
        filter_reads=matcher.stats.reads,
        candidates=matcher.stats.candidates,
        occurrences=occurrences,
    )


def run_bench(dataset: str, text: bytes, variants: Iterable[str], rs: Iterable[int] = DEFAULT_RS,
              ms: Iterable[int] = DEFAULT_MS, seed: int = 0, **kwargs) -> Iterator[BenchRow]:
    """One row per (variant, r, m); every variant sees the same pattern sample."""
    variants = list(variants)
    for m in ms:
        for r in rs:
            sample = sample_patterns(text, r, m, seed)
            for variant in variants:
                yield run_cell(dataset, text, sample.patterns, variant, **kwargs)


def format_row(row: BenchRow) -> dict:
    d = asdict(row)
    d["mb_per_s"] = f"{row.mb_per_s:.3f}"
    return d


def rows_to_csv(rows: Iterable[BenchRow], out: io.TextIOBase, header: bool = True) -> None:
    writer = csv.DictWriter(out, fieldnames=BENCH_FIELDS, lineterminator="\n")
    if header:
        writer.writeheader()
    for row in rows:
        writer.writerow(format_row(row))
        out.flush()
