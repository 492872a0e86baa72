"""Pattern sets, occurrences and the two reference matchers.

The reference matchers (:func:`naive_search` and :func:`ac_search`) share no
code with the filtering engine and are used to check it.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np
from numba import njit


class ValidationError(ValueError):
    """Raised for malformed pattern sets."""


class Occurrence(NamedTuple):
    pattern_index: int
    offset: int


def occurrence_key(occ: Occurrence) -> tuple[int, int]:
    return occ.offset, occ.pattern_index


@dataclass(frozen=True)
class PatternSet:
    patterns: tuple[bytes, ...]
    m: int = field(init=False)

    def __post_init__(self) -> None:
        if not self.patterns:
            raise ValidationError("pattern set is empty")
        for i, p in enumerate(self.patterns):
            if not isinstance(p, (bytes, bytearray)):
                raise ValidationError(f"pattern {i} is not a byte string")
            if len(p) == 0:
                raise ValidationError(f"pattern {i} is empty")
        object.__setattr__(self, "m", min(len(p) for p in self.patterns))

    @property
    def r(self) -> int:
        return len(self.patterns)

    @property
    def max_length(self) -> int:
        return max(len(p) for p in self.patterns)

    def __len__(self) -> int:
        return len(self.patterns)

    def packed(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Concatenated pattern bytes with per-pattern offsets and lengths."""
        lengths = np.array([len(p) for p in self.patterns], dtype=np.int64)
        offsets = np.zeros(len(lengths), dtype=np.int64)
        np.cumsum(lengths[:-1], out=offsets[1:])
        data = np.frombuffer(b"".join(self.patterns), dtype=np.uint8)
        return data, offsets, lengths


def validate(raw_patterns: Sequence[bytes]) -> PatternSet:
    """Build a :class:`PatternSet`; duplicates keep their own indices."""
    if isinstance(raw_patterns, PatternSet):
        return raw_patterns
    return PatternSet(tuple(bytes(p) for p in raw_patterns))


def as_array(text: bytes | bytearray | memoryview | np.ndarray) -> np.ndarray:
    if isinstance(text, np.ndarray):
        return text.astype(np.uint8, copy=False)
    return np.frombuffer(text, dtype=np.uint8)


def load_patterns(path: str | Path) -> PatternSet:
    """Read a newline-delimited pattern file (a final newline adds no pattern)."""
    data = Path(path).read_bytes()
    lines = data.split(b"\n")
    if lines and lines[-1] == b"":
        lines.pop()
    if not lines:
        raise ValidationError(f"{path}: no patterns")
    return validate(lines)


def write_patterns(path: str | Path, patterns: Sequence[bytes]) -> None:
    for i, p in enumerate(patterns):
        if b"\n" in p:
            raise ValidationError(f"pattern {i} contains a newline and cannot be written")
    Path(path).write_bytes(b"".join(p + b"\n" for p in patterns))


def to_occurrences(indices: np.ndarray, offsets: np.ndarray) -> list[Occurrence]:
    return [Occurrence(int(i), int(a)) for i, a in zip(indices.tolist(), offsets.tolist())]


def sort_arrays(indices: np.ndarray, offsets: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.lexsort((indices, offsets))
    return indices[order], offsets[order]


# compiled kernels grow their output buffers by doubling
@njit(cache=True, nogil=True)
def _grow(buf, size):
    out = np.empty(max(16, 2 * buf.shape[0]), dtype=buf.dtype)
    out[:size] = buf[:size]
    return out


@njit(cache=True, nogil=True)
def _naive_kernel(text, data, offsets, lengths):
    n = text.shape[0]
    r = lengths.shape[0]
    first = np.empty(r, dtype=np.uint8)
    for i in range(r):
        first[i] = data[offsets[i]]
    out_i = np.empty(1024, dtype=np.int64)
    out_a = np.empty(1024, dtype=np.int64)
    cnt = 0
    for a in range(n):
        c = text[a]
        for i in range(r):
            if first[i] != c:
                continue
            ln = lengths[i]
            if a + ln > n:
                continue
            base = offsets[i]
            h = 1
            while h < ln and text[a + h] == data[base + h]:
                h += 1
            if h == ln:
                if cnt == out_i.shape[0]:
                    out_i = _grow(out_i, cnt)
                    out_a = _grow(out_a, cnt)
                out_i[cnt] = i
                out_a[cnt] = a
                cnt += 1
    return out_i[:cnt], out_a[:cnt]


def naive_search_arrays(ps: PatternSet, text) -> tuple[np.ndarray, np.ndarray]:
    """Compare every pattern at every offset; returns ``(indices, offsets)``."""
    data, offsets, lengths = ps.packed()
    # offsets come out ascending and indices ascending within an offset
    return _naive_kernel(as_array(text), data, offsets, lengths)


def naive_search(ps: PatternSet, text) -> list[Occurrence]:
    return to_occurrences(*naive_search_arrays(ps, text))


class AhoCorasick:
    """Goto/fail/output automaton over bytes.

    The trie and failure links are built with plain dictionaries; the result
    is flattened into CSR arrays so the scan can run compiled.
    """

    def __init__(self, ps: PatternSet) -> None:
        self.ps = ps
        goto: list[dict[int, int]] = [{}]
        own: list[list[int]] = [[]]
        for idx, pattern in enumerate(ps.patterns):
            state = 0
            for c in pattern:
                nxt = goto[state].get(c)
                if nxt is None:
                    nxt = len(goto)
                    goto[state][c] = nxt
                    goto.append({})
                    own.append([])
                state = nxt
            own[state].append(idx)

        n_states = len(goto)
        fail = [0] * n_states
        # nearest proper suffix state that itself ends a pattern
        out_link = [-1] * n_states
        queue = deque(goto[0].values())
        while queue:
            s = queue.popleft()
            for c, t in goto[s].items():
                f = fail[s]
                while f and c not in goto[f]:
                    f = fail[f]
                ft = goto[f].get(c, 0)
                fail[t] = ft if ft != t else 0
                out_link[t] = fail[t] if own[fail[t]] else out_link[fail[t]]
                queue.append(t)

        self.n_states = n_states
        self.fail = np.array(fail, dtype=np.int64)
        self.out_link = np.array(out_link, dtype=np.int64)
        edge_ptr = np.zeros(n_states + 1, dtype=np.int64)
        for s in range(n_states):
            edge_ptr[s + 1] = edge_ptr[s] + len(goto[s])
        edge_sym = np.empty(edge_ptr[-1], dtype=np.uint8)
        edge_dst = np.empty(edge_ptr[-1], dtype=np.int64)
        for s in range(n_states):
            items = sorted(goto[s].items())
            lo = edge_ptr[s]
            for e, (c, t) in enumerate(items):
                edge_sym[lo + e] = c
                edge_dst[lo + e] = t
        self.edge_ptr, self.edge_sym, self.edge_dst = edge_ptr, edge_sym, edge_dst
        root = np.zeros(256, dtype=np.int64)
        for c, t in goto[0].items():
            root[c] = t
        self.root = root
        out_ptr = np.zeros(n_states + 1, dtype=np.int64)
        for s in range(n_states):
            out_ptr[s + 1] = out_ptr[s] + len(own[s])
        self.out_ptr = out_ptr
        self.out_idx = np.array([i for lst in own for i in lst], dtype=np.int64)
        self.lengths = np.array([len(p) for p in ps.patterns], dtype=np.int64)

    def search_arrays(self, text) -> tuple[np.ndarray, np.ndarray]:
        idx, off = _ac_kernel(
            as_array(text), self.root, self.edge_ptr, self.edge_sym, self.edge_dst,
            self.fail, self.out_link, self.out_ptr, self.out_idx, self.lengths,
        )
        return sort_arrays(idx, off)

    def search(self, text) -> list[Occurrence]:
        return to_occurrences(*self.search_arrays(text))


@njit(cache=True, nogil=True)
def _ac_step(state, c, root, edge_ptr, edge_sym, edge_dst, fail):
    while True:
        if state == 0:
            return root[c]
        lo = edge_ptr[state]
        hi = edge_ptr[state + 1]
        while lo < hi:
            mid = (lo + hi) >> 1
            if edge_sym[mid] < c:
                lo = mid + 1
            else:
                hi = mid
        if lo < edge_ptr[state + 1] and edge_sym[lo] == c:
            return edge_dst[lo]
        state = fail[state]


@njit(cache=True, nogil=True)
def _ac_kernel(text, root, edge_ptr, edge_sym, edge_dst, fail, out_link, out_ptr, out_idx, lengths):
    out_i = np.empty(1024, dtype=np.int64)
    out_a = np.empty(1024, dtype=np.int64)
    cnt = 0
    state = 0
    for pos in range(text.shape[0]):
        state = _ac_step(state, text[pos], root, edge_ptr, edge_sym, edge_dst, fail)
        s = state
        if out_ptr[s] == out_ptr[s + 1]:
            s = out_link[s]
        while s > 0:
            for e in range(out_ptr[s], out_ptr[s + 1]):
                i = out_idx[e]
                if cnt == out_i.shape[0]:
                    out_i = _grow(out_i, cnt)
                    out_a = _grow(out_a, cnt)
                out_i[cnt] = i
                out_a[cnt] = pos - lengths[i] + 1
                cnt += 1
            s = out_link[s]
    return out_i[:cnt], out_a[:cnt]


def ac_search_arrays(ps: PatternSet, text) -> tuple[np.ndarray, np.ndarray]:
    return AhoCorasick(ps).search_arrays(text)


def ac_search(ps: PatternSet, text) -> list[Occurrence]:
    return AhoCorasick(ps).search(text)
