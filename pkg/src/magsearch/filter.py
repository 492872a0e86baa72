"""Strided bit-parallel filter over superimposed gram classes.

The superimposed pattern ``P`` (length ``L``) is split into ``k`` alignments
``P^j[i] = P[j + i*k]``, each ``m' = L // k`` classes long, packed side by
side in one machine word. Only every k-th gram of the text is read; each read
advances all k Shift-Or automata at once. A zero in the top bit of alignment
``j`` after reading gram ``u`` means ``P`` may start at gram
``u - j - (m' - 1) * k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .alphabet import HashTable, hash_get
from .core import _grow, as_array
from .qgram import GRAM_BUDGET, ConfigError, EncodedText, GramConfig, gram_code, make_config
from .superimpose import SuperPattern

WORD = 64
_ALL = np.uint64(0xFFFFFFFFFFFFFFFF)
_ONE = np.uint64(1)


@dataclass(frozen=True)
class FilterMachine:
    k: int
    m_prime: int
    w: int
    mask_table: np.ndarray = field(repr=False)  # uint64 per code, or per slot when sparse
    match_mask: int
    boundary_mask: int
    q: int
    overlapping: bool
    length: int  # superimposed pattern length before splitting
    # code -> slot in mask_table; set when the code space is too large for a dense table
    sparse: HashTable | None = field(default=None, repr=False)

    def mask_of(self, code: int) -> int:
        if self.sparse is None:
            return int(self.mask_table[code])
        return int(self.mask_table[self.sparse.lookup_array(np.array([code], dtype=np.uint64))[0]])

    def lookup_args(self):
        if self.sparse is None:
            return False, *_NO_SPARSE
        t = self.sparse
        return True, t.keys, t.values, t.used, t.default

    @property
    def step(self) -> int:
        """Byte distance between consecutive text grams."""
        return 1 if self.overlapping else self.q

    def n_grams(self, n: int) -> int:
        if self.overlapping:
            return max(0, n - self.q + 1)
        return n // self.q


@dataclass(frozen=True)
class Candidate:
    super_start: int
    sample_pos: int
    alignment: int


def build_machine(sp: SuperPattern, k: int, w: int = WORD) -> FilterMachine:
    """Pack the k alignments of ``sp`` into one ``w``-bit word.

    If ``k * (L // k)`` exceeds ``w`` each alignment is cut to its first
    ``w // k`` classes; that can only add candidates. Code spaces above
    ``GRAM_BUDGET`` get one mask per admitted code plus a shared all-ones
    mask, found through a hash table.
    """
    L = sp.length
    if not 1 <= w <= WORD:
        raise ConfigError(f"word width must be in 1..{WORD}, got {w}")
    if not 1 <= k <= L:
        raise ConfigError(f"stride k={k} must be in 1..{L}")
    m_prime = min(L // k, w // k)
    if m_prime < 1:
        raise ConfigError(f"stride k={k} leaves no room in a {w}-bit word")

    sparse = None
    if sp.code_space <= GRAM_BUDGET:
        masks = np.full(sp.code_space, _ALL, dtype=np.uint64)
    else:
        used = np.unique(np.concatenate([sp.classes[j + i * k] for j in range(k) for i in range(m_prime)]))
        sparse = HashTable(used.view(np.uint64), np.arange(len(used), dtype=np.int64), default=len(used))
        masks = np.full(len(used) + 1, _ALL, dtype=np.uint64)
        slot = {int(c): s for s, c in enumerate(used.tolist())}
    match_mask = 0
    boundary = 0
    for j in range(k):
        base = j * m_prime
        boundary |= 1 << base
        match_mask |= 1 << (base + m_prime - 1)
        for i in range(m_prime):
            cls = sp.classes[j + i * k]
            if sparse is not None:
                cls = np.array([slot[int(c)] for c in cls.tolist()], dtype=np.int64)
            masks[cls] &= ~np.uint64(1 << (base + i))
    return FilterMachine(k, m_prime, w, masks, match_mask, boundary, sp.q, sp.overlapping, L, sparse)


@dataclass
class ScanRun:
    """Result of one filter pass."""

    candidates: list[Candidate]
    reads: int


class OnTheFly:
    """Gram source that encodes each requested gram straight from the raw text."""

    def __init__(self, cfg: GramConfig, text) -> None:
        self.cfg = cfg
        self.text = as_array(text)


def scan(fm: FilterMachine, source: EncodedText | OnTheFly) -> ScanRun:
    """Run the filter and return every candidate with the number of grams read."""
    if isinstance(source, EncodedText):
        if fm.overlapping:
            raise ConfigError("pre-encoded text holds non-overlapping grams only")
        text = source.origin
        codes, use_codes = source.supers, True
        # encoding args are ignored when codes are supplied
        enc = make_config(1).kernel_args()
    else:
        text = source.text
        codes, use_codes = np.zeros(1, dtype=np.int64), False
        enc = source.cfg.kernel_args()
    out = run_kernel(fm, text, codes, use_codes, enc, verify=False)
    ss, u, j, cnt, reads, _ = out
    cands = [Candidate(a, b, c) for a, b, c in zip(ss[:cnt].tolist(), u[:cnt].tolist(), j[:cnt].tolist())]
    return ScanRun(cands, reads)


def read_count(run: ScanRun) -> int:
    return run.reads


_EMPTY_U8 = np.zeros(0, dtype=np.uint8)
_EMPTY_I64 = np.zeros(0, dtype=np.int64)


_NO_SPARSE = (np.zeros(1, dtype=np.uint64), np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.bool_), 0)

_NO_INDEX = (_EMPTY_U8, _EMPTY_I64, _EMPTY_I64, 1, 1, _EMPTY_I64, _EMPTY_I64,
             np.zeros(1, dtype=np.uint64), np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.bool_))


def run_kernel(fm: FilterMachine, text, codes, use_codes, enc, verify, vindex=None):
    """Dispatch to the compiled scanner.

    With ``verify`` set, candidates are checked in place against ``vindex``
    (a :class:`~magsearch.verify.VerifyIndex`) and the first two outputs are
    pattern indices and offsets; otherwise they are candidate fields.
    """
    text = as_array(text)
    n = len(text)
    n_grams = len(codes) if use_codes else fm.n_grams(n)
    if verify:
        index_args = vindex.kernel_args()
        verified = np.zeros((n >> 6) + 1, dtype=np.uint64)
    else:
        index_args = _NO_INDEX
        verified = np.zeros(1, dtype=np.uint64)
    slack = 0 if fm.overlapping else fm.q - 1
    return _scan_kernel(
        text, codes, use_codes, *enc,
        fm.step, n_grams, fm.k, fm.m_prime, fm.mask_table, *fm.lookup_args(),
        np.uint64(fm.boundary_mask), np.uint64(fm.match_mask),
        verify, slack, verified, *index_args,
    )


@njit(cache=True, nogil=True)
def _scan_kernel(text, codes, use_codes, table, radix, q, use_hash, hkeys, hvals, hused, hdefault,
                 step, n_grams, k, m_prime, masks, sparse, skeys, svals, sused, sdefault,
                 boundary, match_mask,
                 verify, slack, verified, pdata, poffs, plens, minlen, key_len, perm,
                 bucket_start, vkeys, vvals, vused):
    n = text.shape[0]
    keep = ~boundary
    out0 = np.empty(1024, dtype=np.int64)
    out1 = np.empty(1024, dtype=np.int64)
    out2 = np.empty(1024 if not verify else 0, dtype=np.int64)
    cnt = 0
    reads = 0
    hits_total = 0
    D = _ALL
    for u in range(k - 1, n_grams, k):
        reads += 1
        if use_codes:
            c = codes[u]
        else:
            c = gram_code(text, u * step, table, radix, q, use_hash, hkeys, hvals, hused, hdefault)
        if sparse:
            c = hash_get(skeys, svals, sused, np.uint64(c), sdefault)
        D = ((D << _ONE) & keep) | masks[c]
        hits = ~D & match_mask
        if hits == 0:
            continue
        for j in range(k):
            if ((hits >> np.uint64(j * m_prime + m_prime - 1)) & _ONE) == 0:
                continue
            hits_total += 1
            ss = u - j - (m_prime - 1) * k
            if not verify:
                if cnt == out0.shape[0]:
                    out0 = _grow(out0, cnt)
                    out1 = _grow(out1, cnt)
                    out2 = _grow(out2, cnt)
                out0[cnt] = ss
                out1[cnt] = u
                out2[cnt] = j
                cnt += 1
                continue
            base = ss * step
            lo = max(0, base - slack)
            hi = min(n - minlen, base + slack)
            for a in range(lo, hi + 1):
                word = a >> 6
                bit = _ONE << np.uint64(a & 63)
                if verified[word] & bit:
                    continue
                verified[word] |= bit
                key = np.uint64(0)
                for h in range(key_len):
                    key = (key << np.uint64(8)) | np.uint64(text[a + h])
                b = hash_get(vkeys, vvals, vused, key, -1)
                if b < 0:
                    continue
                for e in range(bucket_start[b], bucket_start[b + 1]):
                    i = perm[e]
                    ln = plens[i]
                    if a + ln > n:
                        continue
                    po = poffs[i]
                    ok = True
                    for h in range(key_len, ln):
                        if text[a + h] != pdata[po + h]:
                            ok = False
                            break
                    if ok:
                        if cnt == out0.shape[0]:
                            out0 = _grow(out0, cnt)
                            out1 = _grow(out1, cnt)
                        out0[cnt] = i
                        out1[cnt] = a
                        cnt += 1
    return out0, out1, out2, cnt, reads, hits_total
