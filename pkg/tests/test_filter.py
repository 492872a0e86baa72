import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from magsearch.core import naive_search, validate
from magsearch.filter import Candidate, OnTheFly, build_machine, read_count, scan
from magsearch.qgram import ConfigError, encode_text, make_config
from magsearch.superimpose import build_superpattern

ALL = (1 << 64) - 1


def machine_for(patterns, q=1, k=1, w=64):
    cfg = make_config(q)
    sp = build_superpattern(validate(patterns), cfg)
    return cfg, sp, build_machine(sp, k, w)


def unpacked_scan(sp, k, m_prime, codes):
    """k separate Shift-Or automata, one Python int each, fed the same samples."""
    out = set()
    for j in range(k):
        classes = [set(sp.classes[j + i * k].tolist()) for i in range(m_prime)]
        top = 1 << (m_prime - 1)
        D = (1 << m_prime) - 1
        for u in range(k - 1, len(codes), k):
            c = int(codes[u])
            B = sum(1 << i for i in range(m_prime) if c not in classes[i])
            D = ((D << 1) | B) & ((1 << m_prime) - 1)
            if not D & top:
                out.add((u - j - (m_prime - 1) * k, u, j))
    return out


def as_set(run):
    return {(c.super_start, c.sample_pos, c.alignment) for c in run.candidates}


def test_alignments_split():
    _, sp, fm = machine_for([b"abcdef"], k=2)
    assert fm.m_prime == 3
    for j, expected in enumerate([b"ace", b"bdf"]):
        for i, ch in enumerate(expected):
            assert sp.classes[j + i * 2].tolist() == [ch]
            bit = 1 << (j * 3 + i)
            assert int(fm.mask_table[ch]) & bit == 0


def test_degenerate_strides():
    _, _, fm = machine_for([b"abcdef"], k=1)
    assert fm.m_prime == 6
    _, _, fm = machine_for([b"abcdef"], k=6)
    assert fm.m_prime == 1
    assert fm.match_mask == fm.boundary_mask == 0b111111


def test_masks_layout():
    _, _, fm = machine_for([b"abcdef"], k=2)
    assert fm.match_mask == (1 << 2) | (1 << 5)
    assert fm.boundary_mask == 1 | (1 << 3)
    # a byte outside every class has all bits set
    assert int(fm.mask_table[ord("z")]) == ALL


def test_two_step_trace():
    _, _, fm = machine_for([b"ab"])
    assert int(fm.mask_table[ord("a")]) & 0b11 == 0b10
    assert int(fm.mask_table[ord("b")]) & 0b11 == 0b01
    keep = ALL ^ fm.boundary_mask
    D = ALL
    D = ((D << 1) & keep & ALL) | int(fm.mask_table[ord("a")])
    assert D & 0b11 == 0b10
    D = ((D << 1) & keep & ALL) | int(fm.mask_table[ord("b")])
    assert D & 0b11 == 0b01
    run = scan(fm, OnTheFly(make_config(1), b"ab"))
    assert run.candidates == [Candidate(0, 1, 0)]


def test_strided_hand_example():
    cfg, _, fm = machine_for([b"abba"], k=2)
    run = scan(fm, OnTheFly(cfg, b"zabbaz"))
    assert run.reads == 3
    assert [c.super_start for c in run.candidates] == [1]
    assert naive_search(validate([b"abba"]), b"zabbaz") == [(0, 1)]


def test_no_admitted_codes():
    cfg, _, fm = machine_for([b"abba"], k=2)
    run = scan(fm, OnTheFly(cfg, b"z" * 101))
    assert run.candidates == []
    assert read_count(run) == 101 // 2


@pytest.mark.parametrize("n, q, k, expected", [(1000, 2, 4, 125), (1000, 2, 1, 500), (1, 2, 1, 0), (0, 1, 1, 0)])
def test_read_count(n, q, k, expected):
    cfg, _, fm = machine_for([b"abcdefghijkl"], q=q, k=k)
    text = bytes(np.random.default_rng(n).integers(97, 100, n, dtype=np.uint8))
    assert read_count(scan(fm, OnTheFly(cfg, text))) == expected
    assert read_count(scan(fm, encode_text(cfg, text))) == expected


def test_invalid_stride():
    _, sp, _ = machine_for([b"abcd"])
    for k in (0, 5):
        with pytest.raises(ConfigError):
            build_machine(sp, k)
    with pytest.raises(ConfigError):
        build_machine(sp, 3, w=2)


def test_sparse_masks_above_budget():
    cfg, sp, fm = machine_for([b"abcdefghij", b"bcdefghijk"], q=4, k=1)
    assert cfg.gram_space > 1 << 24 and fm.sparse is not None
    dense = {int(c) for cls in sp.classes for c in cls.tolist()}
    assert len(fm.mask_table) == len(dense) + 1
    for j, cls in enumerate(sp.classes):
        for c in cls.tolist():
            assert fm.mask_of(c) & (1 << j) == 0
    assert fm.mask_of(12345) == ALL
    # the occurrence at offset 2 shows up as gram 1 ("cdef", the shift-2 copy)
    text = b"zzabcdefghijzz"
    assert [c.super_start for c in scan(fm, OnTheFly(cfg, text)).candidates] == [1]


def test_truncation_to_word():
    _, _, fm = machine_for([bytes(range(65, 65 + 40))], k=2, w=16)
    assert fm.m_prime == 8
    assert fm.k * fm.m_prime <= fm.w


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.binary(min_size=6, max_size=20), min_size=1, max_size=5),
    st.integers(1, 3),
    st.integers(0, 2**31),
    st.data(),
)
def test_packed_equals_unpacked(patterns, q, seed, data):
    cfg = make_config(q)
    sp = build_superpattern(validate(patterns), cfg)
    k = data.draw(st.integers(1, sp.length))
    w = data.draw(st.integers(k, 64))
    fm = build_machine(sp, k, w)
    rng = np.random.default_rng(seed)
    # low-entropy text built from pattern bytes so that candidates actually fire
    pool = np.frombuffer(b"".join(patterns), dtype=np.uint8)
    text = rng.choice(pool, size=int(rng.integers(0, 400))).tobytes()
    enc = encode_text(cfg, text)
    packed = scan(fm, enc)
    assert as_set(packed) == unpacked_scan(sp, k, fm.m_prime, enc.supers)
    assert as_set(scan(fm, OnTheFly(cfg, text))) == as_set(packed)
    assert packed.reads == len(enc) // k


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 64), st.integers(2, 4), st.integers(0, 2**31))
def test_single_pattern_candidates_are_occurrence_ends(m, sigma, seed):
    rng = np.random.default_rng(seed)
    text = rng.integers(0, sigma, 500, dtype=np.uint8).tobytes()
    start = int(rng.integers(0, 500 - m + 1))
    p = text[start : start + m]
    cfg, _, fm = machine_for([p])
    ends = [c.sample_pos for c in scan(fm, OnTheFly(cfg, text)).candidates]
    assert ends == [o.offset + m - 1 for o in naive_search(validate([p]), text)]
