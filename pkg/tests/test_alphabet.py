import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from magsearch.alphabet import (
    Histogram,
    ParameterError,
    bin_weights,
    build_balanced_map,
    build_frequency_map,
    build_identity_map,
    build_lowbits_map,
    build_qgram_map,
    parse_mapping,
)


def best_max_weight(weights, bins):
    """Exhaustive min-max bin weight over all assignments."""
    best = None
    for assign in itertools.product(range(bins), repeat=len(weights)):
        loads = [0] * bins
        for w, b in zip(weights, assign):
            loads[b] += w
        best = max(loads) if best is None else min(best, max(loads))
    return best


def test_identity():
    amap = build_identity_map()
    assert amap.sigma_prime == 256
    assert [amap[c] for c in range(256)] == list(range(256))


def test_frequency_map_ranks():
    amap = build_frequency_map(Histogram.from_counts({"a": 5, "b": 3, "c": 1}), 3)
    assert (amap[ord("a")], amap[ord("b")], amap[ord("c")]) == (0, 1, 2)
    assert all(amap[c] == 2 for c in range(256) if c not in b"ab")


def test_frequency_map_all_zero():
    amap = build_frequency_map(Histogram(np.zeros(256, dtype=np.int64)), 4)
    # zero counts: ranks 0..2 go to bytes 0..2 by the byte-value tie-break
    assert [amap[c] for c in range(3)] == [0, 1, 2]
    assert all(amap[c] == 3 for c in range(3, 256))


def test_frequency_map_tie_break():
    amap = build_frequency_map(Histogram.from_counts({"a": 2, "b": 2}), 2)
    assert amap[ord("a")] == 0
    assert amap[ord("b")] == 1
    assert all(amap[c] == 1 for c in range(256) if c != ord("a"))


def test_balanced_map_example():
    counts = {"a": 5, "b": 4, "c": 3, "d": 2}
    amap = build_balanced_map(Histogram.from_counts(counts), 2)
    bins = {ch: amap[ord(ch)] for ch in "abcd"}
    assert bins["a"] == bins["d"] != bins["b"] == bins["c"]
    weights = bin_weights(amap.table, Histogram.from_counts(counts).counts, 2)
    assert sorted(weights.tolist()) == [7, 7]
    assert best_max_weight([5, 4, 3, 2], 2) == 7


def test_balanced_map_single_loaded():
    amap = build_balanced_map(Histogram.from_counts({"a": 9}), 2)
    assert amap[ord("a")] == 0
    # zero-count bytes land in the lighter bin
    assert all(amap[c] == 1 for c in range(256) if c != ord("a"))


def test_balanced_map_perfect():
    h = Histogram.from_counts({"a": 3, "b": 3, "c": 3})
    amap = build_balanced_map(h, 3)
    assert sorted(amap[ord(c)] for c in "abc") == [0, 1, 2]
    assert bin_weights(amap.table, h.counts, 3).tolist() == [3, 3, 3]


def test_lowbits():
    amap = build_lowbits_map(2)
    assert amap.sigma_prime == 4
    assert [amap[ord(c)] for c in "acgt"] == [1, 3, 3, 0]
    assert [build_lowbits_map(8)[c] for c in range(256)] == list(range(256))
    one = build_lowbits_map(1)
    assert one.sigma_prime == 2
    assert all(one[c] == c & 1 for c in range(256))


@pytest.mark.parametrize("ell", [0, 9])
def test_lowbits_range(ell):
    with pytest.raises(ParameterError):
        build_lowbits_map(ell)


@pytest.mark.parametrize("builder", [build_frequency_map, build_balanced_map])
def test_sigma_prime_too_small(builder):
    with pytest.raises(ParameterError):
        builder(Histogram.from_counts({"a": 1}), 1)


def test_qgram_map_examples():
    g = build_qgram_map({10: 4, 20: 4}, 2)
    assert (g[10], g[20], g[99]) == (0, 1, 1)
    g = build_qgram_map({1: 6, 2: 3, 3: 3}, 2)
    assert (g[1], g[2], g[3]) == (0, 1, 1)
    assert g.loads == [6, 6]
    assert best_max_weight([6, 3, 3], 2) == 6
    g = build_qgram_map({}, 2)
    assert g[0] == g[12345] == 1


def test_qgram_map_hash_lookup_matches_dict():
    rng = np.random.default_rng(3)
    grams = {int(k): int(v) for k, v in zip(rng.integers(0, 2**63, 500, dtype=np.uint64), rng.integers(1, 50, 500))}
    g = build_qgram_map(grams, 37)
    probe = np.array(list(grams) + [1, 2, 3], dtype=np.uint64)
    assert g.lookup_array(probe).tolist() == [g[int(c)] for c in probe]


def test_csv_dump():
    csv = build_lowbits_map(1).to_csv().splitlines()
    assert csv[0] == "byte,code"
    assert csv[1:4] == ["0,0", "1,1", "2,0"]
    assert len(csv) == 257


def test_parse_mapping():
    assert parse_mapping("lowbits:3") == ("lowbits", 3)
    assert parse_mapping("balance") == ("balance", None)
    assert parse_mapping("frequency") == ("freq", None)
    with pytest.raises(ParameterError):
        parse_mapping("bogus")
    with pytest.raises(ParameterError):
        parse_mapping("lowbits")


counts_st = st.lists(st.integers(0, 1000), min_size=256, max_size=256).map(
    lambda xs: Histogram(np.array(xs, dtype=np.int64))
)


@settings(max_examples=60, deadline=None)
@given(counts_st, st.integers(2, 256))
def test_range_and_balance_dominance(h, sigma_prime):
    freq = build_frequency_map(h, sigma_prime)
    bal = build_balanced_map(h, sigma_prime)
    for amap in (freq, bal):
        assert int(amap.table.max()) < sigma_prime
    assert bin_weights(bal.table, h.counts, sigma_prime).max() <= bin_weights(freq.table, h.counts, sigma_prime).max()


@given(st.integers(1, 8), st.integers(0, 255))
def test_lowbits_depends_on_low_bits_only(ell, c):
    amap = build_lowbits_map(ell)
    mask = (1 << ell) - 1
    for high in range(0, 256, 1 << ell):
        assert amap[(c & mask) | high] == amap[c]
