import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from magsearch.core import naive_search, validate
from magsearch.engine import VARIANTS, Matcher, build_alphabet_map, search

MAPPINGS = ["auto", "identity", "freq", "balance", "lowbits:2", "qgram:64"]


def random_instance(rng, sigma, r, m, n, spread=0):
    text = rng.integers(0, sigma, n, dtype=np.uint8).tobytes()
    pats = []
    for _ in range(r):
        ln = m + int(rng.integers(0, spread + 1))
        if rng.random() < 0.7 and n >= ln:
            a = int(rng.integers(0, n - ln + 1))
            pats.append(text[a : a + ln])
        else:
            pats.append(rng.integers(0, sigma, ln, dtype=np.uint8).tobytes())
    return pats, text


def test_reference_example():
    for v in VARIANTS:
        assert search([b"abba", b"bbac"], b"xabbacy", v) == [(0, 1), (1, 2)]


def test_empty_text():
    for v in VARIANTS:
        assert search([b"abc"], b"", v) == []


def test_text_shorter_than_patterns():
    for v in VARIANTS:
        assert search([b"abcdef"], b"abc", v) == []


def test_unknown_variant():
    with pytest.raises(ValueError, match="unknown variant"):
        Matcher([b"a"], "bogus")


def test_tuned_parameters_are_recorded():
    m = Matcher([b"abcdefgh"] * 3, "mag", text_size=10_000)
    assert m.q >= 1 and m.k >= 1
    assert m.machine.k * m.machine.m_prime <= 64
    assert Matcher([b"abc"], "ac").q is None


def test_stats():
    text = b"abcabcabc" * 10
    m = Matcher([b"abcabc"], "mag", q=1, k=2, mapping="identity")
    m.search(text)
    assert m.stats.reads == len(text) // 2
    assert m.stats.candidates >= len(naive_search(validate([b"abcabc"]), text))


def test_auto_map_compacts_small_alphabets():
    ps = validate([b"acgt", b"ttga"])
    assert build_alphabet_map("auto", ps).sigma_prime == 4
    wide = validate([bytes(range(100))])
    assert build_alphabet_map("auto", wide).sigma_prime == 256
    assert build_alphabet_map("auto", wide, sigma_prime=8).sigma_prime == 8
    assert build_alphabet_map("balance", wide).sigma_prime == 16


@settings(max_examples=80, deadline=None)
@given(
    st.sampled_from([2, 4, 16, 64, 256]),
    st.integers(1, 20),
    st.integers(1, 24),
    st.integers(0, 2**31),
    st.sampled_from(VARIANTS),
    st.sampled_from(MAPPINGS),
    st.integers(0, 6),
)
def test_variants_match_oracle(sigma, r, m, seed, variant, mapping, spread):
    rng = np.random.default_rng(seed)
    pats, text = random_instance(rng, sigma, r, m, int(rng.integers(0, 2000)), spread)
    expected = naive_search(validate(pats), text)
    assert Matcher(pats, variant, mapping=mapping).search(text) == expected


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 4, 16]), st.integers(4, 16), st.integers(0, 2**31), st.data())
def test_explicit_q_k(sigma, m, seed, data):
    rng = np.random.default_rng(seed)
    pats, text = random_instance(rng, sigma, 5, m, 1500)
    q = data.draw(st.integers(1, min(4, (m + 1) // 2)))
    L = (m - q + 1) // q
    k = data.draw(st.integers(1, L))
    expected = naive_search(validate(pats), text)
    for variant in ("mag", "smag"):
        for mapping in ("identity", "freq", "balance", "lowbits:1"):
            got = Matcher(pats, variant, q=q, k=k, mapping=mapping).search(text)
            assert got == expected


@pytest.mark.parametrize("threads", [2, 3, 7])
@pytest.mark.parametrize("variant", ["mag", "smag", "ac", "naive"])
def test_threads(threads, variant):
    rng = np.random.default_rng(threads)
    pats, text = random_instance(rng, 4, 30, 6, 50_000, spread=5)
    single = Matcher(pats, variant).search_arrays(text)
    multi = Matcher(pats, variant).search_arrays(text, threads=threads)
    assert all(np.array_equal(a, b) for a, b in zip(single, multi))


def test_duplicates_and_prefixes():
    pats = [b"abab", b"abab", b"ababab", b"bab"]
    text = b"abababab"
    expected = naive_search(validate(pats), text)
    assert (0, 0) in expected and (1, 0) in expected
    for v in VARIANTS:
        assert search(pats, text, v) == expected
