import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from codeperturb.core import CodeSample, Language, PesoConfig
from codeperturb.errors import EmptyStream, LanguageMismatch, LexError
from codeperturb.similarity import (
    TokenStream,
    combined_score,
    greedy_tiles,
    levenshtein_distance,
    score_pair,
    semantic_similarity,
    surface_similarity,
    tokenize,
)

from .oracles import brute_force_coverage, dp_levenshtein

CFG = PesoConfig()


def sample(text, lang=Language.PYTHON, sid="s"):
    return CodeSample(id=sid, language=lang, text=text)


def stream(tokens):
    return TokenStream(tokens=tuple(tokens), source_spans=tuple((i, i + 1) for i in range(len(tokens))))


# ---------------------------------------------------------------------------
# Surface similarity
# ---------------------------------------------------------------------------

def test_surface_identical():
    assert surface_similarity("abc", "abc") == 1.0


def test_surface_empty_vs_text():
    assert surface_similarity("", "xyz") == 0.0
    assert surface_similarity("", "") == 1.0


def test_surface_kitten_sitting():
    assert surface_similarity("kitten", "sitting") == pytest.approx(1 - 3 / 7, abs=1e-12)


@given(st.text(max_size=64), st.text(max_size=64))
@settings(max_examples=300, deadline=None)
def test_surface_matches_dp_oracle(a, b):
    assert levenshtein_distance(a, b) == dp_levenshtein(a, b)
    expected = 1.0 if not a and not b else 1.0 - dp_levenshtein(a, b) / max(len(a), len(b))
    assert surface_similarity(a, b) == expected


@given(st.text(max_size=48), st.text(max_size=48))
@settings(max_examples=150, deadline=None)
def test_surface_symmetric_and_in_range(a, b):
    s = surface_similarity(a, b)
    assert s == surface_similarity(b, a)
    assert 0.0 <= s <= 1.0


def test_longer_strings_against_oracle():
    a = "def f(x):\n    return x * 2 + 1\n" * 8
    b = "def g(y):\n    return y + y + 1\n" * 8
    assert levenshtein_distance(a, b) == dp_levenshtein(a, b)


# ---------------------------------------------------------------------------
# Tokenize
# ---------------------------------------------------------------------------

def test_tokenize_rename_invariant():
    assert tokenize(sample("x = 1")).tokens == tokenize(sample("y = 1")).tokens


def test_tokenize_strips_comments():
    toks = tokenize(sample("// c\nreturn a", Language.GO))
    assert toks.tokens == ("return", "ID")


def test_tokenize_spans():
    ts = tokenize(sample("a+b"))
    assert len(ts) == 3
    assert ts.source_spans == ((0, 1), (1, 2), (2, 3))


def test_tokenize_lex_error():
    with pytest.raises(LexError):
        tokenize(sample('x = "oops'))


# ---------------------------------------------------------------------------
# Semantic similarity
# ---------------------------------------------------------------------------

def test_semantic_identical_full_tile():
    s = stream(["ID"] * 20)
    assert semantic_similarity(s, s, 9) == 1.0


def test_semantic_disjoint_alphabets():
    a = stream(["ID", "=", "INT"] * 10)
    b = stream(["while", "(", ")"] * 10)
    assert semantic_similarity(a, b, 9) == 0.0


def test_semantic_single_shared_run():
    shared = [f"k{i}" for i in range(10)]
    a = stream(shared + [f"a{i}" for i in range(10)])
    b = stream([f"b{i}" for i in range(20)] + shared)
    assert semantic_similarity(a, b, 9) == pytest.approx(2 * 10 / 50)


def test_semantic_both_empty_raises():
    with pytest.raises(EmptyStream):
        semantic_similarity(stream([]), stream([]), 9)


def test_semantic_one_empty():
    assert semantic_similarity(stream([]), stream(["ID"] * 12), 9) == 0.0


def test_semantic_short_identical_streams():
    s = stream(["ID", "=", "INT"])
    assert semantic_similarity(s, s, 9) == 1.0


token_alphabet = st.sampled_from(["ID", "INT", "STR", "=", "(", ")", "if", "+", ":", "return"])
token_streams = st.lists(token_alphabet, max_size=64).map(tuple)


@given(token_streams, token_streams, st.integers(min_value=1, max_value=6))
@settings(max_examples=200, deadline=None)
def test_semantic_matches_brute_force_oracle(a, b, min_len):
    if not a and not b:
        return
    got = semantic_similarity(stream(a), stream(b), min_len)
    # The oracle follows the same canonical orientation as the scorer.
    ca, cb = (a, b) if a <= b else (b, a)
    assert got == brute_force_coverage(ca, cb, min_len)


@given(token_streams, token_streams)
@settings(max_examples=100, deadline=None)
def test_semantic_symmetric_and_in_range(a, b):
    if not a and not b:
        return
    s = semantic_similarity(stream(a), stream(b), 3)
    assert s == semantic_similarity(stream(b), stream(a), 3)
    assert 0.0 <= s <= 1.0


def test_greedy_tiles_do_not_overlap():
    a = tuple(["x", "y"] * 20)
    b = tuple(["x", "y"] * 15 + ["z"] * 5)
    tiles = greedy_tiles(a, b, 2)
    seen_a, seen_b = set(), set()
    for length, i, j in tiles:
        ra, rb = set(range(i, i + length)), set(range(j, j + length))
        assert not (ra & seen_a) and not (rb & seen_b)
        seen_a |= ra
        seen_b |= rb
        assert length >= 2
        assert a[i : i + length] == b[j : j + length]


# ---------------------------------------------------------------------------
# Combined score and score_pair
# ---------------------------------------------------------------------------

def test_combined_score_paper_rows():
    assert combined_score(0.80, 0.73, CFG) == pytest.approx(0.765, abs=1e-12)
    assert combined_score(0.55, 0.00, CFG) == pytest.approx(0.275, abs=1e-12)


@given(st.floats(0, 1), st.floats(0.0, 1.0))
@settings(max_examples=100, deadline=None)
def test_combined_equal_inputs_fixed_point(x, mu):
    cfg = PesoConfig(mu=mu, nu=1.0 - mu)
    assert combined_score(x, x, cfg) == pytest.approx(x, abs=1e-12)


def test_combined_monotone():
    assert combined_score(0.6, 0.4, CFG) >= combined_score(0.5, 0.4, CFG)
    assert combined_score(0.6, 0.5, CFG) >= combined_score(0.6, 0.4, CFG)


def test_score_pair_self():
    s = sample("def f():\n    return 1\n" * 6)
    sc = score_pair(s, s, CFG)
    assert (sc.s1, sc.s2, sc.ss) == (1.0, 1.0, 1.0)


def test_score_pair_rename_semantically_invisible():
    a = sample("def add(left, right):\n    total = left + right\n    return total\n")
    b = sample("def plus(lhs, rhs):\n    acc = lhs + rhs\n    return acc\n")
    sc = score_pair(a, b, PesoConfig(min_tile_len=3))
    assert sc.s2 == 1.0
    assert sc.s1 < 1.0
    assert sc.ss == pytest.approx(0.5 * sc.s1 + 0.5, abs=1e-12)


def test_score_pair_language_mismatch():
    with pytest.raises(LanguageMismatch):
        score_pair(sample("x = 1"), sample("x := 1", Language.GO), CFG)


def test_score_pair_golden_fixture():
    """Golden triple computed once with the DP and brute-force oracles."""
    a = sample(
        "def mean(values):\n"
        "    total = 0\n"
        "    for v in values:\n"
        "        total += v\n"
        "    return total / len(values)\n"
    )
    b = sample(
        "def average(nums):\n"
        "    acc = 0\n"
        "    count = 0\n"
        "    for n in nums:\n"
        "        acc += n\n"
        "        count += 1\n"
        "    return acc / count\n"
    )
    sc = score_pair(a, b, CFG)
    d = dp_levenshtein(a.text, b.text)
    expect_s1 = 1.0 - d / max(len(a.text), len(b.text))
    ta, tb = tokenize(a).tokens, tokenize(b).tokens
    ca, cb = (ta, tb) if ta <= tb else (tb, ta)
    expect_s2 = brute_force_coverage(ca, cb, CFG.min_tile_len)
    assert sc.s1 == expect_s1
    assert sc.s2 == expect_s2
    assert sc.ss == pytest.approx(0.5 * expect_s1 + 0.5 * expect_s2, abs=1e-12)
