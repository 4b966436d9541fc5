from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwild.errors import UsageError
from qwild.oracle import mismatch_profile, naive_match_positions
from qwild.wildstr import (
    SENTINEL,
    WILDCARD,
    PatternString,
    Role,
    chars_match,
    mismatch_count,
    mismatch_counts,
    pad_transform,
    read_string_file,
    shifted_matching_array,
    shifted_matching_sum,
    shifted_sums,
    write_string_file,
)

P = PatternString.from_text
small_text = st.text(alphabet="ab?", min_size=1, max_size=12)


@pytest.mark.parametrize("a,b,expected", [("a", "a", True), ("a", "?", True), ("a", "b", False),
                                          ("?", "?", True)])
def test_chars_match(a, b, expected):
    assert chars_match(ord(a) if a != "?" else WILDCARD, ord(b) if b != "?" else WILDCARD) is expected


@pytest.mark.parametrize("x,y,expected", [("a?c", "abd", 1), ("abc", "abc", 0), ("??", "ba", 0)])
def test_mismatch_count_examples(x, y, expected):
    assert mismatch_count(P(x), P(y)) == expected


def test_mismatch_count_length_guard():
    with pytest.raises(UsageError):
        mismatch_count(P("ab"), P("abc"))


@given(small_text, small_text)
def test_mismatch_count_symmetric(x, y):
    n = min(len(x), len(y))
    X, Y = P(x[:n]), P(y[:n])
    assert mismatch_count(X, Y) == mismatch_count(Y, X)
    assert mismatch_count(X, X) == 0


@pytest.mark.parametrize("x,d,bits", [("abab", 2, [0, 0]), ("a?ab", 2, [0, 1]), ("??", 1, [1])])
def test_shifted_array_examples(x, d, bits):
    assert shifted_matching_array(P(x), d).tolist() == bits


@pytest.mark.parametrize("x,d,total", [("aaaa", 1, 0), ("ab", 1, 1), ("a?ab", 2, 1)])
def test_shifted_sum_examples(x, d, total):
    assert shifted_matching_sum(P(x), d) == total


@pytest.mark.parametrize("d", [0, 4, -1])
def test_shift_range_guard(d):
    with pytest.raises(UsageError):
        shifted_matching_array(P("abcd"), d)


def test_shift_definition_exhaustive():
    for length in range(2, 6):
        for s in itertools.product("ab?", repeat=length):
            X = P("".join(s))
            for d in range(1, length):
                expect = [int(s[i] == "?" or s[i + d] == "?" or s[i] != s[i + d]) for i in range(length - d)]
                assert shifted_matching_array(X, d).tolist() == expect


@given(small_text)
def test_shifted_sums_agree_with_single(x):
    X = P(x)
    sums = shifted_sums(X, len(x))
    assert sums.tolist() == [shifted_matching_sum(X, d) for d in range(1, len(x))]


def test_pad_transform_examples():
    A2, B2 = pad_transform(P("ab"), P("ab", Role.PATTERN), 0)
    assert str(A2) == "$a$b" and str(B2) == "$a$b"
    _, B3 = pad_transform(P("ab"), P("ab", Role.PATTERN), 1)
    assert str(B3) == "?a$b"


def test_pad_transform_doubles_match_set():
    A2, B2 = pad_transform(P("a"), P("a"), 0)
    assert naive_match_positions(A2, B2) == [0]


@settings(max_examples=200)
@given(small_text, st.data())
def test_pad_transform_preserves_matches(a, data):
    m = data.draw(st.integers(1, len(a)))
    b = data.draw(st.text(alphabet="ab?", min_size=m, max_size=m))
    A, B = P(a), P(b)
    t = data.draw(st.integers(0, m - 1))
    A2, B2 = pad_transform(A, B, t)
    assert B2.wildcard_count == B.wildcard_count + t
    even = [i // 2 for i in naive_match_positions(A2, B2) if i % 2 == 0]
    assert even == naive_match_positions(A, B)


def test_pad_transform_guards():
    with pytest.raises(UsageError):
        pad_transform(P("ab"), P("ab"), 2)


def test_text_io_rules(tmp_path):
    with pytest.raises(UsageError):
        P("a$b")
    x = P("a?b")
    assert x.symbols.tolist() == [ord("a"), WILDCARD, ord("b")]
    path = tmp_path / "s.txt"
    write_string_file(path, x)
    assert read_string_file(path) == x
    assert path.read_bytes() == b"a?b\n"


def test_reserved_codes_disjoint():
    assert WILDCARD != SENTINEL
    assert WILDCARD >= 1 << 16 and SENTINEL >= 1 << 16
    with pytest.raises(UsageError):
        PatternString.from_codes([1 << 16 + 5])


def test_substring_and_wildcards():
    x = P("ab?d?")
    assert str(x.substring(1, 3)) == "b?d"
    assert x.wildcard_count == 2
    assert x.wildcard_mask.tolist() == [False, False, True, False, True]


@settings(max_examples=300)
@given(st.integers(1, 200), st.integers(1, 200), st.integers(1, 6), st.integers(0, 2**31 - 1))
def test_mismatch_counts_matches_profile(n, m, sigma, seed):
    if m > n:
        n, m = m, n
    rng = np.random.default_rng(seed)
    a = rng.integers(0, sigma, n)
    b = rng.integers(0, sigma, m)
    a[rng.random(n) < 0.1] = WILDCARD
    b[rng.random(m) < 0.1] = WILDCARD
    A, B = PatternString(a), PatternString(b, Role.PATTERN)
    assert mismatch_counts(A, B).tolist() == mismatch_profile(A, B).tolist()


def test_mismatch_counts_large_alphabet():
    rng = np.random.default_rng(3)
    a = rng.integers(0, 5000, 3000)
    b = a[500:2100].copy()
    b[rng.random(b.size) < 0.05] = WILDCARD
    A, B = PatternString(a), PatternString(b, Role.PATTERN)
    prof = mismatch_counts(A, B)
    assert prof.tolist() == mismatch_profile(A, B).tolist()
    assert prof[500] == 0
