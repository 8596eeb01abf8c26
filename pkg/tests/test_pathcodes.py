from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hctree.pathcodes import (
    PathCode,
    Side,
    branch_side,
    digits_of,
    digits_value,
    is_in_Qk,
    parse_t,
    second_representation,
)


def F(s):
    return Fraction(s)


@pytest.mark.parametrize("t, k, n, expected", [
    ("1/2", 2, 4, [1, 0, 0, 0]),
    ("1/3", 2, 6, [0, 1, 0, 1, 0, 1]),
    ("1", 2, 3, [1, 1, 1]),
    ("0", 3, 3, [0, 0, 0]),
    ("1/3", 3, 3, [1, 0, 0]),
])
def test_digits_of(t, k, n, expected):
    assert digits_of(PathCode(F(t), k), n) == expected


@pytest.mark.parametrize("t, k, expected", [
    ("1/2", 2, True), ("1/3", 2, False), ("3/8", 2, True), ("0", 2, False), ("1", 2, False),
    ("1/6", 6, True), ("1/4", 6, True), ("1/9", 6, True), ("1/5", 6, False),
])
def test_is_in_Qk(t, k, expected):
    assert is_in_Qk(PathCode(F(t), k)) is expected


@pytest.mark.parametrize("t, k, n, expected", [
    ("1/2", 2, 5, [0, 1, 1, 1, 1]),
    ("3/4", 2, 5, [1, 0, 1, 1, 1]),
    ("1/3", 3, 4, [0, 2, 2, 2]),
])
def test_second_representation(t, k, n, expected):
    assert second_representation(PathCode(F(t), k), n) == expected


def test_second_representation_rejects():
    with pytest.raises(ValueError):
        second_representation(PathCode(F("1/3"), 2), 4)


def test_branch_side_examples():
    assert branch_side((1, 0), [1, 0, 1]) is Side.ON_PATH
    assert branch_side((0, 1), [1, 0]) is Side.LEFT
    assert branch_side((1, 1), [1, 0]) is Side.RIGHT
    assert branch_side((), [1]) is Side.ON_PATH


def test_pathcode_validation():
    with pytest.raises(ValueError):
        PathCode(F("3/2"), 2)
    with pytest.raises(ValueError):
        PathCode(F("1/2"), 1)


rationals = st.fractions(min_value=0, max_value=1, max_denominator=10_000)


@given(rationals, st.integers(2, 7), st.integers(1, 40))
def test_round_trip_error(t, k, n):
    code = PathCode(t, k)
    err = t - digits_value(digits_of(code, n), k)
    assert 0 <= err <= Fraction(1, k ** n)


@given(st.integers(1, 500), st.integers(1, 9), st.integers(2, 5), st.integers(1, 30))
def test_second_representation_converges(p, e, k, extra):
    t = Fraction(p % k ** e or 1, k ** e)
    code = PathCode(t, k)
    if not is_in_Qk(code):
        return
    n = e + extra
    # the all-(k-1) tail after digit n is worth exactly k**-n
    gap = t - digits_value(second_representation(code, n), k)
    assert gap == Fraction(1, k ** n)


@given(st.integers(2, 4), st.data())
def test_branch_side_is_lexicographic(k, data):
    level = data.draw(st.integers(1, 6))
    digit = st.integers(0, k - 1)
    v = tuple(data.draw(st.lists(digit, min_size=level, max_size=level)))
    path = data.draw(st.lists(digit, min_size=level, max_size=level + 3))
    side = branch_side(v, path)
    a, b = digits_value(v, k), digits_value(path[:level], k)
    assert side is {-1: Side.LEFT, 0: Side.ON_PATH, 1: Side.RIGHT}[(a > b) - (a < b)]


def test_parse_t():
    code, digits = parse_t("5/16", 2)
    assert code.t == Fraction(5, 16) and digits is None
    code, digits = parse_t("d:01011", 2)
    assert code.t == Fraction(11, 32) and digits == [0, 1, 0, 1, 1]
    with pytest.raises(ValueError):
        parse_t("d:012", 2)
