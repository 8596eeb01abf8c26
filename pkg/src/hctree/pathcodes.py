"""Base-k coding of infinite paths on the rooted k-ary tree.

A path from the root is the digit sequence ``i_1 i_2 ...`` (digit ``i_n``
picks the child at level ``n``) and corresponds to ``t = sum i_n / k**n``.
All arithmetic is exact, with :class:`fractions.Fraction`.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

__all__ = [
    "PathCode",
    "Vertex",
    "Side",
    "digits_of",
    "is_in_Qk",
    "second_representation",
    "branch_side",
    "digits_value",
    "parse_t",
    "vertices_at_level",
]


@dataclass(frozen=True)
class PathCode:
    t: Fraction
    k: int

    def __init__(self, t: Union[Fraction, int, str], k: int):
        t = Fraction(t)
        if not 0 <= t <= 1:
            raise ValueError(f"t must lie in [0, 1], got {t}")
        if k < 2:
            raise ValueError(f"k must be >= 2, got {k}")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "k", int(k))

    def __str__(self) -> str:
        return str(self.t)


Vertex = tuple[int, ...]


class Side(str, enum.Enum):
    ON_PATH = "on_path"
    LEFT = "left"
    RIGHT = "right"


def digits_of(code: PathCode, n: int) -> list[int]:
    """First ``n`` base-k digits of ``code.t`` (terminating form when there is a choice).

    ``t = 1`` is the all-``(k-1)`` sequence.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    k = code.k
    if code.t == 1:
        return [k - 1] * n
    out = []
    r = code.t
    for _ in range(n):
        r *= k
        d = r.numerator // r.denominator
        out.append(d)
        r -= d
    return out


def is_in_Qk(code: PathCode) -> bool:
    """True iff ``t`` lies strictly inside (0, 1) and has a terminating base-k expansion."""
    if not 0 < code.t < 1:
        return False
    q = code.t.denominator
    k = code.k
    # strip every prime factor shared with k
    while True:
        g = math.gcd(q, k)
        if g == 1:
            break
        while q % g == 0:
            q //= g
    return q == 1


def terminating_length(code: PathCode) -> int:
    """Index ``N`` of the last nonzero digit of a ``Q_k`` point."""
    if not is_in_Qk(code):
        raise ValueError(f"{code.t} has no terminating base-{code.k} expansion in (0, 1)")
    n, r = 0, code.t
    while r != 0:
        r = r * code.k
        r -= r.numerator // r.denominator
        n += 1
    return n


def second_representation(code: PathCode, n: int) -> list[int]:
    """Non-terminating expansion ``i_1 .. i_{N-1}, i_N - 1, k-1, k-1, ...`` truncated to ``n`` digits."""
    big_n = terminating_length(code)
    head = digits_of(code, big_n)
    head[-1] -= 1
    digits = head + [code.k - 1] * max(0, n - big_n)
    return digits[:n]


def digits_value(digits: Sequence[int], k: int) -> Fraction:
    return sum((Fraction(d, k ** (i + 1)) for i, d in enumerate(digits)), Fraction(0))


def branch_side(v: Vertex, path_digits: Sequence[int]) -> Side:
    """Position of ``v`` relative to the path at the same level.

    Vertices are ordered lexicographically within a level; ``LEFT`` means
    ``v`` precedes the path vertex.
    """
    if len(v) > len(path_digits):
        raise ValueError("vertex is deeper than the supplied path prefix")
    for a, b in zip(v, path_digits):
        if a != b:
            return Side.LEFT if a < b else Side.RIGHT
    return Side.ON_PATH


def vertices_at_level(level: int, k: int):
    """All digit strings of the given length, in lexicographic order."""
    return itertools.product(range(k), repeat=level)


def parse_t(text: str, k: int) -> tuple[PathCode, list[int] | None]:
    """Parse ``p/q`` (or an integer) or ``d:<digits>``.

    Returns the code and, for the digit form, the explicit digit prefix
    (remaining digits are zero).
    """
    text = text.strip()
    if text.startswith("d:"):
        digits = [int(ch, 36) for ch in text[2:]]
        if any(d >= k for d in digits):
            raise ValueError(f"digit out of range for k={k} in {text!r}")
        return PathCode(digits_value(digits, k), k), digits
    return PathCode(Fraction(text), k), None
