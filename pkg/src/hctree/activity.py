"""Activity sequences for the countable-spin hard-core model.

An activity assigns a positive weight to every nonzero spin value; the
weight of spin 0 is fixed to 1 and never stored.  Two families are
supported: a finite table and the two-sided geometric sequence
``c * q**abs(j)``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

import numpy as np

__all__ = [
    "FiniteSupport",
    "TwoSidedGeometric",
    "ActivitySpec",
    "ModelParams",
    "total_activity",
    "squared_activity_sum",
    "critical_activity",
    "spin_from_uniform",
    "spins_from_uniform",
    "parse_activity",
    "format_activity",
]


@dataclass(frozen=True)
class FiniteSupport:
    """Finitely many nonzero spins with explicit activities.

    ``entries`` is a tuple of ``(index, value)`` pairs sorted by index.
    """

    entries: tuple[tuple[int, float], ...]

    def __init__(self, entries: Union[Mapping[int, float], Iterable[tuple[int, float]]]):
        items = entries.items() if isinstance(entries, Mapping) else entries
        table: dict[int, float] = {}
        for j, v in items:
            j = int(j)
            v = float(v)
            if j == 0:
                raise ValueError("index 0 is reserved (its activity is 1 by convention)")
            if j in table:
                raise ValueError(f"duplicate index {j}")
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"activity at {j} must be positive and finite, got {v}")
            table[j] = v
        if not table:
            raise ValueError("finite activity needs at least one entry")
        object.__setattr__(self, "entries", tuple(sorted(table.items())))

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(j for j, _ in self.entries)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(v for _, v in self.entries)

    def __getitem__(self, j: int) -> float:
        return dict(self.entries).get(j, 0.0)


@dataclass(frozen=True)
class TwoSidedGeometric:
    """``lambda_j = c * q**|j|`` for every nonzero integer ``j``."""

    c: float
    q: float

    def __post_init__(self):
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ValueError(f"c must be positive, got {self.c}")
        if not (0 < self.q < 1):
            raise ValueError(f"q must lie in (0, 1), got {self.q}")

    def __getitem__(self, j: int) -> float:
        return 0.0 if j == 0 else self.c * self.q ** abs(j)


ActivitySpec = Union[FiniteSupport, TwoSidedGeometric]


@dataclass(frozen=True)
class ModelParams:
    k: int
    activity: ActivitySpec

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 2:
            raise ValueError(f"branching number k must be an integer >= 2, got {self.k}")

    @property
    def norm(self) -> float:
        return total_activity(self.activity)


def total_activity(spec: ActivitySpec) -> float:
    """Sum of the activities over all nonzero spins."""
    if isinstance(spec, TwoSidedGeometric):
        return 2.0 * spec.c * spec.q / (1.0 - spec.q)
    return math.fsum(spec.values)


def squared_activity_sum(spec: ActivitySpec) -> float:
    if isinstance(spec, TwoSidedGeometric):
        return 2.0 * spec.c ** 2 * spec.q ** 2 / (1.0 - spec.q ** 2)
    return math.fsum(v * v for v in spec.values)


def critical_activity(k: int) -> float:
    """Total activity above which the boundary-law map has a 2-cycle."""
    if int(k) != k or k < 2:
        raise ValueError(f"k must be an integer >= 2, got {k}")
    k = int(k)
    # exact integer ratio, rounded once
    return k ** k / (k - 1) ** (k + 1)


def spin_from_uniform(spec: ActivitySpec, weight_of_zero: float, u: float) -> int:
    """Inverse-CDF draw of a spin with ``P(0) ~ weight_of_zero`` and ``P(j) ~ lambda_j``.

    The CDF runs over spins in ascending order (spin 0 sits between -1
    and 1), so the result is a deterministic function of ``u``.
    """
    if not 0.0 <= u < 1.0:
        raise ValueError(f"u must lie in [0, 1), got {u}")
    if weight_of_zero < 0:
        raise ValueError("weight_of_zero must be nonnegative")
    total = weight_of_zero + total_activity(spec)
    target = u * total
    if isinstance(spec, FiniteSupport):
        table = sorted(spec.entries + ((0, weight_of_zero),))
        acc = 0.0
        for j, w in table:
            acc += w
            if target < acc:
                return j
        # u close to 1 with rounding: last spin of positive weight
        return [j for j, w in table if w > 0][-1]
    return _geometric_spin(spec, weight_of_zero, target)


def _geometric_spin(spec: TwoSidedGeometric, w0: float, target: float) -> int:
    c, q = spec.c, spec.q
    neg_mass = c * q / (1.0 - q)
    if target < neg_mass:
        # mass of spins <= -n is c q^n / (1-q); pick the most negative n with that mass > target
        r = max(target * (1.0 - q) / c, np.finfo(float).tiny)
        n = math.ceil(math.log(r) / math.log(q)) - 1
        return -max(n, 1)
    if target < neg_mass + w0:
        return 0
    v = target - neg_mass - w0
    s = 1.0 - v * (1.0 - q) / (c * q)
    if s <= 0.0:
        s = np.finfo(float).tiny
    n = math.floor(math.log(s) / math.log(q)) + 1
    return max(n, 1)


def spins_from_uniform(spec: ActivitySpec, weight_of_zero: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Vectorised :func:`spin_from_uniform` over arrays of weights and uniforms."""
    w0 = np.asarray(weight_of_zero, dtype=float)
    u = np.asarray(u, dtype=float)
    w0, u = np.broadcast_arrays(w0, u)
    target = u * (w0 + total_activity(spec))
    out = np.zeros(u.shape, dtype=np.int64)
    if isinstance(spec, FiniteSupport):
        idx = np.array(spec.indices)
        vals = np.array(spec.values)
        neg = idx < 0
        neg_cum = np.cumsum(vals[neg])
        neg_mass = neg_cum[-1] if neg_cum.size else 0.0
        pos_cum = np.cumsum(vals[~neg])
        in_neg = target < neg_mass
        if neg_cum.size:
            pos_in_neg = np.minimum(np.searchsorted(neg_cum, target, side="right"), neg_cum.size - 1)
            out = np.where(in_neg, idx[neg][pos_in_neg], out)
        rest = target - neg_mass - w0
        in_pos = (~in_neg) & (rest >= 0) & (pos_cum.size > 0)
        if pos_cum.size:
            k = np.minimum(np.searchsorted(pos_cum, np.maximum(rest, 0.0), side="right"), pos_cum.size - 1)
            out = np.where(in_pos, idx[~neg][k], out)
        return out
    c, q = spec.c, spec.q
    neg_mass = c * q / (1.0 - q)
    tiny = np.finfo(float).tiny
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.maximum(target * (1.0 - q) / c, tiny)
        n_neg = np.maximum(np.ceil(np.log(r) / math.log(q)) - 1, 1)
        v = target - neg_mass - w0
        s = np.maximum(1.0 - v * (1.0 - q) / (c * q), tiny)
        n_pos = np.maximum(np.floor(np.log(s) / math.log(q)) + 1, 1)
    out = np.where(target < neg_mass, -n_neg, np.where(target < neg_mass + w0, 0, n_pos))
    return out.astype(np.int64)


_GEOM = re.compile(r"^geom:c=([^,]+),q=([^,]+)$")


def parse_activity(text: str) -> ActivitySpec:
    """Parse ``geom:c=<float>,q=<float>`` or ``finite:<j>=<v>,...``."""
    text = text.strip()
    m = _GEOM.match(text)
    if m:
        return TwoSidedGeometric(float(m.group(1)), float(m.group(2)))
    if text.startswith("finite:"):
        pairs = []
        for item in text[len("finite:"):].split(","):
            j, sep, v = item.partition("=")
            if not sep:
                raise ValueError(f"bad finite activity entry {item!r}")
            pairs.append((int(j), float(v)))
        return FiniteSupport(pairs)
    raise ValueError(f"unrecognised activity {text!r}")


def format_activity(spec: ActivitySpec) -> str:
    if isinstance(spec, TwoSidedGeometric):
        return f"geom:c={spec.c!r},q={spec.q!r}"
    return "finite:" + ",".join(f"{j}={v!r}" for j, v in spec.entries)
