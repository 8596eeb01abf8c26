"""Path-indexed boundary laws interpolating the two period-two phases.

For a path coded by ``t`` the vertices strictly left of the path carry the
period-two law in one phase, vertices to the right carry the other phase,
and the values on the path are fixed by the consistency recursion run
backwards from a deep level.  Since the backward map contracts by
``theta < 1``, a finite depth gives a certified error.

Off-path values alternate with level parity: a left vertex holds
``alpha*`` at even levels and ``beta*`` at odd levels, right vertices the
opposite.  The root is level 0.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .activity import ModelParams
from .dynamics import FixedPointData, Regime
from .pathcodes import (
    PathCode,
    Side,
    Vertex,
    branch_side,
    digits_of,
    is_in_Qk,
    second_representation,
)

__all__ = [
    "RegimeError",
    "DepthCapped",
    "ScanCheckFailed",
    "BGParams",
    "RootValue",
    "BoundaryLawField",
    "offpath_value",
    "truncation_depth",
    "bg_root_value",
    "bg_field",
    "constant_field",
    "periodic_field",
    "verify_consistency",
    "two_representation_check",
    "ScanRow",
    "scan_t",
    "holder_level",
    "uniform_grid",
    "empirical_holder",
]


class RegimeError(ValueError):
    """The construction needs a contractive 2-cycle (theta < 1)."""


class DepthCapped(RuntimeError):
    """``max_depth`` is too small for the requested tolerance.

    ``result`` holds the value computed at ``max_depth`` with its achieved
    error bound.
    """

    def __init__(self, message: str, result: "RootValue"):
        super().__init__(message)
        self.result = result


class ScanCheckFailed(AssertionError):
    pass


@dataclass(frozen=True)
class BGParams:
    model: ModelParams
    fp: FixedPointData
    tol: float = 1e-10
    max_depth: int = 100_000

    def __post_init__(self):
        if self.fp.regime is not Regime.SUPERCRITICAL_CONTRACTIVE:
            raise RegimeError(
                f"norm={self.fp.norm}, k={self.fp.k} is {self.fp.regime.value}; "
                "the path construction needs a 2-cycle with theta < 1")
        if not self.fp.theta < 1:
            raise RegimeError(f"theta={self.fp.theta} is not below 1")
        if self.fp.k != self.model.k:
            raise ValueError("fixed-point data and model disagree on k")
        if not math.isclose(self.fp.norm, self.model.norm, rel_tol=1e-12):
            raise ValueError("fixed-point data and model disagree on the activity norm")
        if self.tol <= 0:
            raise ValueError("tol must be positive")

    @property
    def k(self) -> int:
        return self.model.k

    @property
    def norm(self) -> float:
        return self.fp.norm

    @property
    def alpha(self) -> float:
        return self.fp.cycle[0]

    @property
    def beta(self) -> float:
        return self.fp.cycle[1]

    @property
    def theta(self) -> float:
        return self.fp.theta


def offpath_value(side: Side, level: int, fp: FixedPointData) -> float:
    if fp.cycle is None:
        raise RegimeError("off-path values need a 2-cycle")
    alpha, beta = fp.cycle
    even = level % 2 == 0
    if side is Side.LEFT:
        return alpha if even else beta
    if side is Side.RIGHT:
        return beta if even else alpha
    raise ValueError("on-path vertices have no fixed off-path value")


def truncation_depth(params: BGParams, tol: Optional[float] = None) -> int:
    """Smallest ``N`` with ``2 beta* theta**N < tol``."""
    tol = params.tol if tol is None else tol
    ratio = tol / (2.0 * params.beta)
    if ratio >= 1.0:
        return 0
    n = max(0, math.floor(math.log(ratio) / math.log(params.theta)))
    while 2.0 * params.beta * params.theta ** n >= tol:
        n += 1
    return n


@dataclass(frozen=True)
class RootValue:
    z0: float
    depth_used: int
    error_bound: float


def _backward(digits: Sequence[int], params: BGParams, seed: float, keep: int) -> list[float]:
    """Run the on-path recursion from level ``len(digits)`` to the root.

    Returns the on-path values ``u_0 .. u_keep``.
    """
    k, norm = params.k, params.norm
    alpha, beta = params.alpha, params.beta
    # children factors for left/right vertices at even and odd levels
    left_factor = (1.0 / (1.0 + norm * alpha), 1.0 / (1.0 + norm * beta))
    right_factor = (1.0 / (1.0 + norm * beta), 1.0 / (1.0 + norm * alpha))
    depth = len(digits)
    u = seed
    kept = [0.0] * (keep + 1)
    if depth <= keep:
        kept[depth] = u
    for level in range(depth, 0, -1):
        i = digits[level - 1]
        p = level % 2
        u = left_factor[p] ** i * right_factor[p] ** (k - 1 - i) / (1.0 + norm * u)
        if level - 1 <= keep:
            kept[level - 1] = u
    return kept


def _depth_for(params: BGParams, extra: int = 0) -> tuple[int, bool]:
    n = truncation_depth(params) + extra
    if n > params.max_depth:
        return params.max_depth, True
    return n, False


def bg_root_value(t: PathCode, params: BGParams, seed: Optional[float] = None,
                  digits: Optional[Sequence[int]] = None) -> RootValue:
    """Root multiplier ``z0(t)`` with a certified truncation error.

    ``digits`` overrides the expansion of ``t`` (used for the second
    expansion of terminating points); it is padded with zeros if short.
    The seed at the truncation level defaults to the midpoint of the band
    ``[alpha*, beta*]``.
    """
    if t.k != params.k:
        raise ValueError("path code and model disagree on k")
    n, capped = _depth_for(params)
    path = _digits(t, n, digits)
    if seed is None:
        seed = 0.5 * (params.alpha + params.beta)
    u = _backward(path, params, seed, 0)
    result = RootValue(u[0], n, 2.0 * params.beta * params.theta ** n)
    if capped:
        raise DepthCapped(f"max_depth={params.max_depth} only reaches error {result.error_bound:.3g}", result)
    return result


def _digits(t: PathCode, n: int, digits: Optional[Sequence[int]]) -> list[int]:
    if digits is None:
        return digits_of(t, n)
    out = list(digits[:n])
    return out + [0] * (n - len(out))


@dataclass(frozen=True)
class BoundaryLawField:
    """Multipliers on the first ``depth + 1`` levels of the rooted tree.

    Only the on-path values are stored; every other vertex takes the
    constant for its side and level parity.
    """

    k: int
    depth: int
    path_digits: tuple[int, ...]
    path_values: tuple[float, ...]
    left: tuple[float, float]
    right: tuple[float, float]
    t: Optional[PathCode] = None
    error_bound: float = 0.0

    def value(self, v: Vertex) -> float:
        level = len(v)
        if level > self.depth:
            raise ValueError(f"vertex at level {level} outside field of depth {self.depth}")
        side = branch_side(v, self.path_digits[:level])
        if side is Side.ON_PATH:
            return self.path_values[level]
        pair = self.left if side is Side.LEFT else self.right
        return pair[level % 2]

    @property
    def root(self) -> float:
        return self.path_values[0]

    def vertices(self, max_level: Optional[int] = None) -> Iterable[Vertex]:
        top = self.depth if max_level is None else max_level
        for level in range(top + 1):
            yield from itertools.product(range(self.k), repeat=level)

    def values(self) -> dict[Vertex, float]:
        return {v: self.value(v) for v in self.vertices()}

    def all_values(self) -> list[float]:
        """Every distinct multiplier the field can return."""
        return list(self.path_values) + list(self.left) + list(self.right)


def bg_field(t: PathCode, params: BGParams, m: int,
             digits: Optional[Sequence[int]] = None) -> BoundaryLawField:
    """Path-indexed field on levels ``0..m`` with on-path values to within ``params.tol``."""
    if m < 0:
        raise ValueError("m must be >= 0")
    n, capped = _depth_for(params, extra=m)
    path = _digits(t, n, digits)
    u = _backward(path, params, 0.5 * (params.alpha + params.beta), m)
    # bound at level m is theta^(n-m) times the seed gap
    bound = 2.0 * params.beta * params.theta ** (n - m)
    alpha, beta = params.alpha, params.beta
    fld = BoundaryLawField(
        k=params.k, depth=m, path_digits=tuple(path[:m]), path_values=tuple(u),
        left=(alpha, beta), right=(beta, alpha), t=t, error_bound=bound)
    if capped:
        raise DepthCapped(f"max_depth={params.max_depth} too small for tol={params.tol}",
                          RootValue(u[0], n, bound))
    return fld


def constant_field(value: float, depth: int, k: int) -> BoundaryLawField:
    """Translation-invariant field (every vertex holds ``value``)."""
    return periodic_field(value, value, depth, k)


def periodic_field(even_value: float, odd_value: float, depth: int, k: int) -> BoundaryLawField:
    """Field depending only on level parity."""
    pair = (even_value, odd_value)
    return BoundaryLawField(
        k=k, depth=depth, path_digits=(0,) * depth,
        path_values=tuple(pair[level % 2] for level in range(depth + 1)),
        left=pair, right=pair)


def verify_consistency(fld: BoundaryLawField, model: ModelParams) -> float:
    """Largest violation of ``alpha_x * prod_children (1 + norm alpha_y) = 1`` over internal vertices."""
    if fld.depth < 1:
        raise ValueError("consistency needs a field of depth >= 1")
    norm = model.norm
    worst = 0.0
    for v in fld.vertices(fld.depth - 1):
        prod = 1.0
        for d in range(fld.k):
            prod *= 1.0 + norm * fld.value(v + (d,))
        worst = max(worst, abs(fld.value(v) * prod - 1.0))
    return worst


def two_representation_check(t: PathCode, params: BGParams) -> tuple[float, float, float]:
    """Root values from both expansions of a terminating point, and their gap."""
    if not is_in_Qk(t):
        raise ValueError(f"t={t} has a unique base-{t.k} expansion")
    n, _ = _depth_for(params)
    z1 = bg_root_value(t, params, digits=digits_of(t, n)).z0
    z2 = bg_root_value(t, params, digits=second_representation(t, n)).z0
    return z1, z2, abs(z1 - z2)


@dataclass(frozen=True)
class ScanRow:
    t: PathCode
    z0: float
    error_bound: float


def holder_level(dt: Fraction, k: int) -> Optional[int]:
    """Largest ``N >= 0`` with ``dt <= k**(-N-1)``, or ``None`` if ``dt > 1/k``."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    if dt * k > 1:
        return None
    n = 0
    while dt * k ** (n + 2) <= 1:
        n += 1
    return n


def scan_t(params: BGParams, grid: Sequence[PathCode], check: bool = True) -> list[ScanRow]:
    """Evaluate ``z0`` on an ascending grid.

    With ``check`` the result must be strictly decreasing and satisfy
    ``|z0(t) - z0(s)| <= 4 beta* theta**N`` for neighbours with
    ``|t - s| <= k**(-N-1)``; otherwise :class:`ScanCheckFailed` is raised.
    """
    ts = [g.t for g in grid]
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValueError("grid must be strictly ascending")
    rows = []
    for code in grid:
        r = bg_root_value(code, params)
        rows.append(ScanRow(code, r.z0, r.error_bound))
    if check:
        for a, b in zip(rows, rows[1:]):
            slack = a.error_bound + b.error_bound
            if not b.z0 < a.z0 - slack:
                raise ScanCheckFailed(f"z0 not strictly decreasing between t={a.t} and t={b.t}")
            n = holder_level(b.t.t - a.t.t, params.k)
            if n is not None and abs(a.z0 - b.z0) > 4.0 * params.beta * params.theta ** n + slack:
                raise ScanCheckFailed(f"Hölder bound violated between t={a.t} and t={b.t}")
    return rows


def uniform_grid(size: int, k: int) -> list[PathCode]:
    """``size`` equally spaced exact rationals from 0 to 1 inclusive."""
    if size < 2:
        raise ValueError("grid needs at least two points")
    return [PathCode(Fraction(i, size - 1), k) for i in range(size)]


def empirical_holder(params: BGParams, levels: int = 8) -> float:
    """Slope of log(max |z0(t+h) - z0(t)|) against log h over ``h = k**-n``, n=1..levels.

    Uses the grid ``i / k**levels``; the maximum oscillation at each scale is
    taken over all grid pairs at distance ``h``.
    """
    k = params.k
    size = k ** levels + 1
    z = [row.z0 for row in scan_t(params, uniform_grid(size, k), check=False)]
    xs, ys = [], []
    for n in range(1, levels + 1):
        step = k ** (levels - n)
        osc = max(abs(z[i + step] - z[i]) for i in range(0, size - step))
        xs.append(-n * math.log(k))
        ys.append(math.log(osc))
    mx = sum(xs) / len(xs)
    my = sum(ys) / len(ys)
    return sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sum((x - mx) ** 2 for x in xs)
