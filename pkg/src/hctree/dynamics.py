"""One-dimensional boundary-law dynamics ``f(x) = (1 + x*norm)**(-k)``.

Every boundary law of the model lies on the ray spanned by the activity
vector, so the whole recursion reduces to iterating ``f`` on a scalar
multiplier.  This module finds the fixed point, the 2-cycle that appears
above the critical activity, and classifies orbits.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .activity import critical_activity

__all__ = [
    "Regime",
    "OrbitKind",
    "FixedPointData",
    "OrbitResult",
    "NotConverged",
    "CycleNotFound",
    "f_map",
    "g_map",
    "f_prime",
    "solve_fixed_point",
    "solve_two_cycle",
    "contraction_data",
    "fixed_point_data",
    "classify_orbit",
    "cycle_scan",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-12
BRACKET_POINTS = 1024
CRITICAL_BAND = 1e-9


class Regime(str, enum.Enum):
    SUBCRITICAL = "subcritical"
    SUPERCRITICAL_CONTRACTIVE = "supercritical_contractive"
    SUPERCRITICAL_NONCONTRACTIVE = "supercritical_noncontractive"


class OrbitKind(str, enum.Enum):
    CONVERGES_TO_XI = "converges_to_xi"
    EVEN_ALPHA_ODD_BETA = "even_to_alpha_star_odd_to_beta_star"
    EVEN_BETA_ODD_ALPHA = "even_to_beta_star_odd_to_alpha_star"


class NotConverged(RuntimeError):
    """Orbit did not settle within the step budget."""


class CycleNotFound(RuntimeError):
    """No sign change of g(x) - x on (0, xi) although the norm is supercritical."""


def _check(x: float, norm: float, k: int) -> None:
    if x < 0:
        raise ValueError(f"multiplier must be nonnegative, got {x}")
    if norm <= 0:
        raise ValueError(f"norm must be positive, got {norm}")
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")


def f_map(x: float, norm: float, k: int) -> float:
    _check(x, norm, k)
    return (1.0 + x * norm) ** (-k)


def g_map(x: float, norm: float, k: int) -> float:
    return f_map(f_map(x, norm, k), norm, k)


def f_prime(x: float, norm: float, k: int) -> float:
    """Analytic derivative of :func:`f_map`."""
    return -k * norm * (1.0 + x * norm) ** (-k - 1)


def _bisect(fn, lo: float, hi: float, tol: float, max_iter: int = 400) -> float:
    """Bisection on a sign bracket; stops once |fn(mid)| <= tol or the bracket is one ulp."""
    flo = fn(lo)
    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if abs(fm) <= tol or mid in (lo, hi):
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return mid


def solve_fixed_point(norm: float, k: int, tol: float = DEFAULT_TOL) -> float:
    """Unique root xi in (0, 1) of ``x (1 + x norm)**k = 1``."""
    _check(0.0, norm, k)
    if tol <= 0:
        raise ValueError("tol must be positive")
    return _bisect(lambda x: x * (1.0 + x * norm) ** k - 1.0, 0.0, 1.0, tol)


def is_critical(norm: float, k: int) -> bool:
    cr = critical_activity(k)
    return abs(norm - cr) <= CRITICAL_BAND * cr


def solve_two_cycle(norm: float, k: int, tol: float = DEFAULT_TOL) -> Optional[tuple[float, float]]:
    """Return ``(alpha_star, beta_star)`` or ``None`` when norm <= critical."""
    _check(0.0, norm, k)
    cr = critical_activity(k)
    if norm <= cr or is_critical(norm, k):
        return None
    xi = solve_fixed_point(norm, k, tol)

    def h(x: float) -> float:
        return g_map(x, norm, k) - x

    grid = [xi * i / BRACKET_POINTS for i in range(1, BRACKET_POINTS)]
    lo = None
    prev_x, prev_h = grid[0], h(grid[0])
    for x in grid[1:]:
        hx = h(x)
        if (hx < 0) != (prev_h < 0):
            lo, hi = prev_x, x
            break
        prev_x, prev_h = x, hx
    if lo is None:
        raise CycleNotFound(f"no sign change of g(x)-x on (0, xi) for norm={norm}, k={k}")
    # g(x) - x has slope g'-1 > -1 near alpha*, so residual in g translates to residual in f
    alpha = _bisect(h, lo, hi, tol * 1e-2)
    beta = f_map(alpha, norm, k)
    return alpha, beta


def contraction_data(norm: float, k: int, alpha_star: float, beta_star: float):
    """Contraction constant, Hölder exponent and regime of a 2-cycle.

    Returns ``(theta, holder, regime)``; ``holder`` is ``None`` when
    ``theta >= 1``.
    """
    theta = norm * beta_star / (1.0 + alpha_star * norm)
    if theta < 1.0:
        return theta, -math.log(theta) / math.log(k), Regime.SUPERCRITICAL_CONTRACTIVE
    return theta, None, Regime.SUPERCRITICAL_NONCONTRACTIVE


@dataclass(frozen=True)
class FixedPointData:
    norm: float
    k: int
    xi: float
    cycle: Optional[tuple[float, float]] = None
    theta: Optional[float] = None
    holder: Optional[float] = None
    regime: Regime = Regime.SUBCRITICAL

    @property
    def alpha_star(self) -> Optional[float]:
        return self.cycle[0] if self.cycle else None

    @property
    def beta_star(self) -> Optional[float]:
        return self.cycle[1] if self.cycle else None

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "norm": self.norm,
            "xi": self.xi,
            "alpha_star": self.alpha_star,
            "beta_star": self.beta_star,
            "theta": self.theta,
            "holder": self.holder,
            "regime": self.regime.value,
        }


def fixed_point_data(norm: float, k: int, tol: float = DEFAULT_TOL) -> FixedPointData:
    xi = solve_fixed_point(norm, k, tol)
    cycle = solve_two_cycle(norm, k, tol)
    if cycle is None:
        return FixedPointData(norm, k, xi)
    theta, holder, regime = contraction_data(norm, k, *cycle)
    return FixedPointData(norm, k, xi, cycle, theta, holder, regime)


@dataclass(frozen=True)
class OrbitResult:
    kind: OrbitKind
    even_limit: float
    odd_limit: float
    steps: int


def classify_orbit(alpha0: float, norm: float, k: int, tol: float = 1e-10,
                   max_steps: int = 10 ** 6) -> OrbitResult:
    """Iterate ``f`` from ``alpha0`` and report where the even and odd subsequences go.

    Raises :class:`NotConverged` if the subsequences are still moving by
    more than ``tol`` after ``max_steps`` iterations.
    """
    if not 0.0 < alpha0 <= 1.0:
        raise ValueError(f"alpha0 must lie in (0, 1], got {alpha0}")
    xi = solve_fixed_point(norm, k)
    if abs(alpha0 - xi) <= tol:
        return OrbitResult(OrbitKind.CONVERGES_TO_XI, xi, xi, 0)
    a0 = alpha0
    a1 = f_map(a0, norm, k)
    quiet = 0
    steps = 1
    while steps < max_steps:
        a2 = f_map(a1, norm, k)
        a3 = f_map(a2, norm, k)
        steps += 2
        if max(abs(a2 - a0), abs(a3 - a1)) < tol:
            quiet += 1
            if quiet >= 3:
                break
        else:
            quiet = 0
        a0, a1 = a2, a3
    else:
        raise NotConverged(f"orbit from {alpha0} not settled after {max_steps} steps (norm={norm}, k={k})")
    # a2 has even index, a3 odd
    even, odd = a2, a3
    # orbit limits are either both xi or the two cycle points, far apart
    sep = max(math.sqrt(tol), 1e-6)
    if abs(even - odd) <= sep:
        kind = OrbitKind.CONVERGES_TO_XI
    elif even < odd:
        kind = OrbitKind.EVEN_ALPHA_ODD_BETA
    else:
        kind = OrbitKind.EVEN_BETA_ODD_ALPHA
    return OrbitResult(kind, even, odd, steps)


def cycle_scan(norm: float, k: int, max_period: int = 8, grid_size: int = 200,
               detect_tol: float = 1e-9, merge_tol: float = 1e-6,
               max_steps: int = 200_000) -> set[int]:
    """Periods of the limit cycles reached from a uniform grid of seeds.

    All seeds are iterated together; a seed is settled once its orbit
    repeats within ``detect_tol`` with some period ``p <= max_period``
    and its period is the number of distinct points (``merge_tol`` apart)
    in one repetition.  A slowly alternating approach to a fixed point
    therefore counts as period 1.  Seeds that never settle, as happens at
    the critical norm, are skipped.
    """
    if max_period < 2:
        raise ValueError("max_period must be >= 2")
    _check(0.0, norm, k)
    x = (np.arange(grid_size) + 0.5) / grid_size
    found = np.zeros(grid_size, dtype=int)
    block = 256
    steps = 0
    while steps < max_steps and not found.all():
        for _ in range(block):
            x = (1.0 + x * norm) ** (-k)
        steps += block
        orbit = [x]
        for _ in range(2 * max_period):
            orbit.append((1.0 + orbit[-1] * norm) ** (-k))
        orbit = np.array(orbit)
        current = np.zeros(grid_size, dtype=int)
        for p in range(max_period, 0, -1):
            ok = np.all(np.abs(orbit[p:p + max_period] - orbit[:max_period]) < detect_tol, axis=0)
            current = np.where(ok, p, current)
        for j in np.flatnonzero((found == 0) & (current > 0)):
            found[j] = _distinct_points(orbit[:current[j], j], merge_tol)
    return {int(p) for p in found if p > 0}


def _distinct_points(points: np.ndarray, merge_tol: float) -> int:
    pts = np.sort(points)
    return 1 + int(np.count_nonzero(np.diff(pts) > merge_tol))
