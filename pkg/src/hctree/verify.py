"""Batch invariant checks behind ``hctree verify``."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional

import numpy as np

from .activity import FiniteSupport, ModelParams, TwoSidedGeometric, critical_activity
from .bgfield import (
    BGParams,
    bg_field,
    bg_root_value,
    constant_field,
    empirical_holder,
    periodic_field,
    scan_t,
    truncation_depth,
    two_representation_check,
    uniform_grid,
    verify_consistency,
)
from .dynamics import (
    OrbitKind,
    Regime,
    classify_orbit,
    cycle_scan,
    f_map,
    fixed_point_data,
    solve_fixed_point,
)
from .gibbs import (
    brute_force_marginal,
    edge_marginal,
    empirical_vs_exact,
    normalisability_check,
    root_marginal,
    sample_batch,
)
from .pathcodes import PathCode

SUITES = ("dynamics", "bg", "gibbs", "all")


@dataclass
class Check:
    name: str
    passed: bool
    detail: str


def _fp(norm, k, inject):
    fp = fixed_point_data(norm, k)
    if "theta" in inject and fp.theta is not None:
        fp = dataclasses.replace(fp, theta=fp.theta * 1.5)
    return fp


def dynamics_checks(inject: frozenset = frozenset()) -> Iterable[Check]:
    for k, want in ((2, 4.0), (3, 1.6875), (4, 256 / 243)):
        got = critical_activity(k)
        yield Check(f"critical k={k}", abs(got - want) <= 1e-12, f"{got!r}")

    for k in (2, 3, 4):
        cr = critical_activity(k)
        xi = solve_fixed_point(cr, k)
        h = 1e-6
        fd = (f_map(xi + h, cr, k) - f_map(xi - h, cr, k)) / (2 * h)
        ok = abs(xi - 1 / (cr * (k - 1))) <= 1e-10 and abs(fd + 1) <= 1e-6
        yield Check(f"tangency k={k}", ok, f"xi={xi:.12g} f'={fd:.9g}")

    worst = 0.0
    for k in (2, 3, 4):
        for norm in (0.5, 1.0, critical_activity(k), 4.2, 5.0, 10.0):
            xi = solve_fixed_point(norm, k)
            worst = max(worst, abs(xi * (1 + xi * norm) ** k - 1))
    yield Check("fixed-point residual", worst <= 1e-12, f"max |phi(xi)|={worst:.2e}")

    for norm, k in ((4.2, 2), (5.0, 2), (1.8, 3)):
        fp = _fp(norm, k, inject)
        a, b = fp.cycle
        res = max(abs(f_map(a, norm, k) - b), abs(f_map(b, norm, k) - a))
        yield Check(f"2-cycle norm={norm} k={k}", a < fp.xi < b and res <= 1e-10,
                    f"alpha*={a:.10f} beta*={b:.10f} residual={res:.1e}")
        theta = norm * b / (1 + a * norm)
        same = math.isclose(fp.theta, theta, rel_tol=1e-12)
        agrees = (fp.theta < 1) == (norm * (b - a) < 1) == (fp.regime is Regime.SUPERCRITICAL_CONTRACTIVE)
        yield Check(f"theta norm={norm} k={k}", same and agrees, f"theta={fp.theta:.6f}")

    for k in (2, 3):
        fp = _fp(critical_activity(k) * 1.001, k, inject)
        yield Check(f"theta near critical k={k}", abs(fp.theta - 1 / k) <= 0.05, f"theta={fp.theta:.4f}")

    seeds = [(i + 0.5) / 100 for i in range(100)]
    sub = all(classify_orbit(s, 3.0, 2).kind is OrbitKind.CONVERGES_TO_XI for s in seeds)
    yield Check("orbits subcritical", sub, "norm=3 k=2, 100 seeds")
    fp = _fp(4.2, 2, inject)
    a, b = fp.cycle
    bad = 0
    for s in seeds:
        r = classify_orbit(s, 4.2, 2)
        want = OrbitKind.EVEN_ALPHA_ODD_BETA if s < fp.xi else OrbitKind.EVEN_BETA_ODD_ALPHA
        lo, hi = sorted((r.even_limit, r.odd_limit))
        if r.kind is not want or abs(lo - a) > 1e-8 or abs(hi - b) > 1e-8:
            bad += 1
    yield Check("orbits supercritical", bad == 0, f"norm=4.2 k=2, {bad} misclassified")

    seen = set()
    for norm in (2, 3, 4, 4.2, 5, 8):
        for k in (2, 3):
            seen |= cycle_scan(norm, k)
    yield Check("cycle periods", seen <= {1, 2}, f"periods seen {sorted(seen)}")


def _bg_params(inject, norm=4.2, k=2, tol=1e-10):
    act = FiniteSupport({1: norm})
    return BGParams(ModelParams(k, act), _fp(norm, k, inject), tol=tol)


def bg_checks(inject: frozenset = frozenset()) -> Iterable[Check]:
    p = _bg_params(inject)
    a, b = p.alpha, p.beta
    z_start = bg_root_value(PathCode(0, 2), p).z0
    z_end = bg_root_value(PathCode(1, 2), p).z0
    yield Check("endpoints", abs(z_start - b) <= 1e-9 and abs(z_end - a) <= 1e-9,
                f"z0(0)-beta*={z_start - b:.1e} z0(1)-alpha*={z_end - a:.1e}")
    try:
        rows = scan_t(p, uniform_grid(257, 2))
        gap = min(r.z0 - s.z0 for r, s in zip(rows, rows[1:]))
        yield Check("monotone scan", True, f"257 points, smallest decrease {gap:.3e}")
    except AssertionError as exc:
        yield Check("monotone scan", False, str(exc))

    worst = 0.0
    for t in ("1/2", "1/4", "3/8", "5/16"):
        worst = max(worst, two_representation_check(PathCode(Fraction(t), 2), p)[2] / p.tol)
    p3 = _bg_params(inject, 1.8, 3)
    for t in ("1/3", "2/9"):
        worst = max(worst, two_representation_check(PathCode(Fraction(t), 3), p3)[2] / p3.tol)
    yield Check("two expansions agree", worst <= 2.0, f"max gap / tol = {worst:.2e}")

    code = PathCode(Fraction(1, 3), 2)
    zs = [bg_root_value(code, p, seed=s) for s in (a, b, 0.5 * (a + b))]
    spread = max(z.z0 for z in zs) - min(z.z0 for z in zs)
    bound = 2 * zs[0].error_bound
    yield Check("seed independence", spread <= bound, f"spread={spread:.1e} bound={bound:.1e}")

    worst_ratio, band_ok = 0.0, True
    for t in (0, Fraction(1, 3), Fraction(1, 2), 1):
        fld = bg_field(PathCode(t, 2), p, 4)
        res = verify_consistency(fld, p.model)
        worst_ratio = max(worst_ratio, res / fld.error_bound)
        vals = fld.all_values()
        band_ok &= all(a - 1e-12 <= v <= b + 1e-12 and v <= 1 for v in vals)
    yield Check("consistency residual", worst_ratio <= 100, f"max residual / bound = {worst_ratio:.2e}")
    yield Check("band", band_ok, f"[{a:.6f}, {b:.6f}]")

    emp = empirical_holder(p, 8)
    yield Check("Hölder exponent", emp >= p.fp.holder - 0.02, f"empirical {emp:.3f} vs {p.fp.holder:.3f}")
    depth = truncation_depth(p)
    yield Check("truncation depth", 2 * b * p.theta ** depth < p.tol, f"N={depth}")


def gibbs_checks(inject: frozenset = frozenset()) -> Iterable[Check]:
    p = _bg_params(inject)
    fp = p.fp
    acts = [FiniteSupport({1: 2.1, -1: 2.1}), FiniteSupport({1: 1.05, -1: 1.05, 2: 1.05, -2: 1.05})]
    fields = {
        "constant": constant_field(fp.xi, 2, 2),
        "period-two": periodic_field(fp.alpha_star, fp.beta_star, 2, 2),
        "bg t=1/2": bg_field(PathCode(Fraction(1, 2), 2), p, 2),
    }
    worst = 0.0
    norm_ok = True
    for act in acts:
        for fld in fields.values():
            for m in (0, 1):
                bf = brute_force_marginal(fld, act, m, ())
                cf = root_marginal(fld, act)
                worst = max(worst, max(abs(bf[s] - cf[s]) for s in bf.support))
                bf = brute_force_marginal(fld, act, m, ((), (0,)))
                cf = edge_marginal(fld, act, (), (0,))
                worst = max(worst, max(abs(bf[s] - cf[s]) for s in bf.support))
            for x in ((0,), (1,), (0, 1)):
                norm_ok &= normalisability_check(fld, act, x, fp)[2]
    yield Check("enumeration oracle", worst <= 1e-10, f"max deviation {worst:.1e}")
    geo = TwoSidedGeometric(1.0, 0.5)
    gfp = fixed_point_data(2.0, 2)
    norm_ok &= normalisability_check(constant_field(gfp.xi, 1, 2), geo, (0,), gfp)[2]
    yield Check("normalisable", norm_ok, "all fields and edges")

    fld = bg_field(PathCode(Fraction(1, 2), 2), p, 3)
    verts, spins = sample_batch(fld, acts[0], 3, 100_000, 0)
    # a nonzero spin with a nonzero parent
    parent = np.array([verts.index(v[:-1]) if v else 0 for v in verts])
    clash = int(np.count_nonzero((spins[:, 1:] != 0) & (spins[:, parent[1:]] != 0)))
    tv = empirical_vs_exact((verts, spins), fld, acts[0], ())
    yield Check("sampler", clash == 0 and tv <= 0.01, f"violations={clash} TV={tv:.4f}")

    rows = scan_t(p, uniform_grid(257, 2))
    p0 = [1 / (1 + r.z0 * p.norm) for r in rows]
    yield Check("distinct measures", len(set(p0)) == len(p0) and all(x < y for x, y in zip(p0, p0[1:])),
                f"{len(set(p0))} distinct root marginals")


SUITE_FUNCS: dict[str, Callable[[frozenset], Iterable[Check]]] = {
    "dynamics": dynamics_checks,
    "bg": bg_checks,
    "gibbs": gibbs_checks,
}


def run_suite(suite: str, inject: Optional[Iterable[str]] = None) -> list[Check]:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    inject = frozenset(inject or ())
    names = list(SUITE_FUNCS) if suite == "all" else [suite]
    out = []
    for name in names:
        try:
            for check in SUITE_FUNCS[name](inject):
                out.append(check)
        except Exception as exc:
            # a suite that cannot finish counts as one failure, not a crash
            out.append(Check(f"{name} suite", False, f"{type(exc).__name__}: {exc}"))
    return out
