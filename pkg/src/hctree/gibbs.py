"""Finite-volume Gibbs distributions induced by a boundary-law field.

A configuration on levels ``0..m`` of the rooted tree, with boundary
spins on level ``m+1``, has weight

    prod_{x in V_m} lambda(sigma_x) * prod_{y in W_{m+1}} w_y,

with ``w_y = 1`` for spin 0 and ``alpha_y * lambda(sigma_y)`` otherwise, and
weight zero if two neighbours both carry nonzero spins.  When the field
is consistent the measure is a tree-indexed Markov chain: the root and
the children of a zero-spin vertex are drawn independently with
``P(0) = 1/(1 + alpha norm)`` and ``P(j) = alpha lambda_j/(1 + alpha norm)``,
and a child of a nonzero spin is 0.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence, Union

import numpy as np

from .activity import (
    ActivitySpec,
    FiniteSupport,
    spins_from_uniform,
    squared_activity_sum,
    total_activity,
)
from .bgfield import BoundaryLawField
from .dynamics import FixedPointData
from .pathcodes import Vertex

__all__ = [
    "MarginalTable",
    "VolumeTooLarge",
    "activity_support",
    "root_marginal",
    "child_kernel",
    "vertex_marginal",
    "edge_marginal",
    "is_admissible",
    "sample_batch",
    "sample_configuration",
    "finite_volume_weight",
    "brute_force_marginal",
    "normalisability_check",
    "empirical_vs_exact",
    "total_variation",
    "volume_vertices",
]

Target = Union[Vertex, tuple[Vertex, Vertex]]
MAX_ENUMERATION = 10 ** 8


class VolumeTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class MarginalTable:
    support: tuple[Hashable, ...]
    p: tuple[float, ...]

    def __post_init__(self):
        if len(self.support) != len(self.p):
            raise ValueError("support and probabilities differ in length")
        if any(x < 0 for x in self.p):
            raise ValueError("negative probability")

    def __getitem__(self, spin) -> float:
        return dict(zip(self.support, self.p)).get(spin, 0.0)

    def as_dict(self) -> dict:
        return dict(zip(self.support, self.p))

    def to_json(self, target) -> dict:
        return {"target": target, "support": [list(s) if isinstance(s, tuple) else s for s in self.support],
                "p": list(self.p)}


def activity_support(spec: ActivitySpec, tail: float = 1e-17) -> list[int]:
    """Nonzero spins, ascending.  Geometric activities are cut where the neglected mass is below ``tail``."""
    if isinstance(spec, FiniteSupport):
        return list(spec.indices)
    # mass beyond |j| = J on both sides is 2 c q^(J+1) / (1 - q)
    cut = 1
    while 2 * spec.c * spec.q ** (cut + 1) / (1 - spec.q) > tail:
        cut += 1
    return list(range(-cut, 0)) + list(range(1, cut + 1))


def _single_site(alpha: float, spec: ActivitySpec) -> MarginalTable:
    norm = total_activity(spec)
    z = 1.0 + alpha * norm
    spins = activity_support(spec)
    support = sorted(spins + [0])
    p = [1.0 / z if j == 0 else alpha * spec[j] / z for j in support]
    return MarginalTable(tuple(support), tuple(p))


def root_marginal(fld: BoundaryLawField, activity: ActivitySpec) -> MarginalTable:
    return _single_site(fld.root, activity)


def child_kernel(parent_spin: int, alpha_child: float, activity: ActivitySpec) -> MarginalTable:
    """Distribution of a child's spin given its parent's spin."""
    if parent_spin != 0:
        return MarginalTable((0,), (1.0,))
    return _single_site(alpha_child, activity)


def vertex_marginal(fld: BoundaryLawField, activity: ActivitySpec, v: Vertex) -> MarginalTable:
    """Closed-form marginal at any vertex, by pushing P(0) down the chain from the root."""
    norm = total_activity(activity)
    p_zero = 1.0 / (1.0 + fld.root * norm)
    for level in range(1, len(v) + 1):
        alpha = fld.value(tuple(v[:level]))
        p_zero = p_zero / (1.0 + alpha * norm) + (1.0 - p_zero)
    alpha = fld.value(tuple(v))
    table = _single_site(alpha, activity)
    # conditional law of a nonzero spin is lambda_j / norm
    p = tuple(p_zero if j == 0 else (1.0 - p_zero) * activity[j] / norm for j in table.support)
    return MarginalTable(table.support, p)


def edge_marginal(fld: BoundaryLawField, activity: ActivitySpec, parent: Vertex, child: Vertex) -> MarginalTable:
    """Joint law of ``(sigma_parent, sigma_child)`` as marginal times kernel."""
    if tuple(child[:-1]) != tuple(parent):
        raise ValueError("child must be a child of parent")
    top = vertex_marginal(fld, activity, parent)
    alpha = fld.value(tuple(child))
    support, p = [], []
    for i, pi in zip(top.support, top.p):
        kern = _single_site(alpha, activity) if i == 0 else None
        for j in top.support:
            support.append((i, j))
            if i == 0:
                p.append(pi * kern[j])
            else:
                p.append(pi if j == 0 else 0.0)
    return MarginalTable(tuple(support), tuple(p))


def volume_vertices(k: int, max_level: int) -> list[Vertex]:
    """Vertices of levels ``0..max_level`` in breadth-first, lexicographic order."""
    out: list[Vertex] = []
    for level in range(max_level + 1):
        out.extend(itertools.product(range(k), repeat=level))
    return out


def is_admissible(config: Mapping[Vertex, int]) -> bool:
    """No edge joins two nonzero spins."""
    for v, s in config.items():
        if v and s != 0 and config.get(v[:-1], 0) != 0:
            return False
    return True


def sample_batch(fld: BoundaryLawField, activity: ActivitySpec, m: int, count: int,
                 seed: int) -> tuple[list[Vertex], np.ndarray]:
    """Draw ``count`` configurations on levels ``0..m`` top-down.

    Returns the vertex order and an integer array of shape
    ``(count, len(vertices))``.  Randomness comes from a Philox
    counter-based generator keyed by ``seed``; one uniform is consumed per
    vertex, level by level, so the output is a fixed function of the seed.
    """
    if m > fld.depth:
        raise ValueError(f"field of depth {fld.depth} does not cover level {m}")
    k = fld.k
    rng = np.random.Generator(np.random.Philox(seed))
    verts = volume_vertices(k, m)
    spins = np.zeros((count, len(verts)), dtype=np.int64)
    start = 0
    for level in range(m + 1):
        n = k ** level
        block = verts[start:start + n]
        # inverse-CDF with weight 1/alpha on spin 0 is P(0) = 1/(1 + alpha norm)
        w0 = np.array([1.0 / fld.value(v) for v in block])
        u = rng.random((count, n))
        drawn = spins_from_uniform(activity, w0[None, :], u)
        if level > 0:
            parent_start = start - k ** (level - 1)
            parents = spins[:, parent_start:start]
            drawn = np.where(np.repeat(parents, k, axis=1) != 0, 0, drawn)
        spins[:, start:start + n] = drawn
        start += n
    return verts, spins


def sample_configuration(fld: BoundaryLawField, activity: ActivitySpec, m: int, seed: int) -> dict[Vertex, int]:
    verts, spins = sample_batch(fld, activity, m, 1, seed)
    return {v: int(s) for v, s in zip(verts, spins[0])}


def _lam(activity: ActivitySpec, j: int) -> float:
    return 1.0 if j == 0 else activity[j]


def finite_volume_weight(config: Mapping[Vertex, int], fld: BoundaryLawField, activity: ActivitySpec) -> float:
    """Unnormalised weight of a full configuration on levels ``0..m+1``; level ``m+1`` is the boundary."""
    if not is_admissible(config):
        return 0.0
    boundary = max(len(v) for v in config)
    w = 1.0
    for v, s in config.items():
        if len(v) < boundary:
            w *= _lam(activity, s)
        elif s != 0:
            w *= fld.value(v) * activity[s]
    return w


def brute_force_marginal(fld: BoundaryLawField, activity: FiniteSupport, m: int, target: Target) -> MarginalTable:
    """Exact marginal by summing the weight of every assignment on levels ``0..m+1``.

    ``target`` is a vertex or a ``(parent, child)`` pair inside the volume.
    """
    if not isinstance(activity, FiniteSupport):
        raise TypeError("enumeration needs a finite activity")
    if fld.depth < m + 1:
        raise ValueError(f"field of depth {fld.depth} does not cover the boundary level {m + 1}")
    k = fld.k
    verts = volume_vertices(k, m + 1)
    values = [0] + list(activity.indices)
    base = len(values)
    n = len(verts)
    total = base ** n
    if total > MAX_ENUMERATION:
        raise VolumeTooLarge(f"{base}^{n} assignments exceed the enumeration limit")
    index = {v: i for i, v in enumerate(verts)}
    vals = np.array(values)
    lam = np.array([_lam(activity, j) for j in values])
    inner = np.array([len(v) <= m for v in verts])
    alpha = np.array([fld.value(v) for v in verts])
    # per-vertex, per-spin factor: activity inside, boundary-law weight on the boundary
    factor = np.where(inner[:, None], lam[None, :],
                      np.where(vals[None, :] == 0, 1.0, alpha[:, None] * lam[None, :]))
    edges = np.array([(index[v[:-1]], i) for i, v in enumerate(verts) if v])

    if isinstance(target, tuple) and target and isinstance(target[0], tuple):
        cols = [index[tuple(target[0])], index[tuple(target[1])]]
        labels = [(a, b) for a in values for b in values]
    else:
        cols = [index[tuple(target)]]
        labels = list(values)
    acc = np.zeros(base ** len(cols))
    chunk = 1 << 18
    for start in range(0, total, chunk):
        code = np.arange(start, min(start + chunk, total), dtype=np.int64)
        digits = np.empty((code.size, n), dtype=np.int64)
        for i in range(n - 1, -1, -1):
            code, digits[:, i] = np.divmod(code, base)
        spins = vals[digits]
        ok = np.all(spins[:, edges[:, 0]] * spins[:, edges[:, 1]] == 0, axis=1)
        w = np.prod(factor[np.arange(n)[None, :], digits], axis=1) * ok
        key = np.zeros(digits.shape[0], dtype=np.int64)
        for c in cols:
            key = key * base + digits[:, c]
        acc += np.bincount(key, weights=w, minlength=acc.size)
    acc /= acc.sum()
    if len(cols) == 1:
        order = np.argsort(values)
        return MarginalTable(tuple(values[i] for i in order), tuple(float(acc[i]) for i in order))
    pairs = sorted(range(len(labels)), key=lambda i: labels[i])
    return MarginalTable(tuple(labels[i] for i in pairs), tuple(float(acc[i]) for i in pairs))


def normalisability_check(fld: BoundaryLawField, activity: ActivitySpec, x: Vertex,
                          fp: FixedPointData) -> tuple[float, float, bool]:
    """Evaluate the edge normalisation sum for ``x`` and its parent.

    Returns ``(double_sum, bound, ok)``.  The bound uses ``beta*`` when the
    2-cycle exists and 1 (the a-priori bound on any multiplier) otherwise.
    """
    if not x:
        raise ValueError("the root has no parent edge")
    alpha_x = fld.value(tuple(x))
    alpha_y = fld.value(tuple(x[:-1]))
    norm = total_activity(activity)
    sq = squared_activity_sum(activity)
    double_sum = alpha_x * sq + 1.0 + alpha_y * norm
    top = fp.beta_star if fp.cycle is not None else 1.0
    bound = top * sq + 1.0 + top * norm
    ok = math.isfinite(double_sum) and double_sum <= bound
    return double_sum, bound, ok


def total_variation(a: MarginalTable, b: MarginalTable) -> float:
    keys = set(a.support) | set(b.support)
    da, db = a.as_dict(), b.as_dict()
    return 0.5 * math.fsum(abs(da.get(s, 0.0) - db.get(s, 0.0)) for s in keys)


def empirical_vs_exact(samples: Union[Sequence[Mapping[Vertex, int]], tuple[list[Vertex], np.ndarray]],
                       fld: BoundaryLawField, activity: ActivitySpec, target: Vertex) -> float:
    """Total-variation distance between the sampled and exact marginal at ``target``.

    ``samples`` is either a list of configurations or the ``(vertices,
    array)`` pair returned by :func:`sample_batch`.
    """
    if isinstance(samples, tuple):
        verts, arr = samples
        column = arr[:, verts.index(tuple(target))]
    else:
        column = np.array([cfg[tuple(target)] for cfg in samples], dtype=np.int64)
    if column.size < 1000:
        raise ValueError(f"need at least 1000 samples, got {column.size}")
    spins, counts = np.unique(column, return_counts=True)
    emp = MarginalTable(tuple(int(s) for s in spins), tuple(counts / column.size))
    return total_variation(emp, vertex_marginal(fld, activity, target))
