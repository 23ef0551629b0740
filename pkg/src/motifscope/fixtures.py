"""Synthetic host graphs with known planted structure."""
from __future__ import annotations

import numpy as np

from .graph import PropertyDigraph


def _er_pairs(n: int, p: float, rng: np.random.Generator, offset: int = 0):
    a = rng.random((n, n)) < p
    np.fill_diagonal(a, False)
    s, d = np.nonzero(a)
    return s + offset, d + offset


def er_digraph(n: int, p: float, seed: int = 0) -> PropertyDigraph:
    """G(n, p) digraph; vertices with no edge are dropped."""
    rng = np.random.default_rng(seed)
    s, d = _er_pairs(n, p, rng)
    return _assemble(s, d)


def random_digraph(n: int, m: int, seed: int = 0) -> PropertyDigraph:
    """``m`` distinct non-loop arcs drawn uniformly over ``n`` vertices."""
    rng = np.random.default_rng(seed)
    keys = np.empty(0, dtype=np.int64)
    while len(keys) < m:
        draw = rng.integers(0, n * n, size=2 * (m - len(keys)) + 16, dtype=np.int64)
        draw = draw[draw // n != draw % n]
        keys = np.unique(np.concatenate([keys, draw]))
    keys = rng.permutation(keys)[:m]
    return _assemble(keys // n, keys % n, n_vertices=n)


def _assemble(s, d, n_vertices: int | None = None, vertex_attrs=None) -> PropertyDigraph:
    s = np.asarray(s, dtype=np.int64)
    d = np.asarray(d, dtype=np.int64)
    used = np.arange(n_vertices) if n_vertices is not None else np.unique(np.concatenate([s, d]))
    pos = {int(v): i for i, v in enumerate(used)}
    ids = [f"n{int(v)}" for v in used]
    src = [pos[int(v)] for v in s]
    dst = [pos[int(v)] for v in d]
    return PropertyDigraph(ids, src, dst, vertex_attrs)


def planted_feed_forward(n_background: int = 200, p: float = 0.01, n_planted: int = 50,
                         seed: int = 0) -> PropertyDigraph:
    """ER background plus feed-forward triangles on fresh vertices."""
    rng = np.random.default_rng(seed)
    s, d = _er_pairs(n_background, p, rng)
    base = n_background
    extra_s, extra_d = [], []
    for t in range(n_planted):
        a, b, c = base + 3 * t, base + 3 * t + 1, base + 3 * t + 2
        extra_s += [a, b, a]
        extra_d += [b, c, c]
    return _assemble(np.concatenate([s, extra_s]), np.concatenate([d, extra_d]))


def planted_cycles(n_cycles: int = 100, n_background: int = 200, p: float = 0.01,
                   seed: int = 0) -> PropertyDigraph:
    """Disjoint directed 3-cycles plus a sparse ER background."""
    rng = np.random.default_rng(seed)
    s, d = _er_pairs(n_background, p, rng)
    base = n_background
    extra_s, extra_d = [], []
    for t in range(n_cycles):
        a, b, c = base + 3 * t, base + 3 * t + 1, base + 3 * t + 2
        extra_s += [a, b, c]
        extra_d += [b, c, a]
    return _assemble(np.concatenate([s, extra_s]), np.concatenate([d, extra_d]))
