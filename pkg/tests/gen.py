"""Seeded generators for random motifs and small attributed hosts."""
import itertools
import random

from motifscope import PropertyDigraph
from motifscope.dsl import AttributePredicate, EdgeConstraint, EdgeKind, MotifQuery
from motifscope.errors import MotifError

_KINDS = [None, None, None, EdgeKind.DIRECTED, EdgeKind.UNDIRECTED, EdgeKind.FORBIDDEN]


def _predicate(rng, v):
    if rng.random() < 0.5:
        return AttributePredicate(v, "t", rng.choice(["=", "!="]), rng.choice(["x", "y"]))
    return AttributePredicate(v, "w", rng.choice(["=", "!=", "<", "<=", ">", ">="]), rng.choice([1, 2, 2.5, 3]))


def random_motif(rng: random.Random, size: int, preds: bool = True, induced=None) -> MotifQuery:
    """Connected motif over A.. with mixed constraint kinds."""
    names = [chr(65 + i) for i in range(size)]
    while True:
        edges = []
        for a, b in itertools.combinations(names, 2):
            k = rng.choice(_KINDS)
            if k is None:
                continue
            if k is EdgeKind.UNDIRECTED:
                edges.append(EdgeConstraint(a, b, k))
                continue
            if rng.random() < 0.5:
                a, b = b, a
            edges.append(EdgeConstraint(a, b, k))
            if k is EdgeKind.DIRECTED and rng.random() < 0.3:
                edges.append(EdgeConstraint(b, a, rng.choice([EdgeKind.DIRECTED, EdgeKind.FORBIDDEN])))
        p = [_predicate(rng, v) for v in names if preds and rng.random() < 0.25]
        ind = rng.random() < 0.2 if induced is None else induced
        try:
            return MotifQuery(tuple(names), tuple(edges), tuple(p), ind)
        except MotifError:
            continue


def relabel(q: MotifQuery, rng: random.Random) -> MotifQuery:
    names = list(q.vertices)
    perm = dict(zip(names, rng.sample([f"v{i}" for i in range(len(names))], len(names))))
    order = rng.sample(names, len(names))
    edges = list(q.edges)
    rng.shuffle(edges)
    return MotifQuery(tuple(perm[v] for v in order),
                      tuple(EdgeConstraint(perm[e.src], perm[e.dst], e.kind) for e in edges),
                      tuple(AttributePredicate(perm[p.vertex], p.key, p.op, p.value) for p in q.predicates),
                      q.induced)


def random_host(rng: random.Random, max_vertices: int = 10, max_edges: int = 30) -> PropertyDigraph:
    n = rng.randint(2, max_vertices)
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    edges = rng.sample(pairs, rng.randint(0, min(max_edges, len(pairs))))
    attrs = {}
    for v in range(n):
        a = {}
        if rng.random() < 0.8:
            a["t"] = rng.choice(["x", "y"])
        if rng.random() < 0.8:
            a["w"] = rng.randint(0, 4)
        attrs[v] = a
    return PropertyDigraph.from_edges(edges, vertex_attrs=attrs, vertices=range(n))
