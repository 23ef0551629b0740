"""Greedy progressive motif refinement.

Rounds start from every connected undirected motif of ``size_min``
vertices. Each round scores the frontier against one shared null ensemble,
keeps the significant candidates, and refines them by one step each:
orient an undirected edge, add an undirected edge (between an unconstrained
pair, or to a new vertex), or add a vertex attribute equality. A
significant fully directed motif is *isolated* once none of its children
scores significant with a strictly larger z.
"""
from __future__ import annotations

import itertools
import logging
import math
import string
import time
from collections import Counter
from dataclasses import asdict, dataclass, field
from functools import lru_cache

from .dsl import (
    MAX_MOTIF_SIZE,
    AttributePredicate,
    EdgeConstraint,
    EdgeKind,
    MotifQuery,
    canonical_form,
    format_literal,
    label_id,
)
from .engine import enumerate_monomorphisms
from .errors import ContradictoryEdges, EnsembleFailure, SearchTimeout, TooFewEdges
from .graph import PropertyDigraph
from .nulls import NullEnsemble, SwapConfig, build_ensemble
from .stats import MotifStatistics, SignificanceCriteria, score_motif, topology_class

log = logging.getLogger(__name__)

STEER_CLASSES = (None, "feed_forward", "recurrent")
REFINEMENTS = ("seed", "orient_edge", "add_edge", "add_attribute")
_NAMES = string.ascii_uppercase[:MAX_MOTIF_SIZE]


@dataclass
class DiscoveryConfig:
    size_min: int = 3
    size_max: int = 5
    target_count: int = 10
    criteria: SignificanceCriteria = field(default_factory=SignificanceCriteria)
    attribute_keys: tuple[str, ...] = ()
    steer: str | None = None
    seed: int = 0
    n_samples: int = 100
    swap_factor: float = 10.0
    max_rounds: int = 12
    motif_timeout: float | None = 60.0
    frontier_cap: int = 1000
    top_values: int = 5
    attribute_match_limit: int = 100_000
    workers: int = 1

    def __post_init__(self):
        self.attribute_keys = tuple(self.attribute_keys)
        if self.size_min < 2:
            raise ValueError("size_min must be at least 2")
        if self.size_min > self.size_max:
            raise ValueError("size_min must not exceed size_max")
        if self.size_max > MAX_MOTIF_SIZE:
            raise ValueError(f"size_max must not exceed {MAX_MOTIF_SIZE}")
        if self.target_count < 1:
            raise ValueError("target_count must be at least 1")
        if self.steer not in STEER_CLASSES:
            raise ValueError(f"steer must be one of {STEER_CLASSES}")
        if self.n_samples < 1 or self.max_rounds < 1 or self.frontier_cap < 1:
            raise ValueError("n_samples, max_rounds and frontier_cap must be positive")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["attribute_keys"] = list(self.attribute_keys)
        return d


@dataclass
class CandidateMotif:
    query: MotifQuery
    stats: MotifStatistics | None = None
    parent: bytes | None = None
    round: int = 0
    refinement_kind: str = "seed"
    unscored: bool = False

    @property
    def label(self) -> bytes:
        return canonical_form(self.query)


def make_query(edges, predicates=(), induced=False) -> MotifQuery:
    """Query whose vertex order is the first appearance in ``edges``."""
    verts = []
    for e in edges:
        for v in (e.src, e.dst):
            if v not in verts:
                verts.append(v)
    return MotifQuery(tuple(verts), tuple(edges), tuple(predicates), induced)


# -- seeds ----------------------------------------------------------------------

@lru_cache(maxsize=None)
def _connected_graphs(size: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Connected undirected graphs on ``size`` unlabeled vertices, one per class.

    Every connected graph has a vertex whose removal leaves it connected, so
    extending each smaller class by one vertex with a non-empty neighbour
    set reaches every class.
    """
    if size == 2:
        return (((0, 1),),)
    found = {}
    for base in _connected_graphs(size - 1):
        new = size - 1
        for r in range(1, size):
            for nbrs in itertools.combinations(range(new), r):
                edges = tuple(sorted(base + tuple((u, new) for u in nbrs)))
                q = _undirected_query(edges)
                found.setdefault(canonical_form(q), edges)
    return tuple(found[k] for k in sorted(found))


def _undirected_query(edges) -> MotifQuery:
    return make_query([EdgeConstraint(_NAMES[u], _NAMES[v], EdgeKind.UNDIRECTED) for u, v in edges])


def seed_candidates(size: int) -> list[CandidateMotif]:
    """All connected undirected motifs on ``size`` vertices, one per isomorphism class."""
    if not 2 <= size <= MAX_MOTIF_SIZE:
        raise ValueError(f"seed size must be in [2, {MAX_MOTIF_SIZE}]")
    return [CandidateMotif(_undirected_query(e)) for e in _connected_graphs(size)]


# -- refinement -----------------------------------------------------------------

def _attribute_values(q: MotifQuery, g: PropertyDigraph, key: str, limit: int) -> list[tuple[str, list]]:
    col = g.vertex_attrs.get(key)
    if col is None:
        return []
    res = enumerate_monomorphisms(q, g, limit=limit)
    per_vertex = []
    for t, v in enumerate(q.vertices):
        hosts = res.mappings[:, t] if res.mappings is not None else []
        per_vertex.append((v, Counter(col.get(int(h)) for h in hosts if col.present[int(h)])))
    return per_vertex


def child_queries(c: CandidateMotif, cfg: DiscoveryConfig, g: PropertyDigraph) -> list[tuple[str, MotifQuery]]:
    """Every one-step refinement of ``c`` (not deduplicated)."""
    q = c.query
    out: list[tuple[str, MotifQuery]] = []

    def emit(kind, edges=None, preds=None):
        try:
            child = make_query(edges if edges is not None else q.edges,
                               preds if preds is not None else q.predicates, q.induced)
        except ContradictoryEdges:
            return
        out.append((kind, child))

    for i, e in enumerate(q.edges):
        if e.kind is EdgeKind.UNDIRECTED:
            for s, d in ((e.src, e.dst), (e.dst, e.src)):
                emit("orient_edge", q.edges[:i] + (EdgeConstraint(s, d, EdgeKind.DIRECTED),) + q.edges[i + 1:])

    touched = {frozenset((e.src, e.dst)) for e in q.edges}
    for a, b in itertools.combinations(q.vertices, 2):
        if frozenset((a, b)) not in touched:
            emit("add_edge", q.edges + (EdgeConstraint(a, b, EdgeKind.UNDIRECTED),))
    if q.size < cfg.size_max:
        new = next(n for n in _NAMES if n not in q.vertices)
        for v in q.vertices:
            emit("add_edge", q.edges + (EdgeConstraint(v, new, EdgeKind.UNDIRECTED),))

    for key in cfg.attribute_keys:
        constrained = {p.vertex for p in q.predicates if p.key == key}
        for v, counts in _attribute_values(q, g, key, cfg.attribute_match_limit):
            if v in constrained:
                continue
            ranked = sorted(counts.items(), key=lambda kv: (-kv[1], format_literal(kv[0])))
            for value, _ in ranked[:cfg.top_values]:
                emit("add_attribute", preds=q.predicates + (AttributePredicate(v, key, "=", value),))
    return out


def refine(c: CandidateMotif, cfg: DiscoveryConfig, g: PropertyDigraph,
           seen: set[bytes] | None = None) -> list[CandidateMotif]:
    """One-step children of ``c``, deduplicated by canonical form.

    ``seen`` holds labels of every candidate generated so far; it is updated
    in place and children already in it are dropped.
    """
    seen = set() if seen is None else seen
    kids = []
    for kind, q in child_queries(c, cfg, g):
        lab = canonical_form(q)
        if lab in seen or lab == c.label:
            continue
        seen.add(lab)
        kids.append(CandidateMotif(q, parent=c.label, round=c.round + 1, refinement_kind=kind))
    return kids


# -- pipeline -------------------------------------------------------------------

def rank_key(c: CandidateMotif):
    q = c.query
    return (-c.stats.z, q.size, len(q.edges) + len(q.predicates), c.label)


@dataclass
class DiscoveryResult:
    motifs: list[CandidateMotif]
    candidates: dict[bytes, CandidateMotif]
    ensemble: NullEnsemble
    scored_labels: list[bytes]
    rounds: list[dict]
    config: DiscoveryConfig
    elapsed: float = 0.0

    @property
    def no_significant_motifs(self) -> bool:
        return not self.motifs

    def lineage(self, c: CandidateMotif) -> list[CandidateMotif]:
        chain = [c]
        while chain[-1].parent is not None:
            chain.append(self.candidates[chain[-1].parent])
        return chain[::-1]

    def unscored(self) -> list[CandidateMotif]:
        return [c for c in self.candidates.values() if c.unscored]

    def results(self) -> list[dict]:
        rows = []
        for rank, c in enumerate(self.motifs, start=1):
            row = {"rank": rank, "label_id": label_id(c.label)}
            row.update(c.stats.to_dict())
            row.update({
                "size": c.query.size,
                "topology": topology_class(c.query),
                "round": c.round,
                "refinement_kind": c.refinement_kind,
                "parent": c.parent.decode() if c.parent else None,
                "lineage": [{"label": a.label.decode(), "refinement_kind": a.refinement_kind,
                             "motif": a.query.source()} for a in self.lineage(c)],
            })
            row["lineage_depth"] = len(row["lineage"]) - 1
            rows.append(row)
        return rows

    def manifest(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "ensemble": self.ensemble.manifest(),
            "rounds": self.rounds,
            "scored_labels": [lab.decode() for lab in self.scored_labels],
            "unscored": [c.label.decode() for c in self.unscored()],
            "n_isolated": len(self.motifs),
            "no_significant_motifs": self.no_significant_motifs,
            "elapsed_s": self.elapsed,
        }


def _score(c: CandidateMotif, g, ensemble, criteria, cfg) -> None:
    try:
        c.stats = score_motif(c.query, g, ensemble, criteria, workers=cfg.workers, timeout=cfg.motif_timeout)
    except SearchTimeout:
        log.warning("motif %s exceeded its %ss budget; left unscored", c.query, cfg.motif_timeout)
        c.unscored = True


def discover(g: PropertyDigraph, cfg: DiscoveryConfig, ensemble: NullEnsemble | None = None) -> DiscoveryResult:
    """Run the refinement loop and return the isolated motifs, best first."""
    t0 = time.monotonic()
    if ensemble is None:
        try:
            ensemble = build_ensemble(g, SwapConfig(cfg.swap_factor, cfg.seed), cfg.n_samples, cfg.workers)
        except TooFewEdges as exc:
            raise EnsembleFailure(str(exc)) from exc

    frontier = seed_candidates(cfg.size_min)
    candidates: dict[bytes, CandidateMotif] = {c.label: c for c in frontier}
    seen: set[bytes] = set(candidates)
    children_of: dict[bytes, list[bytes]] = {}
    scored: list[bytes] = []
    rounds: list[dict] = []
    pending: list[CandidateMotif] = []
    isolated: list[CandidateMotif] = []

    rnd = 0
    while frontier and rnd < cfg.max_rounds:
        criteria = cfg.criteria.corrected(len(frontier), len(ensemble))
        for c in frontier:
            _score(c, g, ensemble, criteria, cfg)
            scored.append(c.label)

        for p in pending:
            kid_z = [candidates[k].stats.z for k in children_of[p.label]
                     if candidates[k].stats is not None and candidates[k].stats.significant]
            if not any(z > p.stats.z for z in kid_z):
                isolated.append(p)
        pending = []

        survivors = [c for c in frontier if c.stats is not None and c.stats.significant]
        if cfg.steer is not None:
            survivors = [c for c in survivors
                         if not c.query.is_fully_directed or topology_class(c.query) == cfg.steer]
        children: list[CandidateMotif] = []
        for c in survivors:
            labels = []
            for kind, q in child_queries(c, cfg, g):
                lab = canonical_form(q)
                if lab == c.label or lab in labels:
                    continue
                labels.append(lab)
                if lab not in seen:
                    seen.add(lab)
                    kid = CandidateMotif(q, parent=c.label, round=rnd + 1, refinement_kind=kind)
                    candidates[lab] = kid
                    children.append(kid)
            children_of[c.label] = labels
            if c.query.is_fully_directed:
                (pending if labels else isolated).append(c)

        rounds.append({"round": rnd, "candidates": len(frontier), "significant": len(survivors),
                       "p_threshold": criteria.p_max, "children": len(children),
                       "isolated": len(isolated)})
        log.info("round %d: %d candidates, %d significant, %d isolated so far",
                 rnd, len(frontier), len(survivors), len(isolated))
        if len(isolated) >= cfg.target_count:
            break
        if len(children) > cfg.frontier_cap:
            order = sorted(range(len(children)),
                           key=lambda i: -abs(candidates[children[i].parent].stats.z))
            children = [children[i] for i in sorted(order[:cfg.frontier_cap])]
        frontier = children
        rnd += 1

    # parents whose children were never scored keep their place
    isolated.extend(pending)
    ranked = sorted({c.label: c for c in isolated}.values(), key=rank_key)[:cfg.target_count]
    return DiscoveryResult(ranked, candidates, ensemble, scored, rounds, cfg, time.monotonic() - t0)
