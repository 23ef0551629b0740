"""Significance of observed motif counts against a null ensemble."""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .dsl import EdgeKind, MotifQuery, canonical_form
from .engine import count_monomorphisms
from .errors import SearchTimeout, UndirectedEdgesPresent
from .graph import PropertyDigraph
from .nulls import NullEnsemble


@dataclass(frozen=True)
class SignificanceCriteria:
    z_min: float = 2.0
    p_max: float = 0.05
    min_count: int = 5

    def corrected(self, n_tests: int, n_samples: int) -> "SignificanceCriteria":
        """Bonferroni-divided ``p_max``, floored at the smallest attainable empirical p."""
        p = self.p_max / max(1, n_tests)
        return replace(self, p_max=max(p, 1.0 / (n_samples + 1)))


@dataclass
class MotifStatistics:
    label: bytes
    query: MotifQuery
    observed: int
    null_counts: list[int]
    null_mean: float
    null_std: float
    z: float
    p_empirical: float
    significant: bool

    def to_dict(self) -> dict:
        return {
            "label": self.label.decode(),
            "motif": self.query.source(),
            "induced": self.query.induced,
            "observed": self.observed,
            "null_counts": list(self.null_counts),
            "null_mean": self.null_mean,
            "null_std": self.null_std,
            "z": encode_z(self.z),
            "p_empirical": self.p_empirical,
            "significant": self.significant,
        }


def encode_z(z: float):
    if math.isinf(z):
        return "+inf" if z > 0 else "-inf"
    return z


def decode_z(z) -> float:
    if isinstance(z, str):
        return math.inf if z.strip() in ("+inf", "inf") else -math.inf
    return float(z)


def summarize(observed: int, null_counts, criteria: SignificanceCriteria = SignificanceCriteria()):
    """(mean, sample std, z, empirical p, significant) for one motif."""
    nulls = np.asarray(null_counts, dtype=np.float64)
    n = len(nulls)
    if n == 0:
        raise ValueError("empty null ensemble")
    mean = float(nulls.mean())
    std = float(nulls.std(ddof=1)) if n > 1 else 0.0
    if std > 0:
        z = (observed - mean) / std
    elif observed > mean:
        z = math.inf
    elif observed < mean:
        z = -math.inf
    else:
        z = 0.0
    p = (1 + int(np.count_nonzero(nulls >= observed))) / (n + 1)
    significant = z >= criteria.z_min and p <= criteria.p_max and observed >= criteria.min_count
    return mean, std, z, p, bool(significant)


def stats_from_counts(q: MotifQuery, observed: int, null_counts,
                      criteria: SignificanceCriteria = SignificanceCriteria()) -> MotifStatistics:
    mean, std, z, p, sig = summarize(observed, null_counts, criteria)
    return MotifStatistics(canonical_form(q), q, int(observed), [int(c) for c in null_counts],
                           mean, std, z, p, sig)


def score_motif(q: MotifQuery, g: PropertyDigraph, ensemble: NullEnsemble,
                criteria: SignificanceCriteria = SignificanceCriteria(), workers: int = 1,
                timeout: float | None = None) -> MotifStatistics:
    """Count ``q`` in ``g`` and in every ensemble sample, then summarize.

    ``timeout`` bounds the whole motif (observed plus every sample); per-sample
    counts run concurrently over ``workers`` threads. A
    :class:`~motifscope.errors.SearchTimeout` from any count propagates.
    """
    if len(ensemble) == 0:
        raise ValueError("empty null ensemble")
    deadline = None if timeout is None else time.monotonic() + timeout

    def count(graph):
        left = None if deadline is None else max(0.0, deadline - time.monotonic())
        try:
            return count_monomorphisms(q, graph, timeout=left).count
        except SearchTimeout as exc:
            raise SearchTimeout(timeout, exc.result) from None

    observed = count(g)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            nulls = list(ex.map(count, ensemble.samples))
    else:
        nulls = [count(s) for s in ensemble.samples]
    return stats_from_counts(q, observed, nulls, criteria)


def topology_class(q: MotifQuery) -> str:
    """``"recurrent"`` if the directed constraints contain a cycle, else ``"feed_forward"``."""
    if not q.is_fully_directed:
        raise UndirectedEdgesPresent("topology class needs a fully directed motif")
    succ = {v: [] for v in q.vertices}
    indeg = dict.fromkeys(q.vertices, 0)
    for e in q.edges:
        if e.kind is EdgeKind.DIRECTED:
            succ[e.src].append(e.dst)
            indeg[e.dst] += 1
    ready = [v for v in q.vertices if indeg[v] == 0]
    seen = 0
    while ready:
        v = ready.pop()
        seen += 1
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    return "feed_forward" if seen == q.size else "recurrent"
