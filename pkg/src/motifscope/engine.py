"""Subgraph monomorphism search over a shared pool of partial mappings.

A search task is a partial injective mapping of the first ``p`` plan
positions to host vertices. The root task is expanded into one task per
feasible host vertex for the first position; tasks at depth one are
expanded once more and pushed back to the pool; tasks at depth two or more
are completed depth-first by whichever worker took them. Workers keep their
own counters and the totals are merged when the pool drains, so counts do
not depend on scheduling.
"""
from __future__ import annotations

import json
import logging
import queue
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import _kernels as K
from .dsl import EdgeKind, MotifQuery
from .errors import AttributeTypeError, SearchTimeout
from .graph import PropertyDigraph

log = logging.getLogger(__name__)

CHUNK = 256
_DEPTH_FIRST_FROM = 2


# -- predicates ----------------------------------------------------------------

def _numeric(kind):
    return kind in ("int", "float")


def predicate_mask(g: PropertyDigraph, key: str, op: str, value) -> np.ndarray:
    """Host vertices whose attribute ``key`` satisfies ``op value``.

    Vertices lacking the attribute never match. int and float compare as
    numbers; any other cross-type comparison is false for ``=``, true for
    ``!=`` and an :class:`AttributeTypeError` for ordering operators.
    """
    col = g.vertex_attrs.get(key)
    if col is None:
        return np.zeros(g.n_vertices, dtype=bool)
    vkind = "bool" if isinstance(value, bool) else "int" if isinstance(value, int) else \
        "float" if isinstance(value, float) else "str"
    same = col.kind == vkind or (_numeric(col.kind) and _numeric(vkind))
    if not same:
        if op == "=":
            return np.zeros(g.n_vertices, dtype=bool)
        if op == "!=":
            return col.present.copy()
        raise AttributeTypeError(
            f"cannot order {col.kind} attribute {key!r} against {vkind} value {value!r}")
    vals = col.values
    if op == "=":
        hit = vals == value
    elif op == "!=":
        hit = vals != value
    elif op == "<":
        hit = vals < value
    elif op == "<=":
        hit = vals <= value
    elif op == ">":
        hit = vals > value
    else:
        hit = vals >= value
    return np.asarray(hit, dtype=bool) & col.present


# -- planning ------------------------------------------------------------------

def _constraint_degrees(q: MotifQuery):
    """Distinct directed/undirected constraint neighbours per template vertex."""
    nbrs = {v: set() for v in q.vertices}
    outs = {v: set() for v in q.vertices}
    ins = {v: set() for v in q.vertices}
    for e in q.edges:
        if e.kind is EdgeKind.FORBIDDEN:
            continue
        nbrs[e.src].add(e.dst)
        nbrs[e.dst].add(e.src)
        if e.kind is EdgeKind.DIRECTED:
            outs[e.src].add(e.dst)
            ins[e.dst].add(e.src)
    return nbrs, outs, ins


def plan_order(q: MotifQuery, g: PropertyDigraph | None = None) -> list[str]:
    """Binding order: greedy by constraint degree, then name, staying connected."""
    nbrs, _, _ = _constraint_degrees(q)
    key = lambda v: (-len(nbrs[v]), v)  # noqa: E731
    order = [min(q.vertices, key=key)]
    placed = set(order)
    while len(order) < q.size:
        frontier = [v for v in q.vertices if v not in placed and nbrs[v] & placed]
        nxt = min(frontier, key=key)
        order.append(nxt)
        placed.add(nxt)
    return order


@dataclass
class _Plan:
    order: list[str]
    k: int
    n: int
    mask: np.ndarray
    anchor_pos: np.ndarray
    anchor_mode: np.ndarray
    cons_pos: np.ndarray
    cons_kind: np.ndarray
    n_cons: np.ndarray
    template_cols: np.ndarray
    graph: PropertyDigraph = field(repr=False)

    def kernel_args(self):
        g = self.graph
        return (self.mask, self.anchor_pos, self.anchor_mode, self.cons_pos, self.cons_kind,
                self.n_cons, g.out_ptr, g.out_idx, g.in_ptr, g.in_idx)


def compile_query(q: MotifQuery, g: PropertyDigraph, order: list[str] | None = None) -> _Plan:
    order = list(order) if order is not None else plan_order(q, g)
    if sorted(order) != sorted(q.vertices):
        raise ValueError("order must be a permutation of the motif vertices")
    k, n = q.size, g.n_vertices
    pos = {v: i for i, v in enumerate(order)}

    directed = {(e.src, e.dst) for e in q.edges if e.kind is EdgeKind.DIRECTED}
    forbidden = {(e.src, e.dst) for e in q.edges if e.kind is EdgeKind.FORBIDDEN}
    undirected = {frozenset((e.src, e.dst)) for e in q.edges if e.kind is EdgeKind.UNDIRECTED}

    cons = [[] for _ in range(k)]
    anchor_pos = np.full(k, -1, dtype=np.int64)
    anchor_mode = np.zeros(k, dtype=np.int64)
    for d, x in enumerate(order):
        best = None
        for j in range(d):
            y = order[j]
            und = frozenset((x, y)) in undirected
            if (y, x) in directed:
                cons[d].append((j, K.REQ_IN))
                if best is None or best[0] > 0:
                    best = (0, j, K.ANCHOR_OUT)
            elif (y, x) in forbidden or (q.induced and not und):
                cons[d].append((j, K.FORB_IN))
            if (x, y) in directed:
                cons[d].append((j, K.REQ_OUT))
                if best is None or best[0] > 0:
                    best = (0, j, K.ANCHOR_IN)
            elif (x, y) in forbidden or (q.induced and not und):
                cons[d].append((j, K.FORB_OUT))
            if und:
                cons[d].append((j, K.REQ_ANY))
                if best is None:
                    best = (1, j, K.ANCHOR_BOTH)
        if d > 0:
            assert best is not None, "plan order must stay constraint-connected"
            anchor_pos[d], anchor_mode[d] = best[1], best[2]
    width = max(1, max(len(c) for c in cons))
    cons_pos = np.zeros((k, width), dtype=np.int64)
    cons_kind = np.zeros((k, width), dtype=np.int64)
    n_cons = np.array([len(c) for c in cons], dtype=np.int64)
    for d, c in enumerate(cons):
        for t, (j, kind) in enumerate(c):
            cons_pos[d, t], cons_kind[d, t] = j, kind

    nbrs, outs, ins = _constraint_degrees(q)
    mask = np.empty((k, n), dtype=bool)
    for d, x in enumerate(order):
        m = ((g.out_degree >= len(outs[x])) & (g.in_degree >= len(ins[x]))
             & (g.n_neighbors >= len(nbrs[x])))
        for p in q.predicates:
            if p.vertex == x:
                m &= predicate_mask(g, p.key, p.op, p.value)
        mask[d] = m
    template_cols = np.array([pos[v] for v in q.vertices], dtype=np.int64)
    return _Plan(order, k, n, mask, anchor_pos, anchor_mode, cons_pos, cons_kind, n_cons,
                 template_cols, g)


# -- public task API -----------------------------------------------------------

@dataclass(frozen=True)
class SearchTask:
    """Partial mapping, template vertex -> host id, in binding order."""

    assignment: tuple[tuple[str, str], ...] = ()
    next_index: int = 0

    @property
    def mapping(self) -> dict[str, str]:
        return dict(self.assignment)


def expand_task(t: SearchTask, q: MotifQuery, g: PropertyDigraph,
                order: list[str] | None = None) -> list[SearchTask]:
    """Children of ``t`` binding the next vertex in ``order``."""
    plan = compile_query(q, g, order)
    if t.next_index >= plan.k:
        raise ValueError("task is already complete")
    if [v for v, _ in t.assignment] != plan.order[:t.next_index]:
        raise ValueError("task assignment does not follow the plan order")
    prefix = np.array([[g.index[h] for _, h in t.assignment]], dtype=np.int64).reshape(1, t.next_index)
    children = K.expand(prefix, plan.n, *plan.kernel_args())
    name = plan.order[t.next_index]
    return [SearchTask(t.assignment + ((name, g.ids[int(row[-1])]),), t.next_index + 1)
            for row in children]


# -- results -------------------------------------------------------------------

@dataclass
class MatchResult:
    count: int
    truncated: bool = False
    mappings: np.ndarray | None = None
    vertices: tuple[str, ...] = ()
    ids: tuple[str, ...] = field(default=(), repr=False)

    def iter_mappings(self) -> Iterator[dict[str, str]]:
        if self.mappings is None:
            return
        for row in self.mappings.tolist():
            yield {v: self.ids[h] for v, h in zip(self.vertices, row)}

    def write_ndjson(self, fh) -> None:
        for m in self.iter_mappings():
            fh.write(json.dumps(m, ensure_ascii=False) + "\n")


def _sorted_template_rows(plan: _Plan, rows: list[np.ndarray]) -> np.ndarray:
    if not rows:
        return np.empty((0, plan.k), dtype=np.int64)
    allrows = np.concatenate(rows)[:, plan.template_cols]
    if len(allrows) > 1:
        allrows = allrows[np.lexsort(allrows.T[::-1])]
    return allrows


# -- pool ----------------------------------------------------------------------

def _chunks(a: np.ndarray, size: int = CHUNK) -> list[np.ndarray]:
    return [a[i:i + size] for i in range(0, len(a), size)]


def _roots(plan: _Plan) -> list[np.ndarray]:
    first = np.flatnonzero(plan.mask[0]).astype(np.int64).reshape(-1, 1)
    return _chunks(first)


def _step(plan: _Plan, item: np.ndarray, record: bool):
    """Process one pooled task chunk: returns (children, count, rows)."""
    p = item.shape[1]
    if p < _DEPTH_FIRST_FROM and p < plan.k:
        children = K.expand(item, plan.n, *plan.kernel_args())
        return _chunks(children), 0, None
    args = plan.kernel_args()
    empty = np.empty((0, plan.k), dtype=np.int64)
    c = K.search(item, plan.k, plan.n, *args, empty)
    rows = None
    if record and c:
        rows = np.empty((c, plan.k), dtype=np.int64)
        K.search(item, plan.k, plan.n, *args, rows)
    return [], c, rows


def _subtree(plan: _Plan, item: np.ndarray, record: bool):
    stack = [item]
    count, rows = 0, []
    while stack:
        children, c, r = _step(plan, stack.pop(), record)
        stack.extend(reversed(children))
        count += c
        if r is not None:
            rows.append(r)
    return count, rows


def _run_pool(plan: _Plan, workers: int, deadline: float | None, record: bool):
    """Drain the task pool. Returns (count, rows, timed_out)."""
    items = _roots(plan)
    if workers <= 1:
        stack = list(reversed(items))
        count, rows = 0, []
        while stack:
            if deadline is not None and time.monotonic() > deadline:
                return count, rows, True
            children, c, r = _step(plan, stack.pop(), record)
            stack.extend(reversed(children))
            count += c
            if r is not None:
                rows.append(r)
        return count, rows, False

    pool: queue.Queue = queue.Queue()
    for it in items:
        pool.put(it)
    counts = [0] * workers
    local_rows: list[list[np.ndarray]] = [[] for _ in range(workers)]
    errors: list[BaseException] = []
    stop = threading.Event()
    expired = threading.Event()

    def work(w):
        while True:
            item = pool.get()
            try:
                if item is None:
                    return
                if stop.is_set():
                    continue
                if deadline is not None and time.monotonic() > deadline:
                    expired.set()
                    stop.set()
                    continue
                children, c, r = _step(plan, item, record)
                for ch in children:
                    pool.put(ch)
                counts[w] += c
                if r is not None:
                    local_rows[w].append(r)
            except BaseException as exc:  # surfaced in the caller
                errors.append(exc)
                stop.set()
            finally:
                pool.task_done()

    threads = [threading.Thread(target=work, args=(w,), daemon=True) for w in range(workers)]
    for t in threads:
        t.start()
    pool.join()
    for _ in threads:
        pool.put(None)
    for t in threads:
        t.join()
    if errors:
        raise errors[0]
    return sum(counts), [r for rs in local_rows for r in rs], expired.is_set()


def _deadline(timeout):
    return None if timeout is None else time.monotonic() + timeout


def count_monomorphisms(q: MotifQuery, g: PropertyDigraph, workers: int = 1,
                        timeout: float | None = None) -> MatchResult:
    """Exact number of injective mappings of ``q`` into ``g``.

    Raw mapping count: symmetric placements are counted once per
    automorphism. Raises :class:`SearchTimeout` (carrying a truncated
    lower-bound result) when ``timeout`` seconds elapse.
    """
    if workers < 1:
        raise ValueError("workers must be positive")
    plan = compile_query(q, g)
    count, _, expired = _run_pool(plan, workers, _deadline(timeout), record=False)
    result = MatchResult(count, truncated=expired, vertices=q.vertices, ids=g.ids)
    if expired:
        raise SearchTimeout(timeout, result)
    return result


def enumerate_monomorphisms(q: MotifQuery, g: PropertyDigraph, limit: int | None = None,
                            workers: int = 1, timeout: float | None = None) -> MatchResult:
    """All mappings, sorted by host ids in template-vertex order.

    With ``limit`` the first-vertex task chunks are completed in host order
    until more than ``limit`` mappings are known; those are sorted and the
    first ``limit`` returned with ``truncated=True``. Which mappings survive
    the cut depends on that chunk order, not on the worker count.
    """
    if workers < 1:
        raise ValueError("workers must be positive")
    if limit is not None and limit < 0:
        raise ValueError("limit must be non-negative")
    plan = compile_query(q, g)
    deadline = _deadline(timeout)
    if limit is None:
        count, rows, expired = _run_pool(plan, workers, deadline, record=True)
        out = _sorted_template_rows(plan, rows)
        result = MatchResult(len(out), expired, out, q.vertices, g.ids)
        if expired:
            raise SearchTimeout(timeout, result)
        return result

    roots = _roots(plan)
    gathered, total, expired = [], 0, False
    window = max(1, workers) * 2
    with ThreadPoolExecutor(max_workers=workers) as ex:
        for start in range(0, len(roots), window):
            if deadline is not None and time.monotonic() > deadline:
                expired = True
                break
            batch = roots[start:start + window]
            for c, rows in ex.map(lambda it: _subtree(plan, it, True), batch):
                if total > limit:
                    break
                gathered.extend(rows)
                total += c
            if total > limit:
                break
    out = _sorted_template_rows(plan, gathered)
    truncated = expired or len(out) > limit
    out = out[:limit]
    result = MatchResult(len(out), truncated, out, q.vertices, g.ids)
    if expired:
        raise SearchTimeout(timeout, result)
    return result
