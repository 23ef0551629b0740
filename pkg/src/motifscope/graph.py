"""Host graph model and CSV ingestion.

Vertex ids are opaque strings. Internally every vertex gets a dense integer
index, assigned in lexicographic id order, so sorting by index is the same
as sorting by id. Edges are kept sorted by ``(src, dst)`` and indexed in
CSR form in both directions.
"""
from __future__ import annotations

import csv
import hashlib
import io
import logging
import os
import re
from dataclasses import dataclass
from typing import Any, Iterable, Mapping

import numpy as np

from .errors import (
    AttributeForUnknownEdge,
    AttributeForUnknownVertex,
    GraphFormatError,
    MalformedRow,
    SelfLoop,
)

log = logging.getLogger(__name__)

KINDS = ("int", "float", "bool", "str")
_HEADER_PAIRS = {("src", "dst"), ("source", "target")}


@dataclass(frozen=True, eq=False)
class Column:
    """A typed attribute column aligned to vertex or edge order."""

    kind: str
    values: np.ndarray
    present: np.ndarray

    def get(self, i):
        if not self.present[i]:
            return None
        v = self.values[i]
        if self.kind == "int":
            return int(v)
        if self.kind == "float":
            return float(v)
        if self.kind == "bool":
            return bool(v)
        return v

    def take(self, order) -> "Column":
        return Column(self.kind, _frozen(self.values[order]), _frozen(self.present[order]))

    def __eq__(self, other):
        if not isinstance(other, Column):
            return NotImplemented
        return (self.kind == other.kind
                and np.array_equal(self.present, other.present)
                and all(a == b for a, b, p in zip(self.values, other.values, self.present) if p))


def _frozen(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def _parse_bool(s):
    t = s.strip().lower()
    if t == "true":
        return True
    if t == "false":
        return False
    raise ValueError(s)


_INT_RE = re.compile(r"[+-]?[0-9]+")


def _parse_int(s):
    if not _INT_RE.fullmatch(s.strip()):
        raise ValueError(s)
    return int(s)


def _parse_float(s):
    if "_" in s:
        raise ValueError(s)
    return float(s)


def infer_kind(cells: Iterable[str | None]) -> str:
    """Pick the narrowest type that parses every non-missing cell."""
    cells = [c for c in cells if c is not None and c != ""]
    for kind, parse in (("int", _parse_int), ("float", _parse_float), ("bool", _parse_bool)):
        try:
            for c in cells:
                parse(c)
        except ValueError:
            continue
        if cells or kind == "str":
            return kind
    return "str"


def column_from_strings(cells: list[str | None]) -> Column:
    kind = infer_kind(cells)
    present = np.array([c is not None and c != "" for c in cells], dtype=bool)
    if kind == "int":
        values = np.array([int(c) if p else 0 for c, p in zip(cells, present)], dtype=np.int64)
    elif kind == "float":
        values = np.array([float(c) if p else 0.0 for c, p in zip(cells, present)], dtype=np.float64)
    elif kind == "bool":
        values = np.array([_parse_bool(c) if p else False for c, p in zip(cells, present)], dtype=bool)
    else:
        values = np.array([c if p else "" for c, p in zip(cells, present)], dtype=object)
    return Column(kind, _frozen(values), _frozen(present))


def value_kind(v: Any) -> str:
    if isinstance(v, bool) or isinstance(v, np.bool_):
        return "bool"
    if isinstance(v, (int, np.integer)):
        return "int"
    if isinstance(v, (float, np.floating)):
        return "float"
    if isinstance(v, str):
        return "str"
    raise TypeError(f"unsupported attribute value {v!r}")


def column_from_values(values: list[Any]) -> Column:
    """Build a column from python values (``None`` = missing)."""
    kinds = {value_kind(v) for v in values if v is not None}
    if kinds == {"int", "float"}:
        kind = "float"
    elif len(kinds) > 1:
        raise GraphFormatError(f"mixed attribute types {sorted(kinds)} in one column")
    else:
        kind = kinds.pop() if kinds else "str"
    present = np.array([v is not None for v in values], dtype=bool)
    fill = {"int": 0, "float": 0.0, "bool": False, "str": ""}[kind]
    dtype = {"int": np.int64, "float": np.float64, "bool": bool, "str": object}[kind]
    arr = np.empty(len(values), dtype=dtype)
    for i, v in enumerate(values):
        arr[i] = fill if v is None else v
    return Column(kind, _frozen(arr), _frozen(present))


def format_value(kind: str, v) -> str:
    if kind == "bool":
        return "true" if v else "false"
    if kind == "float":
        return repr(float(v))
    return str(v)


@dataclass(frozen=True)
class LoadReport:
    duplicate_edges: int = 0
    dropped_below_weight: int = 0


class PropertyDigraph:
    """Immutable simple digraph with typed vertex and edge attribute columns."""

    def __init__(self, ids, src, dst, vertex_attrs: Mapping[str, Column] | None = None,
                 edge_attrs: Mapping[str, Column] | None = None, load_report: LoadReport | None = None):
        ids = list(ids)
        order = sorted(range(len(ids)), key=ids.__getitem__)
        remap = np.empty(len(ids), dtype=np.int64)
        remap[order] = np.arange(len(ids))
        self.ids: tuple[str, ...] = tuple(ids[i] for i in order)
        if any(not isinstance(v, str) or not v for v in self.ids):
            raise GraphFormatError("vertex ids must be non-empty strings")
        if len(set(self.ids)) != len(self.ids):
            raise GraphFormatError("duplicate vertex id")
        self.index: dict[str, int] = {v: i for i, v in enumerate(self.ids)}
        n = len(self.ids)

        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        if src.shape != dst.shape or src.ndim != 1:
            raise GraphFormatError("src/dst arrays must be 1-d and equal length")
        if len(src) and (src.min() < 0 or dst.min() < 0 or max(src.max(), dst.max()) >= n):
            raise GraphFormatError("edge endpoint outside the vertex set")
        src, dst = remap[src], remap[dst]
        if np.any(src == dst):
            raise GraphFormatError("self-loops are not allowed")
        eorder = np.lexsort((dst, src))
        src, dst = src[eorder], dst[eorder]
        if len(src) > 1 and np.any((src[1:] == src[:-1]) & (dst[1:] == dst[:-1])):
            raise GraphFormatError("duplicate directed edge")
        self.src = _frozen(src)
        self.dst = _frozen(dst)

        self.out_ptr = _frozen(np.concatenate(([0], np.cumsum(np.bincount(src, minlength=n)))).astype(np.int64))
        self.out_idx = self.dst
        iorder = np.lexsort((src, dst))
        self.in_ptr = _frozen(np.concatenate(([0], np.cumsum(np.bincount(dst, minlength=n)))).astype(np.int64))
        self.in_idx = _frozen(src[iorder])
        self.out_degree = _frozen(np.diff(self.out_ptr))
        self.in_degree = _frozen(np.diff(self.in_ptr))
        lo, hi = np.minimum(src, dst), np.maximum(src, dst)
        pairs = np.unique(lo * max(n, 1) + hi)
        self.n_neighbors = _frozen(
            np.bincount(pairs // max(n, 1), minlength=n) + np.bincount(pairs % max(n, 1), minlength=n)
            if len(pairs) else np.zeros(n, dtype=np.int64))

        self.vertex_attrs: dict[str, Column] = {}
        for key, col in (vertex_attrs or {}).items():
            if len(col.values) != n:
                raise GraphFormatError(f"vertex attribute {key!r} has wrong length")
            self.vertex_attrs[key] = col.take(order)
        self.edge_attrs: dict[str, Column] = {}
        for key, col in (edge_attrs or {}).items():
            if len(col.values) != len(src):
                raise GraphFormatError(f"edge attribute {key!r} has wrong length")
            self.edge_attrs[key] = col.take(eorder)
        self.load_report = load_report
        self._edge_set = None

    # -- construction helpers ----------------------------------------------

    @classmethod
    def from_edges(cls, edges: Iterable[tuple], vertex_attrs: Mapping[str, Mapping[str, Any]] | None = None,
                   edge_attrs: Mapping[tuple, Mapping[str, Any]] | None = None,
                   vertices: Iterable | None = None) -> "PropertyDigraph":
        """Build from ``(src, dst)`` pairs; ids are converted with ``str``."""
        edges = [(str(u), str(v)) for u, v in edges]
        ids = {}
        for v in vertices or ():
            ids.setdefault(str(v), None)
        for u, v in edges:
            ids.setdefault(u, None)
            ids.setdefault(v, None)
        ids = list(ids)
        pos = {v: i for i, v in enumerate(ids)}
        vcols = {}
        if vertex_attrs:
            vertex_attrs = {str(k): v for k, v in vertex_attrs.items()}
            for vid in vertex_attrs:
                if vid not in pos:
                    raise AttributeForUnknownVertex(vid)
            keys = sorted({k for m in vertex_attrs.values() for k in m})
            for k in keys:
                vcols[k] = column_from_values([vertex_attrs.get(v, {}).get(k) for v in ids])
        ecols = {}
        if edge_attrs:
            edge_attrs = {(str(u), str(v)): m for (u, v), m in edge_attrs.items()}
            eset = set(edges)
            for e in edge_attrs:
                if e not in eset:
                    raise AttributeForUnknownEdge(*e)
            keys = sorted({k for m in edge_attrs.values() for k in m})
            for k in keys:
                ecols[k] = column_from_values([edge_attrs.get(e, {}).get(k) for e in edges])
        src = [pos[u] for u, _ in edges]
        dst = [pos[v] for _, v in edges]
        return cls(ids, src, dst, vcols, ecols)

    def with_edges(self, src, dst, edge_attrs: Mapping[str, Column] | None = None) -> "PropertyDigraph":
        """Same vertex set and vertex attributes, new edge arrays (indices)."""
        return PropertyDigraph(self.ids, src, dst, self.vertex_attrs, edge_attrs)

    # -- queries ------------------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.ids)

    @property
    def n_edges(self) -> int:
        return len(self.src)

    def __len__(self):
        return len(self.ids)

    def __repr__(self):
        return f"PropertyDigraph(|V|={self.n_vertices}, |E|={self.n_edges})"

    def edges(self):
        for u, v in zip(self.src.tolist(), self.dst.tolist()):
            yield self.ids[u], self.ids[v]

    def successors(self, i: int) -> np.ndarray:
        return self.out_idx[self.out_ptr[i]:self.out_ptr[i + 1]]

    def predecessors(self, i: int) -> np.ndarray:
        return self.in_idx[self.in_ptr[i]:self.in_ptr[i + 1]]

    def has_edge(self, u: str, v: str) -> bool:
        if self._edge_set is None:
            self._edge_set = set(zip(self.src.tolist(), self.dst.tolist()))
        if u not in self.index or v not in self.index:
            return False
        return (self.index[u], self.index[v]) in self._edge_set

    def vertex_attr(self, vid: str, key: str):
        col = self.vertex_attrs.get(key)
        return None if col is None else col.get(self.index[vid])

    def __eq__(self, other):
        if not isinstance(other, PropertyDigraph):
            return NotImplemented
        return (self.ids == other.ids
                and np.array_equal(self.src, other.src)
                and np.array_equal(self.dst, other.dst)
                and self.vertex_attrs == other.vertex_attrs
                and self.edge_attrs == other.edge_attrs)

    __hash__ = None

    def digest(self) -> str:
        """sha256 over the canonical CSV exports (edges, then vertex attributes)."""
        h = hashlib.sha256()
        h.update(edge_csv_text(self).encode())
        h.update(b"\0")
        h.update(vertex_csv_text(self).encode())
        return h.hexdigest()


def degree_sequences(g: PropertyDigraph) -> tuple[dict[str, int], dict[str, int]]:
    ins = dict(zip(g.ids, g.in_degree.tolist()))
    outs = dict(zip(g.ids, g.out_degree.tolist()))
    return ins, outs


# -- CSV I/O -----------------------------------------------------------------

def _read_rows(path):
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            yield lineno, [c.strip() for c in row]


def _is_edge_header(row):
    return len(row) >= 2 and (row[0].lower(), row[1].lower()) in _HEADER_PAIRS


def load_graph(edge_file, vertex_attr_file=None, edge_attr_file=None,
               min_weight: float | None = None, weight_key: str = "weight") -> PropertyDigraph:
    """Read an edge-list CSV (plus optional attribute CSVs) into a graph.

    Without a header row the third column is named ``weight`` and further
    columns ``col3``, ``col4``, ...; with a header the names are taken from
    it. Duplicate edge rows keep the first row's attributes.
    """
    names = None
    seen: dict[tuple[str, str], int] = {}
    rows: list[list[str]] = []
    duplicates = 0
    for lineno, row in _read_rows(edge_file):
        if names is None:
            if _is_edge_header(row):
                names = row[2:]
                if len(set(names)) != len(names) or any(not c for c in names):
                    raise MalformedRow(lineno, "bad header", path=str(edge_file))
                continue
            names = ["weight"] + [f"col{i}" for i in range(3, len(row))] if len(row) > 2 else []
        if len(row) != 2 + len(names):
            raise MalformedRow(lineno, f"expected {2 + len(names)} columns, got {len(row)}")
        u, v = row[0], row[1]
        if not u or not v:
            raise MalformedRow(lineno, "empty vertex id")
        if u == v:
            raise SelfLoop(lineno, u)
        if (u, v) in seen:
            duplicates += 1
            continue
        seen[(u, v)] = len(rows)
        rows.append(row)
    names = names or []
    if duplicates:
        log.warning("%s: collapsed %d duplicate edge rows", edge_file, duplicates)

    ecells = {k: [r[2 + j] for r in rows] for j, k in enumerate(names)}
    if edge_attr_file is not None:
        header = None
        extra: dict[str, list] = {}
        for lineno, row in _read_rows(edge_attr_file):
            if header is None:
                if not _is_edge_header(row):
                    raise MalformedRow(lineno, "edge attribute file needs a src,dst,... header")
                header = row[2:]
                for k in header:
                    if k in ecells or k in extra:
                        raise MalformedRow(lineno, f"duplicate edge attribute {k!r}")
                    extra[k] = [None] * len(rows)
                continue
            if len(row) != 2 + len(header):
                raise MalformedRow(lineno, f"expected {2 + len(header)} columns, got {len(row)}")
            e = (row[0], row[1])
            if e not in seen:
                raise AttributeForUnknownEdge(*e)
            for j, k in enumerate(header):
                extra[k][seen[e]] = row[2 + j]
        ecells.update(extra)
    ecols = {k: column_from_strings(c) for k, c in ecells.items()}

    dropped = 0
    if min_weight is not None:
        col = ecols.get(weight_key)
        if col is None or col.kind not in ("int", "float"):
            raise GraphFormatError(f"--min-weight needs a numeric {weight_key!r} edge column")
        keep = col.present & (col.values >= min_weight)
        dropped = int((~keep).sum())
        rows = [r for r, k in zip(rows, keep) if k]
        ecols = {k: c.take(np.flatnonzero(keep)) for k, c in ecols.items()}

    ids: dict[str, int] = {}
    src, dst = [], []
    for r in rows:
        src.append(ids.setdefault(r[0], len(ids)))
        dst.append(ids.setdefault(r[1], len(ids)))

    vcols = {}
    if vertex_attr_file is not None:
        header = None
        cells: dict[str, list] = {}
        for lineno, row in _read_rows(vertex_attr_file):
            if header is None:
                if row[0].lower() != "id" or len(row) < 2:
                    raise MalformedRow(lineno, "vertex attribute file needs an id,... header")
                header = row[1:]
                if len(set(header)) != len(header):
                    raise MalformedRow(lineno, "duplicate attribute column")
                cells = {k: [None] * len(ids) for k in header}
                continue
            if len(row) != 1 + len(header):
                raise MalformedRow(lineno, f"expected {1 + len(header)} columns, got {len(row)}")
            if row[0] not in ids:
                raise AttributeForUnknownVertex(row[0])
            for j, k in enumerate(header):
                cells[k][ids[row[0]]] = row[1 + j]
        vcols = {k: column_from_strings(c) for k, c in cells.items()}

    return PropertyDigraph(list(ids), src, dst, vcols, ecols,
                           load_report=LoadReport(duplicates, dropped))


def edge_csv_text(g: PropertyDigraph) -> str:
    """Edge list with header, rows sorted by (src, dst)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    keys = sorted(g.edge_attrs)
    w.writerow(["src", "dst", *keys])
    cols = [g.edge_attrs[k] for k in keys]
    for e, (u, v) in enumerate(zip(g.src.tolist(), g.dst.tolist())):
        w.writerow([g.ids[u], g.ids[v],
                    *(format_value(c.kind, c.values[e]) if c.present[e] else "" for c in cols)])
    return buf.getvalue()


def vertex_csv_text(g: PropertyDigraph) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    keys = sorted(g.vertex_attrs)
    if not keys:
        return ""
    w.writerow(["id", *keys])
    cols = [g.vertex_attrs[k] for k in keys]
    for i, vid in enumerate(g.ids):
        w.writerow([vid, *(format_value(c.kind, c.values[i]) if c.present[i] else "" for c in cols)])
    return buf.getvalue()


def write_graph(g: PropertyDigraph, edge_path, vertex_attr_path=None) -> None:
    with open(edge_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(edge_csv_text(g))
    if vertex_attr_path is not None and g.vertex_attrs:
        with open(vertex_attr_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(vertex_csv_text(g))
