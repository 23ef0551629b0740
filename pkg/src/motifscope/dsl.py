"""Motif query language: parser, pretty-printer, canonical labels.

Grammar, one statement per line or separated by ``;``::

    X -> Y          directed edge required
    X - Y           undirected: a host edge in at least one direction
    X !> Y          forbidden: no host edge X -> Y
    X.key OP value  vertex attribute predicate, OP in = != < <= > >=
    # comment

Values are double-quoted strings, integers, floats or ``true``/``false``.
Vertices are introduced by edge statements, in order of first appearance.
"""
from __future__ import annotations

import enum
import hashlib
import itertools
import math
import re
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import (
    ContradictoryEdges,
    DisconnectedMotif,
    MotifSyntaxError,
    MotifTooLarge,
    UnknownVertexInPredicate,
)

MAX_MOTIF_SIZE = 8
MIN_MOTIF_SIZE = 2


class EdgeKind(str, enum.Enum):
    DIRECTED = "directed"
    UNDIRECTED = "undirected"
    FORBIDDEN = "forbidden"


_ARROWS = {EdgeKind.DIRECTED: "->", EdgeKind.UNDIRECTED: "-", EdgeKind.FORBIDDEN: "!>"}
_ORDERING_OPS = ("<", "<=", ">", ">=")
OPS = ("=", "!=", "<", "<=", ">", ">=")
_OP_ALIASES = {"≠": "!=", "≤": "<=", "≥": ">="}


@dataclass(frozen=True)
class EdgeConstraint:
    src: str
    dst: str
    kind: EdgeKind


@dataclass(frozen=True)
class AttributePredicate:
    vertex: str
    key: str
    op: str
    value: bool | int | float | str

    def __eq__(self, other):
        if not isinstance(other, AttributePredicate):
            return NotImplemented
        # 1 == True in python; keep tags distinct
        return (self.vertex, self.key, self.op, type(self.value), self.value) == \
            (other.vertex, other.key, other.op, type(other.value), other.value)

    def __hash__(self):
        return hash((self.vertex, self.key, self.op, type(self.value).__name__, self.value))


def format_literal(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    return '"' + v.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


@dataclass(frozen=True)
class MotifQuery:
    vertices: tuple[str, ...]
    edges: tuple[EdgeConstraint, ...]
    predicates: tuple[AttributePredicate, ...] = ()
    induced: bool = False
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(self.vertices)})
        validate(self)

    @property
    def size(self) -> int:
        return len(self.vertices)

    def vertex_index(self, name: str) -> int:
        return self._index[name]

    @property
    def is_fully_directed(self) -> bool:
        return not any(e.kind is EdgeKind.UNDIRECTED for e in self.edges)

    def source(self) -> str:
        """Pretty-print: one statement per line, edges then predicates."""
        lines = [f"{e.src} {_ARROWS[e.kind]} {e.dst}" for e in self.edges]
        lines += [f"{p.vertex}.{p.key} {p.op} {format_literal(p.value)}" for p in self.predicates]
        return "\n".join(lines) + "\n"

    def replace(self, **kw) -> "MotifQuery":
        d = dict(vertices=self.vertices, edges=self.edges, predicates=self.predicates, induced=self.induced)
        d.update(kw)
        return MotifQuery(**d)

    def __str__(self):
        return "; ".join(self.source().strip().splitlines())


# -- validation ----------------------------------------------------------------

def _normalize_edges(edges):
    """Collapse repeated/implied constraints and reject contradictions."""
    directed, forbidden, undirected = set(), set(), set()
    out = []
    for e in edges:
        if e.src == e.dst:
            raise ContradictoryEdges((e.src, e.dst))
        if e.kind is EdgeKind.DIRECTED:
            if (e.src, e.dst) in forbidden:
                raise ContradictoryEdges((e.src, e.dst))
            if (e.src, e.dst) in directed:
                continue
            directed.add((e.src, e.dst))
        elif e.kind is EdgeKind.FORBIDDEN:
            if (e.src, e.dst) in directed:
                raise ContradictoryEdges((e.src, e.dst))
            if (e.src, e.dst) in forbidden:
                continue
            forbidden.add((e.src, e.dst))
        else:
            if frozenset((e.src, e.dst)) in undirected:
                continue
            undirected.add(frozenset((e.src, e.dst)))
        out.append(e)
    result = []
    for e in out:
        if e.kind is EdgeKind.UNDIRECTED:
            a, b = e.src, e.dst
            if (a, b) in directed or (b, a) in directed:
                continue  # implied by the directed constraint
            if (a, b) in forbidden and (b, a) in forbidden:
                raise ContradictoryEdges((a, b))
        result.append(e)
    return tuple(result)


def validate(q: MotifQuery) -> None:
    names = set(q.vertices)
    if len(names) != len(q.vertices):
        raise ContradictoryEdges(("duplicate", "vertex"))
    if len(q.vertices) > MAX_MOTIF_SIZE:
        raise MotifTooLarge(len(q.vertices), MAX_MOTIF_SIZE)
    for e in q.edges:
        for v in (e.src, e.dst):
            if v not in names:
                raise DisconnectedMotif()
    if _normalize_edges(q.edges) != q.edges:
        raise ContradictoryEdges(("redundant", "constraint"))
    for p in q.predicates:
        if p.vertex not in names:
            raise UnknownVertexInPredicate(p.vertex)
        if p.op not in OPS:
            raise ValueError(f"unknown operator {p.op!r}")
        if p.op in _ORDERING_OPS and (isinstance(p.value, bool) or not isinstance(p.value, (int, float))):
            raise ValueError(f"operator {p.op} needs a numeric value")
    if len(q.vertices) < MIN_MOTIF_SIZE:
        raise DisconnectedMotif()
    # weak connectivity over directed + undirected constraints
    parent = {v: v for v in q.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in q.edges:
        if e.kind is not EdgeKind.FORBIDDEN:
            parent[find(e.src)] = find(e.dst)
    roots = {find(v) for v in q.vertices}
    if len(roots) > 1:
        raise DisconnectedMotif(len(roots))


# -- parser --------------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<sep>[\n;])
  | (?P<arrow>->|!>|-(?![0-9.]))
  | (?P<op><=|>=|!=|=|<|>|≠|≤|≥)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<number>[+-]?(?:[0-9]+\.[0-9]*|\.[0-9]+|[0-9]+)(?:[eE][+-]?[0-9]+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<dot>\.)
""", re.VERBOSE)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(src: str):
    pos, line, col = 0, 1, 1
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            if src[pos] == '"':
                raise MotifSyntaxError(line, col, "closing '\"'", src[pos:pos + 10])
            raise MotifSyntaxError(line, col, "statement", src[pos])
        kind = m.lastgroup
        text = m.group()
        if kind not in ("ws", "comment"):
            yield _Tok(kind, text, line, col)
        if text == "\n":
            line, col = line + 1, 1
        else:
            col += len(text)
        pos = m.end()
    yield _Tok("eof", "", line, col)


def _unescape(s):
    out, i = [], 1
    while i < len(s) - 1:
        c = s[i]
        if c == "\\":
            nxt = s[i + 1]
            out.append({"n": "\n", "t": "\t"}.get(nxt, nxt))
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def _literal(tok):
    if tok.kind == "string":
        return _unescape(tok.text)
    if tok.kind == "number":
        if re.fullmatch(r"[+-]?[0-9]+", tok.text):
            return int(tok.text)
        v = float(tok.text)
        if not math.isfinite(v):
            raise MotifSyntaxError(tok.line, tok.col, "finite number", tok.text)
        return v
    if tok.kind == "name" and tok.text in ("true", "false"):
        return tok.text == "true"
    raise MotifSyntaxError(tok.line, tok.col, "value (string, number, true or false)", tok.text or "end of input")


def parse_motif(source: str, induced: bool = False) -> MotifQuery:
    """Parse motif source text into a validated :class:`MotifQuery`."""
    toks = list(_tokenize(source))
    i = 0
    vertices: list[str] = []
    seen: set[str] = set()
    edges: list[EdgeConstraint] = []
    raw_preds: list[tuple[_Tok, AttributePredicate]] = []

    def expect(kind, what):
        nonlocal i
        t = toks[i]
        if t.kind != kind:
            raise MotifSyntaxError(t.line, t.col, what, t.text or "end of input")
        i += 1
        return t

    while toks[i].kind != "eof":
        if toks[i].kind == "sep":
            i += 1
            continue
        a = expect("name", "vertex name")
        if toks[i].kind == "dot":
            i += 1
            key = expect("name", "attribute key")
            t = toks[i]
            if t.kind != "op":
                raise MotifSyntaxError(t.line, t.col, "comparison operator", t.text or "end of input")
            op = _OP_ALIASES.get(t.text, t.text)
            i += 1
            vt = toks[i]
            value = _literal(vt)
            i += 1
            if op in _ORDERING_OPS and (isinstance(value, bool) or isinstance(value, str)):
                raise MotifSyntaxError(vt.line, vt.col, f"numeric value for '{op}'", vt.text)
            raw_preds.append((a, AttributePredicate(a.text, key.text, op, value)))
        else:
            t = toks[i]
            if t.kind != "arrow":
                raise MotifSyntaxError(t.line, t.col, "'->', '-', '!>' or '.'", t.text or "end of input")
            i += 1
            b = expect("name", "vertex name")
            if b.text == a.text:
                raise MotifSyntaxError(b.line, b.col, "a vertex different from the source", b.text)
            kind = {"->": EdgeKind.DIRECTED, "-": EdgeKind.UNDIRECTED, "!>": EdgeKind.FORBIDDEN}[t.text]
            for v in (a.text, b.text):
                if v not in seen:
                    seen.add(v)
                    vertices.append(v)
            edges.append(EdgeConstraint(a.text, b.text, kind))
        t = toks[i]
        if t.kind not in ("sep", "eof"):
            raise MotifSyntaxError(t.line, t.col, "end of statement", t.text)

    if not vertices:
        t = toks[-1]
        raise MotifSyntaxError(t.line, t.col, "at least one edge statement", "end of input")
    if len(vertices) > MAX_MOTIF_SIZE:
        raise MotifTooLarge(len(vertices), MAX_MOTIF_SIZE)
    for tok, p in raw_preds:
        if p.vertex not in seen:
            raise UnknownVertexInPredicate(p.vertex)
    preds = []
    for _, p in raw_preds:
        if p not in preds:
            preds.append(p)
    return MotifQuery(tuple(vertices), _normalize_edges(edges), tuple(preds), induced)


def read_motif(path, induced: bool = False) -> MotifQuery:
    with open(path, encoding="utf-8") as fh:
        return parse_motif(fh.read(), induced=induced)


# -- structure codes -------------------------------------------------------------

# Per ordered pair (i, j): bit 0 directed i->j, bit 1 forbidden i->j, bit 2 undirected.
_DIR, _FORB, _UND = 1, 2, 4


def structure_matrix(q: MotifQuery) -> np.ndarray:
    n = q.size
    m = np.zeros((n, n), dtype=np.int64)
    for e in q.edges:
        i, j = q.vertex_index(e.src), q.vertex_index(e.dst)
        if e.kind is EdgeKind.DIRECTED:
            m[i, j] |= _DIR
        elif e.kind is EdgeKind.FORBIDDEN:
            m[i, j] |= _FORB
        else:
            m[i, j] |= _UND
            m[j, i] |= _UND
    return m


def _vertex_labels(q: MotifQuery) -> list[tuple]:
    labels = [[] for _ in q.vertices]
    for p in q.predicates:
        labels[q.vertex_index(p.vertex)].append(
            (p.key, p.op, type(p.value).__name__, format_literal(p.value)))
    return [tuple(sorted(x)) for x in labels]


def _invariants(m: np.ndarray, labels) -> list[tuple]:
    inv = []
    for i in range(m.shape[0]):
        row, col = m[i], m[:, i]
        inv.append((labels[i],
                    int(np.count_nonzero(row & _DIR)), int(np.count_nonzero(col & _DIR)),
                    int(np.count_nonzero(row & _UND)),
                    int(np.count_nonzero(row & _FORB)), int(np.count_nonzero(col & _FORB))))
    return inv


def _class_permutations(inv) -> tuple[list[int], np.ndarray]:
    """All orderings of vertices that sort them by invariant class.

    Returns the sorted class list and an ``(n_perm, n)`` array whose rows
    give the vertex placed at each canonical position.
    """
    order = sorted(range(len(inv)), key=lambda i: inv[i])
    classes = [list(g) for _, g in itertools.groupby(order, key=lambda i: inv[i])]
    parts = [list(itertools.permutations(c)) for c in classes]
    perms = [sum(combo, ()) for combo in itertools.product(*parts)]
    return [inv[c[0]] for c in classes for _ in c], np.array(perms, dtype=np.int64)


def _lexmin_rows(a: np.ndarray) -> np.ndarray:
    keys = a.T[::-1]
    return a[np.lexsort(keys)[0]]


@lru_cache(maxsize=65536)
def canonical_form(q: MotifQuery) -> bytes:
    """Relabeling-invariant byte label of a motif.

    Vertices are first grouped by isomorphism-invariant classes (predicate
    labels, directed/undirected/forbidden degrees); the label is the
    lexicographically smallest pair-code matrix over every ordering
    consistent with that grouping.
    """
    m = structure_matrix(q)
    labels = _vertex_labels(q)
    inv = _invariants(m, labels)
    sorted_inv, perms = _class_permutations(inv)
    permuted = m[perms[:, :, None], perms[:, None, :]].reshape(len(perms), -1)
    best = _lexmin_rows(permuted)
    head = f"{q.size}:{'i' if q.induced else 'm'}:"
    code = "".join(str(int(c)) for c in best)
    pred = ";".join(repr(s[0]) for s in sorted_inv)
    return (head + code + (":" + pred if q.predicates else "")).encode()


def automorphism_count(q: MotifQuery) -> int:
    """Vertex permutations preserving the constraint structure (predicates ignored)."""
    m = structure_matrix(q)
    inv = _invariants(m, [()] * q.size)
    # only permutations mapping each vertex within its class can be automorphisms
    order = sorted(range(q.size), key=lambda i: inv[i])
    classes = [list(g) for _, g in itertools.groupby(order, key=lambda i: inv[i])]
    count = 0
    for combo in itertools.product(*(itertools.permutations(c) for c in classes)):
        sigma = np.empty(q.size, dtype=np.int64)
        for cls, img in zip(classes, combo):
            sigma[cls] = img
        if np.array_equal(m[sigma[:, None], sigma[None, :]], m):
            count += 1
    return count


def label_id(label: bytes) -> str:
    """Short filesystem-safe id for a canonical label."""
    return hashlib.sha256(label).hexdigest()[:12]
