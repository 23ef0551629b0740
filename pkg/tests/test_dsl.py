import random

import pytest
from hypothesis import given, settings, strategies as st

from motifscope import automorphism_count, canonical_form, parse_motif
from motifscope.dsl import EdgeKind, label_id, read_motif
from motifscope.errors import MotifSyntaxError

from dsl_corpus import ERRORS, VALID
from gen import random_motif, relabel
from oracles import brute_automorphisms, brute_isomorphic


def _shape(q):
    kinds = [e.kind for e in q.edges]
    return (q.size, kinds.count(EdgeKind.DIRECTED), kinds.count(EdgeKind.UNDIRECTED),
            kinds.count(EdgeKind.FORBIDDEN), len(q.predicates))


@pytest.mark.parametrize("src,shape", VALID)
def test_valid_corpus(src, shape):
    q = parse_motif(src)
    assert _shape(q) == shape
    assert parse_motif(q.source()) == q
    assert parse_motif(str(q)) == q


@pytest.mark.parametrize("src,err", ERRORS)
def test_error_corpus(src, err):
    with pytest.raises(err):
        parse_motif(src)


def test_syntax_error_position():
    with pytest.raises(MotifSyntaxError) as exc:
        parse_motif("A -> B\nB -> ")
    assert (exc.value.line, exc.value.column) == (2, 6)


def test_first_appearance_order_and_pretty_print():
    q = parse_motif("C -> A\nA.k = 1\nA - B")
    assert q.vertices == ("C", "A", "B")
    assert q.source() == "C -> A\nA - B\nA.k = 1\n"


def test_typed_literals():
    q = parse_motif('A -> B; A.a = 1; A.b = 1.0; A.c = "1"; A.d = true')
    assert [type(p.value) for p in q.predicates] == [int, float, str, bool]
    assert len(set(q.predicates)) == 4


def test_read_motif(tmp_path):
    p = tmp_path / "m.motif"
    p.write_text("A -> B\n")
    assert read_motif(p, induced=True).induced


def test_labels():
    lab = lambda s: canonical_form(parse_motif(s))  # noqa: E731
    assert lab("A -> B; B -> C") == lab("X -> Y; Y -> Z")
    assert lab("A -> B; B -> C") != lab("A -> B; A -> C")
    assert lab("A - B") == lab("B - A")
    assert lab("A -> B") != lab("A - B")
    assert lab('A -> B; A.t = "x"') != lab('A -> B; B.t = "x"')
    assert canonical_form(parse_motif("A -> B", induced=True)) != lab("A -> B")
    assert len(label_id(lab("A -> B"))) == 12


@pytest.mark.parametrize("src,n", [
    ("A -> B; B -> C; C -> A", 3),
    ("A -> B; B -> C; A -> C", 1),
    ("A - B; B - C", 2),
    ("A - B; B - C; C - D; D - A", 8),
    ("A -> B; B -> A", 2),
])
def test_automorphisms(src, n):
    q = parse_motif(src)
    assert automorphism_count(q) == n == brute_automorphisms(q)


@given(st.integers(2, 6), st.integers(0, 2**32))
@settings(max_examples=80, deadline=None)
def test_label_invariant_under_renaming(size, seed):
    rng = random.Random(seed)
    q = random_motif(rng, size)
    r = relabel(q, rng)
    assert canonical_form(q) == canonical_form(r)
    assert automorphism_count(q) == automorphism_count(r)
    p = parse_motif(q.source(), induced=q.induced)
    assert parse_motif(p.source(), induced=p.induced) == p
    assert canonical_form(p) == canonical_form(q)


@given(st.integers(2, 4), st.integers(0, 2**32))
@settings(max_examples=150, deadline=None)
def test_label_equality_matches_isomorphism(size, seed):
    rng = random.Random(seed)
    a, b = random_motif(rng, size, preds=False), random_motif(rng, size, preds=False)
    if rng.random() < 0.3:
        b = relabel(a, rng)
    assert (canonical_form(a) == canonical_form(b)) == brute_isomorphic(a, b)
