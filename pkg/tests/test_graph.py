import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from motifscope import PropertyDigraph, degree_sequences, load_graph, write_graph
from motifscope.errors import AttributeForUnknownVertex, MalformedRow, SelfLoop
from motifscope.graph import edge_csv_text, infer_kind


def test_two_rows(write):
    g = load_graph(write("e.csv", "1,2\n2,3\n"))
    assert (g.n_vertices, g.n_edges) == (3, 2)


def test_self_loop_reports_line(write):
    with pytest.raises(SelfLoop) as exc:
        load_graph(write("e.csv", "1,1\n"))
    assert exc.value.line == 1


def test_duplicate_rows_collapse(write, caplog):
    g = load_graph(write("e.csv", "1,2\n1,2\n"))
    assert g.n_edges == 1
    assert g.load_report.duplicate_edges == 1
    assert "duplicate" in caplog.text


def test_degree_examples():
    g = PropertyDigraph.from_edges([(1, 2), (2, 3)])
    assert degree_sequences(g) == ({"1": 0, "2": 1, "3": 1}, {"1": 1, "2": 1, "3": 0})
    assert degree_sequences(PropertyDigraph.from_edges([])) == ({}, {})
    ins, outs = degree_sequences(PropertyDigraph.from_edges([(1, 2), (2, 3), (3, 1)]))
    assert set(ins.values()) == set(outs.values()) == {1}


def test_header_and_typed_columns(write):
    g = load_graph(write("e.csv", "src,dst,weight,kind\r\na,b,3,x\r\nb,c,5,y\r\n"))
    assert g.edge_attrs["weight"].kind == "int"
    assert g.edge_attrs["kind"].kind == "str"
    g2 = load_graph(write("h.csv", "source,target\na,b\n"))
    assert list(g2.edges()) == [("a", "b")]


def test_headerless_extra_columns(write):
    g = load_graph(write("e.csv", "a,b,2.5,true\nb,c,1,false\n"))
    assert g.edge_attrs["weight"].kind == "float"
    assert g.edge_attrs["col3"].kind == "bool"


@pytest.mark.parametrize("cells,kind", [
    (["1", "-2", "+3"], "int"),
    (["1", "2.5", "1e3"], "float"),
    (["true", "False"], "bool"),
    (["1", "x"], "str"),
    (["1_000"], "str"),
])
def test_kind_inference(cells, kind):
    assert infer_kind(cells) == kind


def test_vertex_attributes(write):
    e = write("e.csv", "1,2\n2,3\n")
    v = write("v.csv", "id,type,size\n1,KC,10\n3,MBON,4\n")
    g = load_graph(e, v)
    assert g.vertex_attr("1", "type") == "KC"
    assert g.vertex_attr("2", "type") is None
    assert g.vertex_attr("3", "size") == 4
    with pytest.raises(AttributeForUnknownVertex):
        load_graph(e, write("bad.csv", "id,type\n9,KC\n"))


def test_ragged_row(write):
    with pytest.raises(MalformedRow) as exc:
        load_graph(write("e.csv", "1,2\n2,3,4\n"))
    assert exc.value.line == 2


def test_min_weight(write):
    g = load_graph(write("e.csv", "src,dst,weight\n1,2,5\n2,3,1\n3,1,3\n"), min_weight=3)
    assert sorted(g.edges()) == [("1", "2"), ("3", "1")]
    assert g.load_report.dropped_below_weight == 1


def test_export_sorted(tmp_path):
    g = PropertyDigraph.from_edges([("b", "a"), ("a", "c"), ("a", "b")],
                                   edge_attrs={("a", "b"): {"w": 2}})
    text = edge_csv_text(g)
    assert text.splitlines() == ["src,dst,w", "a,b,2", "a,c,", "b,a,"]


def test_immutable_arrays():
    g = PropertyDigraph.from_edges([(1, 2)])
    with pytest.raises(ValueError):
        g.out_idx[0] = 5


edge_lists = st.lists(
    st.tuples(st.integers(0, 12), st.integers(0, 12)).filter(lambda e: e[0] != e[1]),
    max_size=40, unique=True)


@given(edge_lists)
@settings(max_examples=60, deadline=None)
def test_degree_and_adjacency_invariants(edges):
    g = PropertyDigraph.from_edges(edges)
    assert g.in_degree.sum() == g.out_degree.sum() == g.n_edges == len(edges)
    es = set(g.edges())
    for u in range(g.n_vertices):
        for v in range(g.n_vertices):
            e = (g.ids[u], g.ids[v]) in es
            assert e == (v in g.successors(u)) == (u in g.predecessors(v)) == g.has_edge(g.ids[u], g.ids[v])


@given(edge_lists, st.lists(st.integers(-5, 5), min_size=40, max_size=40))
@settings(max_examples=40, deadline=None)
def test_round_trip(tmp_path_factory, edges, weights):
    attrs = {(str(u), str(v)): {"weight": w} for (u, v), w in zip(edges, weights)}
    vattrs = {str(u): {"tag": f"t{u % 3}"} for u, _ in edges}
    g = PropertyDigraph.from_edges(edges, vertex_attrs=vattrs, edge_attrs=attrs)
    d = tmp_path_factory.mktemp("rt")
    write_graph(g, d / "e.csv", d / "v.csv")
    h = load_graph(d / "e.csv", d / "v.csv" if g.vertex_attrs else None)
    assert h == g
    assert h.digest() == g.digest()
    write_graph(h, d / "e2.csv")
    assert (d / "e2.csv").read_bytes() == (d / "e.csv").read_bytes()


def test_lexicographic_index_order():
    g = PropertyDigraph.from_edges([("10", "9"), ("9", "2")])
    assert g.ids == ("10", "2", "9")
    assert np.all(np.diff(g.src * g.n_vertices + g.dst) > 0)
