import gzip

import numpy as np
import pytest

from fairembed.errors import (CompletenessError, DataError, NodeTypeError,
                              ParseError, SchemaError)
from fairembed.graph import (Graph, derive_edge_attributes, load_attributes,
                             load_triples, sample_sensitive_nodes)


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_tsv_triple_counts(tmp_path):
    path = write(tmp_path, "g.tsv",
                 "a\tr1\tb\n"
                 "# a comment\n"
                 "b\tr2\tc\n"
                 "a\tr1\tc\n")
    g = load_triples(path, "tsv-triple")
    assert g.num_edges == 3
    assert g.num_relations == 2
    assert g.num_nodes == 3


def test_vocabulary_is_inferred(tmp_path):
    path = write(tmp_path, "g.tsv", "x\tr\tonly_here\n")
    g = load_triples(path, "tsv-triple")
    assert "only_here" in g.node_names


def test_movielens_ratings_become_relations(tmp_path):
    lines = []
    for u in range(4):
        for r in range(1, 6):
            lines.append(f"{u}::{100 + r}::{r}::978300760")
    path = write(tmp_path, "ml.dat", "\n".join(lines) + "\n")
    g = load_triples(path, "movielens-rating")
    assert g.num_relations == 5
    assert g.relation_names == ["1", "2", "3", "4", "5"]
    # users and items are distinct types even with clashing raw ids
    assert g.type_counts() == {"user": 4, "item": 5}


def test_movielens_bad_rating(tmp_path):
    path = write(tmp_path, "ml.dat", "1::2::bad::0\n")
    with pytest.raises(SchemaError):
        load_triples(path, "movielens-rating")


def test_bipartite_single_relation(tmp_path):
    path = write(tmp_path, "e.tsv", "u1\ti1\nu2\ti1\nu1\ti2\n")
    g = load_triples(path, "bipartite-edge")
    assert g.num_relations == 1
    assert g.num_edges == 3


def test_malformed_line_reports_lineno(tmp_path):
    path = write(tmp_path, "g.tsv", "a\tr\tb\nbroken line\n")
    with pytest.raises(ParseError) as exc:
        load_triples(path, "tsv-triple")
    assert exc.value.lineno == 2


def test_gzip_inputs(tmp_path):
    p = tmp_path / "g.tsv.gz"
    with gzip.open(p, "wt") as fh:
        fh.write("a\tr\tb\n")
    g = load_triples(str(p), "tsv-triple")
    assert g.num_edges == 1


def test_duplicate_triples_are_dropped(tmp_path):
    path = write(tmp_path, "g.tsv", "a\tr\tb\na\tr\tb\n")
    g = load_triples(path, "tsv-triple")
    assert g.num_edges == 1


def test_load_attributes_cardinalities(tmp_path):
    gpath = write(tmp_path, "e.tsv", "u1\ti1\nu2\ti1\nu3\ti2\n")
    g = load_triples(gpath, "bipartite-edge")
    apath = write(tmp_path, "a.tsv",
                  "u1\tgender\tM\nu1\tage\t1\n"
                  "u2\tgender\tF\nu2\tage\t25\n"
                  "u3\tgender\tM\nu3\tage\t35\n")
    t = load_attributes(apath, g)
    assert t.node_type == "user"
    assert t.attr_names == ["gender", "age"]
    assert t.cardinalities == [2, 3]
    # first-appearance indexing
    assert t.values_for([g.node_id("user", "u1")]).tolist() == [[0, 0]]


def test_single_binary_attribute(tmp_path):
    gpath = write(tmp_path, "e.tsv", "u1\ti1\nu2\ti1\n")
    g = load_triples(gpath, "bipartite-edge")
    apath = write(tmp_path, "a.tsv", "u1\tx\t0\nu2\tx\t1\n")
    t = load_attributes(apath, g)
    assert t.num_attrs == 1
    assert t.cardinalities == [2]


def test_missing_node_is_completeness_error(tmp_path):
    gpath = write(tmp_path, "e.tsv", "u1\ti1\nu2\ti1\n")
    g = load_triples(gpath, "bipartite-edge")
    apath = write(tmp_path, "a.tsv", "u1\tx\t0\n")
    with pytest.raises(CompletenessError):
        load_attributes(apath, g)


def test_wrong_type_node_rejected(tmp_path):
    gpath = write(tmp_path, "e.tsv", "u1\ti1\nu2\ti1\n")
    g = load_triples(gpath, "bipartite-edge")
    apath = write(tmp_path, "a.tsv", "u1\tx\t0\nu2\tx\t1\ni1\tx\t0\n")
    with pytest.raises(NodeTypeError):
        load_attributes(apath, g)


def test_derive_edge_attributes(tmp_path):
    gpath = write(tmp_path, "e.tsv",
                  "u1\tc1\nu1\tc3\nu2\tc2\nu3\tc1\nu3\tc2\nu3\tc3\n")
    g = load_triples(gpath, "bipartite-edge")
    sens = [g.node_id("item", c) for c in ("c1", "c2", "c3")]
    t = derive_edge_attributes(g, sens)
    assert t.cardinalities == [2, 2, 2]
    u1 = g.node_id("user", "u1")
    assert t.values_for([u1]).tolist() == [[1, 0, 1]]
    with pytest.raises(ValueError):
        derive_edge_attributes(g, [])
    with pytest.raises(IndexError):
        derive_edge_attributes(g, [999])


def test_sample_sensitive_nodes_excludes_top():
    rng = np.random.default_rng(0)
    edges = []
    # item j gets degree 40-j
    names = []
    for j in range(30):
        for u in range(40 - j):
            edges.append((f"u{u}", f"c{j}"))
    text = "\n".join(f"{a}\t{b}" for a, b in edges)
    import tempfile, os
    with tempfile.NamedTemporaryFile("w", suffix=".tsv", delete=False) as fh:
        fh.write(text)
        path = fh.name
    try:
        g = load_triples(path, "bipartite-edge")
        picked = sample_sensitive_nodes(g, "item", count=10, top=25,
                                        exclude_top=5, seed=1)
        deg = g.degrees()
        ranks = {c: i for i, c in enumerate(sorted(
            g.nodes_of_type("item"), key=lambda n: -deg[n]))}
        assert len(picked) == 10
        for p in picked:
            assert 5 <= ranks[p] < 25
    finally:
        os.unlink(path)


def test_duplicate_triple_guard_in_graph():
    with pytest.raises(DataError):
        Graph(["a", "b"], np.zeros(2), ["entity"], ["r"],
              np.array([[0, 0, 1], [0, 0, 1]]))


def test_derive_edge_attributes_matches_direct_scan(tmp_path):
    rng = np.random.default_rng(12)
    lines = set()
    for u in range(40):
        for c in rng.choice(12, size=4, replace=False):
            lines.add(f"u{u}\tc{c}")
    path = write(tmp_path, "e.tsv", "\n".join(sorted(lines)) + "\n")
    g = load_triples(path, "bipartite-edge")
    sens = [g.node_id("item", f"c{j}") for j in (0, 3, 7)]
    t = derive_edge_attributes(g, sens)
    # oracle: direct scan of the edge list
    for u in range(40):
        uid = g.node_id("user", f"u{u}")
        got = t.values_for([uid])[0]
        for k, s in enumerate(sens):
            linked = any((h == uid and x == s) or (h == s and x == uid)
                         for h, _, x in g.edges)
            assert got[k] == int(linked)


def test_attribute_type_hint_disambiguates_clashing_names(tmp_path):
    # movielens-style: user ids and item ids share the same numeric names
    path = write(tmp_path, "ml.dat", "1::1::3::0\n1::2::4::0\n2::1::5::0\n")
    g = load_triples(path, "movielens-rating")
    apath = write(tmp_path, "a.tsv", "1\tgender\tM\n2\tgender\tF\n")
    with pytest.raises(NodeTypeError):
        load_attributes(apath, g)  # '1' is both a user and an item
    t = load_attributes(apath, g, node_type="user")
    assert t.node_type == "user"
    assert t.cardinalities == [2]
