import json
import os
import random

import numpy as np
import pytest

import networkx as nx

from psu38.coset import (CacheMismatch, coset_canon, export_adjacency_json,
                         export_edge_list, export_graph6, group_hash,
                         load_cache, read_graph6_header, save_cache,
                         transversal)
from psu38.fastops import FieldOps, SubgroupArrays
from psu38.gf64 import GF64
from psu38.grp import named_groups
from psu38.psu import PElement


def test_transversal_sizes(ng):
    t1 = transversal(ng.K1, ng.K12)
    t2 = transversal(ng.K2, ng.K12)
    assert len(t1) == 4 and len(t2) == 3
    # representatives lie in distinct right cosets
    seen = set()
    for t in t1:
        key = frozenset((h * t).key for h in ng.K12.elems)
        assert key not in seen
        seen.add(key)


def test_graph_scale(graph):
    assert graph.n1 == 25536
    assert graph.n2 == 34048
    assert len(graph.edges) == 102144
    deg = np.diff(graph.indptr)
    assert set(deg[:graph.n1].tolist()) == {4}
    assert set(deg[graph.n1:].tolist()) == {3}


def test_no_multiedges_or_loops(graph):
    e = graph.edges
    keys = e[:, 0].astype(np.int64) * graph.n2 + e[:, 1].astype(np.int64)
    assert len(np.unique(keys)) == len(keys)


def test_base_edge(graph):
    assert graph.base_x2 in graph.neighbors(graph.base_x1)
    assert graph.degree(graph.base_x1) == 4
    assert graph.degree(graph.base_x2) == 3


def test_adjacency_matches_coset_intersection(graph, ng):
    """Definition-level oracle: K1 g and K2 h are adjacent iff the cosets
    intersect, i.e. g h^-1 lies in K2 K1 (scanned exhaustively)."""
    rng = random.Random(5)

    def intersects(u, v):
        gu = graph.rep_element(u)
        gv = graph.rep_element(v)
        t = gv * gu.inv()
        return any((k2.inv() * t) in ng.K1.eset for k2 in ng.K2.elems)

    for _ in range(6):
        u = rng.randrange(graph.n1)
        nbrs = [int(x) for x in graph.neighbors(u)]
        for v in nbrs[:2]:
            assert intersects(u, v)
        while True:
            v = graph.n1 + rng.randrange(graph.n2)
            if v not in nbrs:
                break
        assert not intersects(u, v)


def test_coset_canon_invariance(graph, ng):
    ops = graph.ops
    sub = graph.subs[1]
    rng = random.Random(6)
    g = PElement(ng.p["E"].el * ng.p["D"].el)
    c = coset_canon(ops, sub, g)
    for _ in range(10):
        k = rng.choice(ng.K1.elems)
        assert coset_canon(ops, sub, k * g) == c
    # idempotence: the canon of the canon is itself
    assert coset_canon(ops, sub, c) == c
    # members of the subgroup all canonize to the trivial coset's rep
    ident = PElement(ng.p["A"].el * ng.p["A"].el.inv())
    c0 = coset_canon(ops, sub, ident)
    for _ in range(5):
        assert coset_canon(ops, sub, rng.choice(ng.K1.elems)) == c0


def test_vertex_stabilizers(graph, ng):
    assert graph.vertex_stabilizer(graph.base_x1, "K").eset == ng.K1.eset
    assert graph.vertex_stabilizer(graph.base_x2, "K").eset == ng.K2.eset
    assert graph.vertex_stabilizer(graph.base_x1, "H").eset == ng.H1.eset
    rng = random.Random(7)
    for _ in range(3):
        v = rng.randrange(graph.nv)
        stab = graph.vertex_stabilizer(v, "K")
        side = graph.side_of(v)
        assert len(stab) == (1296 if side == 1 else 972)
        assert graph.image(v, stab.elems[5]) == v
        hstab = graph.vertex_stabilizer(v, "H")
        assert len(hstab) == (432 if side == 1 else 324)
    v2 = graph.n1 + random.Random(8).randrange(graph.n2)
    assert len(graph.vertex_stabilizer(v2, "H")) == 324


def test_action_is_right_action(graph, ng):
    rng = random.Random(9)
    p = ng.p
    for _ in range(5):
        v = rng.randrange(graph.nv)
        x = rng.choice(ng.K1.elems)
        y = rng.choice(ng.K2.elems)
        assert graph.image(graph.image(v, x), y) == graph.image(v, x * y)


def test_stabilizer_permutes_neighbors(graph, ng):
    v = graph.base_x1
    nbrs = set(int(u) for u in graph.neighbors(v))
    for x in list(ng.K1.elems)[:40]:
        img = {graph.image(u, x) for u in nbrs}
        assert img == nbrs


def test_group_order_from_graph(graph):
    assert graph.group_order_from_graph() == 33094656


def test_cache_roundtrip(graph, ng, tmp_path):
    path = str(tmp_path / "g.psu38")
    save_cache(graph, path)
    g2 = load_cache(path, ng)
    assert g2.n1 == graph.n1 and g2.n2 == graph.n2
    assert np.array_equal(g2.reps[1], graph.reps[1])
    assert np.array_equal(g2.reps[2], graph.reps[2])
    assert np.array_equal(g2.edges, graph.edges)
    assert np.array_equal(g2.indptr, graph.indptr)
    assert np.array_equal(g2.indices, graph.indices)


def test_cache_mismatch_rejected(graph, tmp_path):
    path = str(tmp_path / "g.psu38")
    save_cache(graph, path)
    other = named_groups(GF64(0b1000011))
    with pytest.raises(CacheMismatch):
        load_cache(path, other)
    with open(path, "r+b") as fh:
        fh.seek(0)
        fh.write(b"XXXXXXXX")
    with pytest.raises(CacheMismatch):
        load_cache(path, graph.ng)


def test_group_hash_differs_by_modulus():
    a = group_hash(named_groups(GF64()))
    b = group_hash(named_groups(GF64(0b1000011)))
    assert a != b


def test_export_edge_list(graph, tmp_path):
    path = str(tmp_path / "edges.txt")
    n = export_edge_list(graph, path)
    assert n == 102144
    with open(path) as fh:
        lines = fh.read().splitlines()
    assert len(lines) == 102144
    u0, v0 = map(int, lines[0].split())
    assert 0 <= u0 < graph.n1 and graph.n1 <= v0 < graph.nv
    assert lines == sorted(lines, key=lambda s: tuple(map(int, s.split())))


def test_export_adjacency_json(graph, tmp_path):
    path = str(tmp_path / "adj.json")
    export_adjacency_json(graph, path)
    with open(path) as fh:
        doc = json.load(fh)
    assert doc["n1"] == 25536 and doc["n2"] == 34048
    assert len(doc["adjacency"]) == graph.nv
    assert sorted(doc["adjacency"][0]) == sorted(
        int(x) for x in graph.neighbors(0))
    assert sum(len(a) for a in doc["adjacency"]) == 2 * 102144


def test_graph6_small_graphs_against_networkx(tmp_path):
    rng = random.Random(11)
    for n, p in ((5, 0.5), (26, 0.2), (63, 0.1), (80, 0.07)):
        g = nx.gnp_random_graph(n, p, seed=rng.randrange(10**6))
        edges = np.array([(u, v) for u, v in g.edges()], dtype=np.int64)
        path = str(tmp_path / f"g{n}.g6")
        if len(edges) == 0:
            edges = np.zeros((0, 2), dtype=np.int64)
        export_graph6(edges, path, n=n, col_chunk=7)
        with open(path, "rb") as fh:
            data = fh.read().strip()
        back = nx.from_graph6_bytes(data)
        assert sorted(back.edges()) == sorted(g.edges())
        assert read_graph6_header(path) == n


def test_graph6_header_for_full_size():
    from psu38.coset import graph6_bytes_header
    h = graph6_bytes_header(59584)
    assert h[0] == 126
    n = ((h[1] - 63) << 12) | ((h[2] - 63) << 6) | (h[3] - 63)
    assert n == 59584


@pytest.mark.slow
def test_build_deterministic_across_threads(graph, ng):
    from psu38.coset import build_graph
    g2 = build_graph(ng, threads=3)
    assert np.array_equal(g2.reps[1], graph.reps[1])
    assert np.array_equal(g2.reps[2], graph.reps[2])
    assert np.array_equal(g2.edges, graph.edges)


@pytest.mark.slow
def test_graph6_full_export(graph, tmp_path):
    path = str(tmp_path / "full.g6")
    n = export_graph6(graph, path)
    assert n == 59584
    assert read_graph6_header(path) == 59584
    expected_bytes = 4 + (59584 * 59583 // 2 + 5) // 6 + 1
    assert os.path.getsize(path) == expected_bytes
