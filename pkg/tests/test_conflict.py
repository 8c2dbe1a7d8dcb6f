from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meshsched.conflict import (
    ConflictGraph,
    build_conflict_graph,
    build_multigraph,
    conflict_graph,
    interference_pairs,
    rho,
)
from meshsched.oracle import naive_conflict_edges
from meshsched.routing import PathSet, generate_path_group
from meshsched.topology import MeshNetwork, generate_network

from .conftest import chain, structural_graph


def edge_set(g):
    return {frozenset(e) for e in g.edges()}


def test_multigraph_counts():
    d = build_multigraph(None, PathSet.of((0, 1)))
    assert len(d.nodes) == 2 and len(d.transmissions) == 1
    d = build_multigraph(None, PathSet.of((0, 1, 2), (3, 1, 4), (5, 2, 6, 7)))
    assert len(d.transmissions) == 2 + 2 + 3
    assert d.nodes == tuple(sorted({0, 1, 2, 3, 4, 5, 6, 7}))


def test_multigraph_rejects_invalid_path():
    net = MeshNetwork.from_points([(0, 0), (500, 0)], radius=100)
    with pytest.raises(ValueError):
        build_multigraph(net, PathSet.of((0, 1)))


def test_single_hop_is_isolated():
    g, _ = chain(1)
    assert g.size == 1 and g.num_edges() == 0
    assert g.terminal == {0} and g.pred == (-1,) and g.succ == (-1,)


def test_three_hops_give_triangle():
    g, _ = chain(3)
    assert edge_set(g) == {frozenset(e) for e in combinations(range(3), 2)}


def test_four_hops_edge_set():
    g, _ = chain(4)
    assert edge_set(g) == {frozenset(e) for e in [(0, 1), (1, 2), (2, 3), (0, 2), (1, 3)]}
    assert not g.adjacent(0, 3)


def test_parallel_transmissions_form_clique():
    g, _ = structural_graph((0, 1), (0, 1), (1, 0))
    assert edge_set(g) == {frozenset(e) for e in combinations(range(3), 2)}
    assert {t.tx_id for t in g.nodes} == {(0, 0), (1, 0), (2, 0)}


def test_pred_succ_terminal():
    g, _ = structural_graph((0, 1, 2, 3), (4, 5))
    assert g.pred == (-1, 0, 1, -1)
    assert g.succ == (1, 2, -1, -1)
    assert g.terminal == {2, 3}
    assert len(g.terminal) == g.P == 2


def test_rho_examples():
    g, _ = chain(5)
    assert rho(g) == 0
    g, _ = structural_graph((0, 9, 1), (2, 9, 3))
    assert g.num_edges() == 6
    assert rho(g) == Fraction(2)


def test_interference_pairs_skip_hops():
    net = MeshNetwork.from_points([(0, 0), (90, 0), (180, 0), (90, 80)], radius=100)
    d = build_multigraph(net, PathSet.of((0, 1, 2)))
    assert interference_pairs(net, d) == []
    d = build_multigraph(net, PathSet.of((0, 1, 2), (3, 1)))
    assert interference_pairs(net, d) == [(0, 3)] or sorted(interference_pairs(net, d)) == sorted(
        p for p in [(0, 3), (2, 3)] if net.distance(*p) <= 100
    )


def test_temporary_node_links_distant_paths():
    # two single-hop paths whose inner endpoints are in range of each other
    net = MeshNetwork.from_points([(0, 0), (90, 0), (180, 0), (270, 0)], radius=100)
    ps = PathSet.of((0, 1), (2, 3))
    assert structural_graph((0, 1), (2, 3))[0].num_edges() == 0
    g = conflict_graph(net, ps)
    assert edge_set(g) == {frozenset((0, 1))}


@settings(max_examples=40, deadline=None)
@given(n=st.integers(4, 12), delta=st.sampled_from([2, 4, 8]), seed=st.integers(0, 10**6), P=st.integers(1, 6))
def test_matches_naive_construction(n, delta, seed, P):
    n -= n % 2
    net = generate_network(n, delta, seed)
    ps = generate_path_group(net, 0, seed).set_for(min(P, n // 2))
    g = conflict_graph(net, ps)
    hops = [(t.tail, t.head) for t in g.nodes]
    X = sorted({v for p in ps.paths for v in p.nodes})
    in_range = [(a, b) for a, b in combinations(X, 2) if net.distance(a, b) <= net.radius]
    assert edge_set(g) == naive_conflict_edges(hops, in_range)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_structural_invariants(seed):
    net = generate_network(24, 4, seed)
    g = conflict_graph(net, generate_path_group(net, 0, seed).full)
    for i, nb in enumerate(g.adj):
        assert i not in nb
        assert all(i in g.adj[j] for j in nb)
    for hops in g.path_nodes().values():
        for a, b in zip(hops, hops[1:]):
            assert g.adjacent(a, b)
        for a, b in zip(hops, hops[2:]):
            assert g.adjacent(a, b)
    by_pair = {}
    for i, t in enumerate(g.nodes):
        by_pair.setdefault(t.ends, []).append(i)
    for group in by_pair.values():
        for a, b in combinations(group, 2):
            assert g.adjacent(a, b)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6), k=st.integers(0, 6))
def test_interference_only_adds_edges(seed, k):
    net = generate_network(16, 4, seed)
    d = build_multigraph(net, generate_path_group(net, 0, seed).set_for(4))
    pairs = interference_pairs(net, d)
    rng = np.random.default_rng(seed)
    sub = [pairs[i] for i in sorted(rng.permutation(len(pairs))[: min(k, len(pairs))])]
    base = edge_set(build_conflict_graph(d))
    mid = edge_set(build_conflict_graph(d, sub))
    full = edge_set(build_conflict_graph(d, pairs))
    assert base <= mid <= full


def test_serialization_roundtrip(tmp_path, three_routes):
    g, _ = three_routes
    g.save(tmp_path / "g.json")
    back = ConflictGraph.load(tmp_path / "g.json")
    assert back.nodes == g.nodes and back.adj == g.adj
    assert (back.pred, back.succ, back.terminal, back.P) == (g.pred, g.succ, g.terminal, g.P)
    doc = g.to_dict()
    assert set(doc) >= {"nodes", "edges"}
    assert set(doc["nodes"][0]) >= {"tx_id", "tail", "head", "pred", "succ", "terminal"}


def test_csr_matches_adjacency(three_routes):
    g, _ = three_routes
    indptr, indices = g.csr()
    for i in range(g.size):
        assert tuple(indices[indptr[i]:indptr[i + 1]]) == g.adj[i]
