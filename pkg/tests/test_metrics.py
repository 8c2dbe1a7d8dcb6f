from __future__ import annotations

from fractions import Fraction
from itertools import combinations, cycle

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meshsched.conflict import ConflictGraph, Transmission
from meshsched.errors import NotConverged, ZeroThroughputWindow
from meshsched.metrics import (
    Estimate,
    InsufficientSamples,
    ThroughputSample,
    component_bound,
    estimate_throughput,
    max_clique,
    max_independent_set,
    phi_bound,
    streaming_estimator,
    summarize,
)
from meshsched.ser import run_ser, ser_steps
from meshsched.sera import run_sera

from .conftest import chain, random_graph, structural_graph


def edgeless(k: int) -> ConflictGraph:
    return ConflictGraph.from_edges([Transmission(i, 0, 2 * i, 2 * i + 1) for i in range(k)], [])


def test_samples():
    assert ThroughputSample(3, 7).T == Fraction(3, 7)
    assert Estimate(5, 9).T == Fraction(1, 2)
    with pytest.raises(ValueError):
        ThroughputSample(1, 0)


def test_phi_examples():
    g, _ = chain(3)
    pb = phi_bound(g)
    assert (pb.omega, pb.alpha, pb.phi, pb.bound) == (3, 1, 3, Fraction(1, 3))
    pb = phi_bound(edgeless(5))
    assert (pb.omega, pb.alpha, pb.bound) == (1, 5, 5)
    g, _ = chain(4)
    pb = phi_bound(g)
    assert (pb.omega, pb.alpha, pb.phi) == (3, 2, 3)


def test_phi_limit():
    g = random_graph(1, n=40, delta=8)
    assert phi_bound(g, exact_limit=g.size - 1) is None
    assert component_bound(g, exact_limit=g.size - 1) is None


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), half=st.integers(4, 12))
def test_clique_and_independent_set_against_networkx(seed, half):
    g = random_graph(seed, n=2 * half)
    ref = nx.Graph()
    ref.add_nodes_from(range(g.size))
    ref.add_edges_from(g.edges())
    omega = max_clique(g)
    alpha = max_independent_set(g)
    assert all(b in g.adj[a] for a, b in combinations(omega, 2))
    assert g.is_independent(alpha)
    assert len(omega) == max(len(c) for c in nx.find_cliques(ref))
    comp = nx.complement(ref)
    assert len(alpha) == max(len(c) for c in nx.find_cliques(comp))


def test_component_bound_adds_components():
    g, _ = structural_graph((0, 1), (2, 3, 4, 5))
    assert component_bound(g) == 1 + Fraction(1, 3)
    g, _ = chain(3)
    assert component_bound(g) == phi_bound(g).bound


def test_summarize():
    assert summarize([1, 1, 1, 1]) == (1.0, 0.0)
    mean, hw = summarize([0, 1] * 50)
    assert mean == 0.5
    assert hw == pytest.approx(0.0985, abs=1e-4)
    with pytest.raises(InsufficientSamples):
        summarize([0.3])


def test_estimator_on_short_chains():
    assert streaming_estimator(cycle([1]), w=1).T == 1
    # terminal hop of a 2-hop chain fires every other step, starting at step 1
    est = streaming_estimator(cycle([0, 1]), w=2)
    assert (est.count, est.t_plus) == (2, 3)
    assert est.T == Fraction(1, 2)


def test_estimator_accepts_sink_sets():
    g, _ = chain(3)
    est = streaming_estimator(ser_steps(g, "nd-df"), w=g.size, terminal=g.terminal)
    assert est.T == Fraction(1, 3)


def test_estimator_failures():
    with pytest.raises(ZeroThroughputWindow):
        streaming_estimator(cycle([0]), w=3, grace=5)
    with pytest.raises(NotConverged):
        streaming_estimator(iter([1, 0, 0, 1, 0, 1]), w=1, tol=1e-6)
    with pytest.raises(NotConverged):
        # the rate keeps growing, so no window ever settles
        streaming_estimator(iter(range(10**4)), w=2, t_max=200)
    with pytest.raises(ValueError):
        streaming_estimator(cycle([1]), w=0)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6), advance=st.booleans())
def test_kernel_estimate_matches_reference(seed, advance):
    from meshsched.sera import sera_steps

    g = random_graph(seed, n=14)
    est = estimate_throughput(g, "nd-bf", advance=advance, B=1)
    ref = streaming_estimator(sera_steps(g, "nd-bf", 1, advance=advance), w=g.size, terminal=g.terminal)
    assert est == ref


@pytest.mark.parametrize("seed", range(5))
def test_estimate_close_to_period(seed):
    g = random_graph(seed, n=20)
    for advance, exact in ((False, run_ser(g).T), (True, run_sera(g).T)):
        est = estimate_throughput(g, advance=advance, t_max=10**5)
        # a long window washes out the transient
        long = estimate_throughput(g, advance=advance, w=50 * g.size, t_max=10**6)
        assert abs(float(long.T - exact)) <= 0.05 * float(exact)
        assert est.t_plus >= g.size
