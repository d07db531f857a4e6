import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import path_graph
from limrand.algorithms.shatter import region_growing, separated_subset, shatter_decompose
from limrand.errors import ParameterError
from limrand.graph import Graph, generate
from limrand.params import Params
from limrand.randomness import ExplicitTape, FullSource, SharedSource
from limrand.verify import verify_decomposition


def test_separated_singleton():
    g = path_graph([1, 2, 3])
    assert separated_subset(g, {2}, 5) == {2}


def test_separated_path_greedy():
    g = path_graph([1, 2, 3])
    assert separated_subset(g, {1, 2, 3}, 2) == {1, 3}


def test_separated_rejects_d0():
    with pytest.raises(ParameterError):
        separated_subset(path_graph([1, 2]), {1}, 0)


@given(st.integers(1, 40), st.integers(0, 10 ** 6), st.integers(1, 5))
def test_separated_brute_force(n, seed, d):
    g = generate("gnp", n, {"p": 0.1}, seed=seed)
    rng = np.random.default_rng(seed)
    W = {v for v in g.nodes if rng.random() < 0.6} or {min(g.nodes)}
    S = separated_subset(g, W, d)
    dist = dict(nx.all_pairs_shortest_path_length(g.to_networkx()))
    assert S <= W
    for a, b in itertools.combinations(S, 2):
        assert dist[a].get(b, float("inf")) >= d
    for w in W - S:
        assert any(dist[w].get(s, float("inf")) < d for s in S)


@given(st.integers(1, 40), st.integers(0, 10 ** 6))
def test_region_growing_partitions_with_nonadjacent_balls(n, seed):
    g = generate("gnp", n, {"p": 0.15}, seed=seed)
    adj = g.adjacency
    plan = region_growing(adj)
    seen = set()
    for balls in plan:
        owner = {}
        for root, ball, parent in balls:
            assert root in ball and parent[root] is None
            for v in ball:
                assert v not in seen
                seen.add(v)
                owner[v] = root
                if parent[v] is not None:
                    assert parent[v] in adj[v] and parent[v] in ball
        for v, r in owner.items():
            assert all(owner.get(u, r) == r for u in adj[v])
    assert seen == set(adj)
    assert len(plan) <= 2 + int(np.log2(max(n, 1)))


@given(st.integers(2, 80), st.integers(0, 10 ** 6))
def test_shatter_always_valid(n, seed):
    g = generate("gnp", n, {"p": 0.08}, seed=seed)
    nd = shatter_decompose(g, 1, FullSource(seed), Params(n=n))
    assert verify_decomposition(g, nd).valid
    rep = nd.report
    assert (rep.fallback_clusters == 0) == (rep.vbar_size == 0)


def test_zero_tape_forces_fallback():
    g = generate("cycle", 40, seed=1)
    zero = SharedSource(ExplicitTape(np.zeros(1 << 16, dtype=np.uint8)))
    params = Params(n=40)
    nd = shatter_decompose(g, 2, zero, params)
    assert nd.report.vbar_size == g.n
    assert nd.report.fallback_clusters > 0
    assert verify_decomposition(g, nd).valid
    assert min(c.color for c in nd.clusters) > 2


def test_full_success_no_fallback():
    g = generate("path", 30, seed=2)
    nd = shatter_decompose(g, Params(n=30).phases, FullSource(0), Params(n=30))
    assert nd.report.vbar_size == 0 and nd.report.fallback_clusters == 0
    assert set(nd.report.step_of.values()) == {1}


def test_reproducible():
    g = generate("gnp", 128, {"p": 0.03}, seed=9)
    a = shatter_decompose(g, 1, FullSource(5))
    b = shatter_decompose(g, 1, FullSource(5))
    assert a.to_json() == b.to_json()
    assert a.report.to_dict() == b.report.to_dict()


def test_rejects_T0():
    with pytest.raises(ParameterError):
        shatter_decompose(path_graph([1, 2]), 0, FullSource(0))
