import math

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from conftest import from_nx, path_graph
from limrand.errors import ParameterError, StructureError
from limrand.graph import (INF, FAMILIES, Graph, bfs_distances, bfs_tree, contract_to_cluster_graph,
                           diameter, distances_from, generate, random_bipartite, read_edgelist,
                           tree_edges_from_parents, write_edgelist)
from limrand.params import Params


def test_path_one_node():
    g = generate("path", 1, seed=3)
    assert g.n == 1 and g.m == 0


def test_path_five():
    g = generate("path", 5, seed=0)
    assert g.m == 4 and diameter(g) == 4


@pytest.mark.parametrize("family,n,params", [("path", 30, {}), ("cycle", 30, {}), ("tree", 30, {}),
                                             ("grid", 36, {}), ("gnp", 50, {"p": 0.1}),
                                             ("regular", 30, {"d": 3})])
def test_generated_graphs_satisfy_invariants(family, n, params):
    g = generate(family, n, params, seed=11)
    assert g.n == n
    assert len(set(g.nodes)) == n
    assert all(1 <= v <= n ** 3 for v in g.nodes)
    for v in g.nodes:
        assert v not in g.neighbors(v)
        for u in g.neighbors(v):
            assert v in g.neighbors(u)
    assert generate(family, n, params, seed=11).adjacency == g.adjacency


def test_family_shapes():
    assert generate("cycle", 10).m == 10
    assert generate("tree", 40, seed=2).m == 39
    assert nx.is_tree(generate("tree", 40, seed=2).to_networkx())
    assert generate("grid", 12, {"rows": 3}).m == 3 * 3 + 2 * 4
    assert all(generate("regular", 20, {"d": 4}, seed=1).degree(v) == 4
               for v in generate("regular", 20, {"d": 4}, seed=1).nodes)


def test_gnp_edge_count_within_three_sigma():
    mean = math.comb(100, 2) * 0.05
    sigma = math.sqrt(math.comb(100, 2) * 0.05 * 0.95)
    counts = [generate("gnp", 100, {"p": 0.05}, seed=s).m for s in range(100)]
    avg = sum(counts) / len(counts)
    # the average of 100 draws has standard deviation sigma / 10
    assert abs(avg - mean) <= 3 * sigma / 10
    assert all(abs(c - mean) <= 5 * sigma for c in counts)


@pytest.mark.parametrize("bad", [("gnp", 10, {}), ("gnp", 10, {"p": 1.5}), ("cycle", 2, {}),
                                 ("grid", 10, {"rows": 3}), ("regular", 5, {"d": 3}),
                                 ("nosuch", 5, {}), ("path", 0, {})])
def test_generate_rejects_bad_parameters(bad):
    with pytest.raises(ParameterError):
        generate(*bad)


def test_sequential_ids():
    g = generate("path", 5, ids="sequential")
    assert g.nodes == (1, 2, 3, 4, 5)
    assert g.has_edge(1, 2)


def test_graph_validation():
    with pytest.raises(StructureError):
        Graph({1: {2}, 2: set()})
    with pytest.raises(StructureError):
        Graph({1: {1}})


def test_bfs_distances_path():
    g = path_graph([1, 2, 3])
    assert {v: d for v, (d, _) in bfs_distances(g, [1]).items()} == {1: 0, 2: 1, 3: 2}


def test_bfs_distances_sources_all():
    g = generate("gnp", 30, {"p": 0.1}, seed=1)
    assert all(d == 0 and s == v for v, (d, s) in bfs_distances(g, g.nodes).items())


def test_bfs_cycle_max_distance():
    g = generate("cycle", 10, ids="sequential")
    assert max(d for d, _ in bfs_distances(g, [1]).values()) == 5


def test_bfs_tie_break_and_unreachable():
    g = Graph.from_edges([1, 2, 3, 4], [(1, 2), (2, 3)])
    d = bfs_distances(g, [3, 1])
    assert d[2] == (1, 1)
    assert d[4] == (INF, None)
    assert INF > 10 ** 9


def test_bfs_empty_sources():
    with pytest.raises(ParameterError):
        bfs_distances(path_graph([1, 2]), [])


@given(st.integers(5, 40), st.floats(0.02, 0.4), st.integers(0, 10 ** 6), st.integers(1, 3))
def test_bfs_matches_networkx_and_triangle_property(n, p, seed, nsrc):
    g = generate("gnp", n, {"p": p}, seed=seed)
    sources = sorted(g.nodes)[:nsrc]
    d = bfs_distances(g, sources)
    h = g.to_networkx()
    for v in g.nodes:
        best = [nx.shortest_path_length(h, s, v) for s in sources if nx.has_path(h, s, v)]
        if best:
            assert d[v][0] == min(best)
            assert d[v][1] == min(s for s in sources if nx.has_path(h, s, v)
                                  and nx.shortest_path_length(h, s, v) == min(best))
        else:
            assert d[v] == (INF, None)
    for u, v in g.edges():
        if d[u][0] is not INF:
            assert abs(d[u][0] - d[v][0]) <= 1


def test_distances_from_limit():
    g = path_graph(range(1, 11))
    assert sorted(distances_from(g, 1, 3)) == [1, 2, 3, 4]


def test_bfs_tree_smallest_parent():
    g = Graph.from_edges([1, 2, 3, 4], [(1, 2), (1, 3), (2, 4), (3, 4)])
    parent = bfs_tree(g, 1)
    assert parent[4] == 2
    assert tree_edges_from_parents(parent) == {(1, 2), (1, 3), (2, 4)}


@given(st.integers(1, 40), st.integers(0, 10 ** 6))
def test_edgelist_roundtrip(n, seed):
    g = generate("tree", n, seed=seed)
    text = write_edgelist(g)
    h = read_edgelist(text)
    assert h.nodes == g.nodes and h.adjacency == g.adjacency
    lines = text.splitlines()
    assert lines[0] == f"{g.n} {g.m}"


def test_edgelist_plain_and_invalid(tmp_path):
    g = read_edgelist("3 2\n1 2\n2 3\n")
    assert g.nodes == (1, 2, 3) and g.m == 2
    f = tmp_path / "g.txt"
    f.write_text("3 2\n1 2\n2 3\n")
    assert read_edgelist(str(f)).m == 2
    for bad in ["3 2\n1 2\n", "2 1\n1 1\n", "2 1\n1 5\n"]:
        with pytest.raises((StructureError, ParameterError)):
            read_edgelist(bad)


def test_contract_whole_graph():
    g = path_graph([1, 2, 3, 4])
    cg = contract_to_cluster_graph(g, [{1, 2, 3, 4}])
    assert len(cg.clusters) == 1 and not any(cg.super_adjacency.values())


def test_contract_path_two_blocks():
    g = path_graph([1, 2, 3, 4])
    cg = contract_to_cluster_graph(g, [{1, 2}, {3, 4}])
    assert sum(len(v) for v in cg.super_adjacency.values()) == 2
    assert cg.crossing_edges() == {(2, 3)}


def test_contract_grid_tiles():
    g = generate("grid", 16, ids="sequential")
    tiles = [{1, 2, 5, 6}, {3, 4, 7, 8}, {9, 10, 13, 14}, {11, 12, 15, 16}]
    cg = contract_to_cluster_graph(g, tiles)
    crossing = {(u, v) for u, v in g.edges() if not any(u in t and v in t for t in tiles)}
    assert cg.crossing_edges() == crossing
    assert sum(len(v) for v in cg.super_adjacency.values()) == 2 * 4
    labels = [c.center for c in cg.clusters]
    assert max(cg.center_distance(a, b) for a in labels for b in labels) == 2


def test_contract_errors():
    g = path_graph([1, 2, 3, 4])
    with pytest.raises(StructureError):
        contract_to_cluster_graph(g, [{1, 2}, {2, 3}])
    with pytest.raises(StructureError):
        contract_to_cluster_graph(g, [{1, 3}])


@given(st.integers(4, 40), st.integers(0, 10 ** 6), st.integers(2, 6))
def test_contract_recovers_crossing_edges(n, seed, blocks):
    g = generate("tree", n, seed=seed)
    # blocks = subtrees hanging off a BFS layering are connected; use BFS balls from spread roots
    roots = sorted(g.nodes)[:blocks]
    d = bfs_distances(g, roots)
    parts = {}
    for v, (_, s) in d.items():
        parts.setdefault(s, set()).add(v)
    cg = contract_to_cluster_graph(g, list(parts.values()))
    owner = {v: s for s, block in parts.items() for v in block}
    crossing = {(u, v) for u, v in g.edges() if owner[u] != owner[v]}
    assert cg.crossing_edges() == crossing
    for a in cg.super_adjacency:
        for b in cg.super_adjacency[a]:
            assert a in cg.super_adjacency[b]


def test_random_bipartite():
    bip = random_bipartite(10, 20, 5, seed=3)
    assert bip.left == tuple(range(1, 11)) and bip.right == tuple(range(11, 31))
    assert all(len(set(bip.adj[u])) == 5 and set(bip.adj[u]) <= set(bip.right) for u in bip.left)
    with pytest.raises(ParameterError):
        random_bipartite(2, 3, 4, seed=0)


def test_from_nx_helper_and_relabel():
    g = from_nx(nx.path_graph(4))
    h = g.relabel({1: 10, 2: 20, 3: 30, 4: 40})
    assert h.has_edge(10, 20) and not h.has_edge(10, 30)
    assert FAMILIES == ("path", "cycle", "tree", "grid", "gnp", "regular")
    assert len(generate("gnp", 40, {"p": 0.01}, seed=2).components()) > 1
    assert Params(n=3).L == 2
