"""Shattering: a short randomized carve, then a deterministic finish.

1. T phases of ball carving on G; V-bar is what stays uncolored.
2. Statistics: (2t+1)-separated subsets of V-bar, t being the round count of step 1.
3. A (2t+1, (2t) * B)-ruling set S of V-bar, computed in all of G.
4. Each V-bar node joins its nearest S node; trees run through G and may use
   already-clustered nodes as Steiner nodes.
5. The cluster graph over S (adjacent when V-bar members are adjacent) is
   decomposed by sequential region growing; its colors start at T + 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..decomposition import Cluster, NetworkDecomposition
from ..errors import ParameterError
from ..graph import Graph, distances_from
from ..params import Params
from .ballcarving import elkin_neiman
from .gather import voronoi_cells
from .ruling import ruling_set


@dataclass
class ShatterReport:
    T: int
    t: int
    vbar_size: int
    s_size: int
    separated_size: int
    K: int
    fallback_clusters: int
    fallback_colors: int
    step_of: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"T": self.T, "t": self.t, "vbar_size": self.vbar_size, "s_size": self.s_size,
                "separated_size": self.separated_size, "K": self.K,
                "fallback_clusters": self.fallback_clusters,
                "fallback_colors": self.fallback_colors}


def separated_subset(g: Graph, W, d: int) -> frozenset:
    """Greedy maximal d-separated subset of W, scanning W by increasing ID."""
    if d < 1:
        raise ParameterError("d must be >= 1")
    chosen: list[int] = []
    blocked: set[int] = set()
    for w in sorted(set(W)):
        if w in blocked:
            continue
        chosen.append(w)
        blocked.update(distances_from(g, w, d - 1))
    return frozenset(chosen)


def region_growing(adj: dict, growth: float = 2.0) -> list[list[tuple[int, list[int], dict]]]:
    """Sequential ball growing on a small graph.

    Each color round scans the remaining nodes by ID; from the smallest one
    it grows a ball while |B(r+1)| > growth * |B(r)|, carves B(r) and defers
    the boundary B(r+1) minus B(r) to the next round.  Carved balls of one
    round are pairwise non-adjacent.

    Returns:
        Per color round, a list of (root, ball nodes, BFS parents inside the ball).
    """
    remaining = set(adj)
    rounds = []
    while remaining:
        pool = set(remaining)
        carved_round = []
        while pool:
            root = min(pool)
            parent = {root: None}
            layers = [[root]]
            ball = {root}
            while True:
                nxt = []
                for v in layers[-1]:
                    for u in sorted(adj[v]):
                        if u in pool and u not in parent:
                            parent[u] = v
                            nxt.append(u)
                if len(ball) + len(nxt) > growth * len(ball):
                    layers.append(nxt)
                    ball.update(nxt)
                    continue
                boundary = nxt
                break
            carved_round.append((root, sorted(ball), {v: parent[v] for v in ball}))
            pool -= ball
            pool -= set(boundary)
            remaining -= ball
        rounds.append(carved_round)
    return rounds


def shatter_decompose(g: Graph, T: int, rand, params: Params | None = None,
                      simulate: bool = False) -> NetworkDecomposition:
    """Randomized T-phase carve plus deterministic cleanup of the residue.

    Args:
        g: the graph.
        T: number of randomized phases (>= 1).
        rand: randomness for step 1.
        params: constants ledger.
        simulate: run the ruling-set stage on the engine.

    Returns:
        A decomposition (always complete) with a :class:`ShatterReport` in
        ``report``.
    """
    if T < 1:
        raise ParameterError("T must be >= 1")
    params = params or Params(n=g.n)
    step1 = elkin_neiman(g, rand, params, phases=T)
    t = T * (params.geo_cap + 1)
    vbar = step1.uncolored
    clusters = list(step1.clusters)
    step_of = {c.center: 1 for c in clusters}
    B = params.id_bits
    beta = 2 * t * B
    K = fallback_colors = separated = 0
    rounds = step1.rounds
    fallback = []
    if vbar:
        separated = len(separated_subset(g, vbar, 2 * t + 1))
        R = ruling_set(g, vbar, 2 * t + 1, params, simulate=simulate)
        rounds += R.rounds
        S = sorted(R.nodes)
        K = len(S)
        cell_of, dist, parent = voronoi_cells(g, S)
        cell_members: dict[int, set[int]] = {s: set() for s in S}
        for v in vbar:
            cell_members[cell_of[v]].add(v)
        cell_tree: dict[int, set] = {}
        cell_nodes: dict[int, set] = {}
        for s in S:
            edges, nodes = set(), {s}
            for v in cell_members[s]:
                while parent[v] is not None and v not in nodes:
                    nodes.add(v)
                    p = parent[v]
                    edges.add((min(v, p), max(v, p)))
                    v = p
            cell_tree[s], cell_nodes[s] = edges, nodes
        sadj: dict[int, set[int]] = {s: set() for s in S}
        link: dict[tuple[int, int], tuple[int, int]] = {}
        for v in sorted(vbar):
            for u in g.neighbors(v):
                if u in vbar and cell_of[u] != cell_of[v]:
                    a, b = cell_of[v], cell_of[u]
                    sadj[a].add(b)
                    link.setdefault((a, b), (v, u))
        plan = region_growing(sadj, params.fallback_growth)
        fallback_colors = len(plan)
        for j, balls in enumerate(plan, start=1):
            for root, ball, bparent in balls:
                members, edges, nodes = set(), set(), set()
                for s in ball:
                    members |= cell_members[s]
                    edges |= cell_tree[s]
                    nodes |= cell_nodes[s]
                    p = bparent[s]
                    if p is not None:
                        a, b = link[(s, p)]
                        edges.add((min(a, b), max(a, b)))
                fallback.append(Cluster(center=root, members=frozenset(members),
                                        tree_edges=frozenset(edges),
                                        steiner=frozenset(nodes - members), color=T + j))
                step_of[root] = 5
        radius_fallback = max(0, math.ceil(math.log(max(K, 1), params.fallback_growth)))
        rounds += beta + sum(1 for _ in plan) * (2 * radius_fallback + 1) * (2 * beta + 1)
    else:
        radius_fallback = 0
    clusters += fallback
    growth = params.fallback_growth
    color_rounds_bound = 1 + math.ceil(math.log(max(K, 1)) / math.log(growth / (growth - 1))) if growth > 1 else K
    diam_bound = max(step1.diameter_bound,
                     2 * (beta + radius_fallback * (2 * beta + 1)) if vbar else 0)
    report = ShatterReport(T=T, t=t, vbar_size=len(vbar), s_size=K, separated_size=separated, K=K,
                           fallback_clusters=len(fallback), fallback_colors=fallback_colors,
                           step_of=step_of)
    return NetworkDecomposition(
        clusters=clusters, diameter_bound=diam_bound,
        color_bound=T + (color_rounds_bound if vbar else 0),
        congestion=1, failed=False, rounds=rounds,
        max_message_bits=step1.max_message_bits, random_bits=step1.random_bits,
        stages={"step1": step1.stages, **report.to_dict()}, constants=params.to_dict(),
        report=report)
