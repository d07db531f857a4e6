"""Collect sparse random bits at cluster centers.

A ruling set R over all of V with alpha = h' = gather_factor * k * h picks
centers; every node joins its nearest center (ties to the smaller ID), which
yields connected Voronoi cells.  A cell with no edge leaving it is isolated
(it is a whole component).  Every other cell upcasts the bits of its first k
S-nodes, ordered by (distance to center, ID), along the BFS tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..decomposition import Cluster
from ..engine import message_bits
from ..errors import ParameterError
from ..graph import Graph, bfs_distances
from ..params import Params
from ..randomness import SparseSource
from .ruling import RulingSet, ruling_set


@dataclass
class GatherResult:
    clusters: list
    ruling: RulingSet
    h_prime: int
    k: int
    rounds: int
    max_message_bits: int
    stages: dict = field(default_factory=dict)

    @property
    def radius_bound(self) -> int:
        return self.ruling.beta


def voronoi_cells(g: Graph, centers) -> tuple[dict, dict, dict]:
    """Nearest-center cells with BFS parents inside each cell.

    Returns (cell_of, dist, parent); nodes unreachable from every center are
    left out.
    """
    near = bfs_distances(g, centers)
    cell_of, dist, parent = {}, {}, {}
    for v, (d, c) in near.items():
        if c is None:
            continue
        cell_of[v], dist[v] = c, d
    adj = g.adjacency
    for v, c in cell_of.items():
        if dist[v] == 0:
            parent[v] = None
            continue
        parent[v] = min(u for u in adj[v] if cell_of.get(u) == c and dist[u] == dist[v] - 1)
    return cell_of, dist, parent


def gather_bits(g: Graph, rand: SparseSource, k: int, params: Params | None = None,
                collect_isolated: bool = False, simulate: bool = False) -> GatherResult:
    """Partition V into clusters whose centers hold k gathered random bits.

    Args:
        g: the graph (may be disconnected).
        rand: sparse source; its S must h-cover V.
        k: bits required per non-isolated cluster.
        params: constants ledger.
        collect_isolated: also gather (up to k) bits inside isolated clusters.
        simulate: run the ruling-set stage on the engine.

    Returns:
        A :class:`GatherResult`.  Cluster radii are at most h' * ceil(log2 n)
        whenever the ruling set meets that domination bound, and always at
        most (h' - 1) * B.
    """
    if not isinstance(rand, SparseSource):
        raise ParameterError("gather_bits needs a sparse source")
    if rand.h < 1 or k < 1:
        raise ParameterError("h and k must be >= 1")
    params = params or Params(n=g.n)
    h_prime = params.gather_factor * k * rand.h
    R = ruling_set(g, g.nodes, max(2, h_prime), params, simulate=simulate)
    cell_of, dist, parent = voronoi_cells(g, R.nodes)
    members: dict[int, set] = {c: set() for c in R.nodes}
    for v, c in cell_of.items():
        members[c].add(v)
    adj = g.adjacency
    clusters = []
    flood_rounds = max(dist.values(), default=0)
    upcast_rounds = 0
    for c in sorted(members):
        mem = members[c]
        isolated = all(cell_of[u] == c for v in mem for u in adj[v])
        radius = max(dist[v] for v in mem)
        edges = frozenset((min(v, p), max(v, p)) for v in mem if (p := parent[v]) is not None)
        bits, sources = (), ()
        if not isolated or collect_isolated:
            owned = sorted((v for v in mem if v in rand.S), key=lambda v: (dist[v], v))[:k]
            if not isolated and len(owned) < k:
                raise AssertionError(
                    f"non-isolated cluster {c} holds {len(owned)} S-nodes, needs {k}")
            sources = tuple(owned)
            bits = tuple(rand.handle(s).bit() for s in owned)
            if owned:
                upcast_rounds = max(upcast_rounds, radius + len(owned))
        clusters.append(Cluster(center=c, members=frozenset(mem), tree_edges=edges, radius=radius,
                                gathered_bits=bits, bit_sources=sources, isolated=isolated))
    # isolation test: one exchange round plus an OR convergecast
    iso_rounds = 1 + max((cl.radius for cl in clusters), default=0)
    max_id = max(g.nodes)
    bits = max(R.max_message_bits, message_bits((max_id, flood_rounds)),
               message_bits((max_id, 1)) if upcast_rounds else 0)
    stages = {"ruling_rounds": R.rounds, "flood_rounds": flood_rounds,
              "isolation_rounds": iso_rounds, "upcast_rounds": upcast_rounds}
    return GatherResult(clusters, R, h_prime, k, sum(stages.values()), bits, stages)
