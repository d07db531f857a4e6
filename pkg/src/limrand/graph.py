"""Graphs, generators, distances and cluster-graph contraction.

Nodes are identified by their integer IDs throughout; there is no separate
index space.  :class:`Graph` is immutable once built.
"""

from __future__ import annotations

import functools
import io
import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import networkx as nx

from .errors import ParameterError, StructureError


@functools.total_ordering
class _Infinity:
    """Distance to an unreachable node.  Compares above every integer."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self

    def __hash__(self):
        return hash("limrand.INF")

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


class Graph:
    """Immutable simple undirected graph keyed by node ID."""

    __slots__ = ("_adj", "_nodes", "_m")

    def __init__(self, adjacency: Mapping[int, Iterable[int]], *, validate: bool = True):
        adj = {int(v): tuple(sorted(set(nb))) for v, nb in adjacency.items()}
        if validate:
            for v, nb in adj.items():
                if v < 1:
                    raise StructureError(f"node id {v} is not positive")
                for u in nb:
                    if u == v:
                        raise StructureError(f"self-loop at {v}")
                    if u not in adj:
                        raise StructureError(f"neighbor {u} of {v} is not a node")
                    if v not in adj[u]:
                        raise StructureError(f"asymmetric adjacency {v}->{u}")
        self._adj = adj
        self._nodes = tuple(sorted(adj))
        self._m = sum(len(nb) for nb in adj.values()) // 2

    @classmethod
    def from_edges(cls, nodes: Iterable[int], edges: Iterable[tuple[int, int]]) -> "Graph":
        adj: dict[int, set[int]] = {int(v): set() for v in nodes}
        for u, v in edges:
            if u not in adj or v not in adj:
                raise StructureError(f"edge ({u}, {v}) touches an unknown node")
            if u == v:
                raise StructureError(f"self-loop at {u}")
            adj[u].add(v)
            adj[v].add(u)
        return cls(adj, validate=False)

    @property
    def nodes(self) -> tuple[int, ...]:
        return self._nodes

    @property
    def n(self) -> int:
        return len(self._nodes)

    @property
    def m(self) -> int:
        return self._m

    @property
    def adjacency(self) -> Mapping[int, tuple[int, ...]]:
        return self._adj

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        nb = self._adj.get(u)
        return nb is not None and v in nb

    def __contains__(self, v) -> bool:
        return v in self._adj

    def __len__(self) -> int:
        return len(self._nodes)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in self._nodes for v in self._adj[u] if u < v]

    def subgraph(self, nodes: Iterable[int]) -> "Graph":
        keep = set(nodes)
        return Graph({v: [u for u in self._adj[v] if u in keep] for v in keep}, validate=False)

    def relabel(self, mapping: Mapping[int, int]) -> "Graph":
        return Graph({mapping[v]: [mapping[u] for u in nb] for v, nb in self._adj.items()})

    def components(self) -> list[frozenset[int]]:
        seen: set[int] = set()
        out = []
        for s in self._nodes:
            if s in seen:
                continue
            comp = set(distances_from(self, s))
            seen |= comp
            out.append(frozenset(comp))
        return out

    def to_networkx(self) -> nx.Graph:
        h = nx.Graph()
        h.add_nodes_from(self._nodes)
        h.add_edges_from(self.edges())
        return h

    def __eq__(self, other):
        return isinstance(other, Graph) and self._adj == other._adj

    def __hash__(self):
        return hash((self._nodes, self._m))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def distances_from(g: Graph, source: int, limit: int | None = None) -> dict[int, int]:
    """Hop distances from ``source``; nodes farther than ``limit`` are omitted."""
    dist = {source: 0}
    frontier = [source]
    d = 0
    adj = g.adjacency
    while frontier and (limit is None or d < limit):
        d += 1
        nxt = []
        for v in frontier:
            for u in adj[v]:
                if u not in dist:
                    dist[u] = d
                    nxt.append(u)
        frontier = nxt
    return dist


def bfs_distances(g: Graph, sources: Iterable[int]) -> dict[int, tuple]:
    """Multi-source BFS.

    Returns ``node -> (distance, nearest_source)``.  Ties between equally close
    sources go to the smallest source ID.  Unreachable nodes map to
    ``(INF, None)``.
    """
    srcs = sorted(set(sources))
    if not srcs:
        raise ParameterError("bfs_distances needs at least one source")
    for s in srcs:
        if s not in g:
            raise ParameterError(f"source {s} is not in the graph")
    adj = g.adjacency
    best: dict[int, tuple[int, int]] = {s: (0, s) for s in srcs}
    frontier = srcs
    d = 0
    while frontier:
        d += 1
        claims: dict[int, int] = {}
        for v in frontier:
            src = best[v][1]
            for u in adj[v]:
                if u in best:
                    continue
                prev = claims.get(u)
                if prev is None or src < prev:
                    claims[u] = src
        for u, src in claims.items():
            best[u] = (d, src)
        frontier = list(claims)
    out = {v: (INF, None) for v in g.nodes}
    out.update(best)
    return out


def bfs_tree(g: Graph, root: int, allowed: Iterable[int] | None = None) -> dict[int, int | None]:
    """BFS parent pointers from ``root`` inside ``allowed`` (default: all nodes).

    Among equally short parents the smallest ID wins, which makes trees
    reproducible.
    """
    keep = None if allowed is None else set(allowed)
    parent: dict[int, int | None] = {root: None}
    frontier = [root]
    adj = g.adjacency
    while frontier:
        claims: dict[int, int] = {}
        for v in frontier:
            for u in adj[v]:
                if u in parent or (keep is not None and u not in keep):
                    continue
                if u not in claims or v < claims[u]:
                    claims[u] = v
        parent.update(claims)
        frontier = sorted(claims)
    return parent


def tree_edges_from_parents(parent: Mapping[int, int | None]) -> frozenset[tuple[int, int]]:
    return frozenset((min(v, p), max(v, p)) for v, p in parent.items() if p is not None)


def eccentricity(g: Graph, v: int) -> int:
    return max(distances_from(g, v).values())


def diameter(g: Graph) -> int:
    """Largest finite eccentricity (per component)."""
    return max((eccentricity(g, v) for v in g.nodes), default=0)


# ---------------------------------------------------------------------------
# generators

FAMILIES = ("path", "cycle", "tree", "grid", "gnp", "regular")


def assign_ids(n: int, seed: int, id_c: int = 3, ids: str = "random") -> list[int]:
    """IDs for positions 0..n-1: a random injection into {1..n**id_c} or 1..n."""
    if ids == "sequential":
        return list(range(1, n + 1))
    if ids != "random":
        raise ParameterError(f"unknown id scheme {ids!r}")
    if id_c < 1:
        raise ParameterError("id_c must be >= 1")
    rng = random.Random(f"{seed}:ids")
    return rng.sample(range(1, n ** id_c + 1), n)


def generate(family: str, n: int, params: Mapping | None = None, seed: int = 0,
             *, id_c: int = 3, ids: str = "random") -> Graph:
    """Build a graph from one of :data:`FAMILIES`.

    Family parameters: ``grid`` takes ``rows`` (default: square), ``gnp`` takes
    ``p``, ``regular`` takes ``d``.  Output is a deterministic function of
    ``(family, n, params, seed)``.
    """
    params = dict(params or {})
    if n < 1:
        raise ParameterError("n must be >= 1")
    if family == "path":
        edges = [(i, i + 1) for i in range(n - 1)]
    elif family == "cycle":
        if n < 3:
            raise ParameterError("a cycle needs n >= 3")
        edges = [(i, (i + 1) % n) for i in range(n)]
    elif family == "tree":
        if n <= 2:
            edges = [(0, 1)] if n == 2 else []
        else:
            rng = random.Random(f"{seed}:tree")
            seq = [rng.randrange(n) for _ in range(n - 2)]
            edges = list(nx.from_prufer_sequence(seq).edges())
    elif family == "grid":
        rows = params.get("rows")
        if rows is None:
            rows = math.isqrt(n)
        rows = int(rows)
        if rows < 1 or n % rows:
            raise ParameterError(f"grid rows={rows} does not divide n={n}")
        cols = n // rows
        edges = []
        for r in range(rows):
            for c in range(cols):
                i = r * cols + c
                if c + 1 < cols:
                    edges.append((i, i + 1))
                if r + 1 < rows:
                    edges.append((i, i + cols))
    elif family == "gnp":
        if "p" not in params:
            raise ParameterError("gnp needs parameter p")
        p = float(params["p"])
        if not 0.0 <= p <= 1.0:
            raise ParameterError(f"gnp probability {p} outside [0, 1]")
        edges = list(nx.fast_gnp_random_graph(n, p, seed=seed).edges())
    elif family == "regular":
        d = int(params.get("d", 3))
        if d < 0 or d >= n or (n * d) % 2:
            raise ParameterError(f"no {d}-regular graph on {n} nodes")
        edges = list(nx.random_regular_graph(d, n, seed=seed).edges())
    else:
        raise ParameterError(f"unknown family {family!r}; choose from {FAMILIES}")
    label = assign_ids(n, seed, id_c, ids)
    return Graph.from_edges(label, [(label[u], label[v]) for u, v in edges])


# ---------------------------------------------------------------------------
# edge-list text format


def write_edgelist(g: Graph, fh=None) -> str:
    """Serialize as ``n m`` + ``u v`` lines over 1-based positions.

    When the node IDs are not exactly 1..n, a ``# ids:`` comment maps
    positions to IDs so that the round trip is exact.
    """
    pos = {v: i + 1 for i, v in enumerate(g.nodes)}
    lines = [f"{g.n} {g.m}"]
    if list(g.nodes) != list(range(1, g.n + 1)):
        lines.append("# ids: " + " ".join(map(str, g.nodes)))
    for u, v in sorted((pos[a], pos[b]) for a, b in g.edges()):
        lines.append(f"{u} {v}")
    text = "\n".join(lines) + "\n"
    if fh is not None:
        fh.write(text)
    return text


def read_edgelist(source) -> Graph:
    """Parse the edge-list format; ``source`` is a path, file object or string."""
    if hasattr(source, "read"):
        text = source.read()
    elif isinstance(source, str) and "\n" in source:
        text = source
    else:
        with open(source) as fh:
            text = fh.read()
    ids = None
    rows = []
    for raw in io.StringIO(text):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("ids:"):
                ids = [int(t) for t in body[4:].split()]
            continue
        rows.append(line.split())
    if not rows or len(rows[0]) != 2:
        raise StructureError("edge list must start with 'n m'")
    n, m = map(int, rows[0])
    edges = rows[1:]
    if len(edges) != m:
        raise StructureError(f"header promises {m} edges, found {len(edges)}")
    if ids is None:
        ids = list(range(1, n + 1))
    if len(ids) != n or len(set(ids)) != n:
        raise StructureError("ids line must list n distinct ids")
    adj: dict[int, set[int]] = {v: set() for v in ids}
    for e in edges:
        if len(e) != 2:
            raise StructureError(f"bad edge line {' '.join(e)!r}")
        u, v = int(e[0]), int(e[1])
        if not (1 <= u <= n and 1 <= v <= n):
            raise StructureError(f"edge ({u}, {v}) out of range 1..{n}")
        if u == v:
            raise StructureError(f"self-loop at {u}")
        a, b = ids[u - 1], ids[v - 1]
        if b in adj[a]:
            raise StructureError(f"duplicate edge ({u}, {v})")
        adj[a].add(b)
        adj[b].add(a)
    return Graph(adj)


# ---------------------------------------------------------------------------
# cluster graphs


@dataclass
class ClusterGraph:
    """Clusters of a base graph contracted to super-nodes labelled by their centers."""

    clusters: list
    base: Graph
    super_graph: Graph
    member_of: dict[int, int]
    _dist_cache: dict = field(default_factory=dict, repr=False)

    @property
    def super_adjacency(self) -> Mapping[int, tuple[int, ...]]:
        return self.super_graph.adjacency

    def cluster(self, label: int):
        return self._by_label[label]

    @functools.cached_property
    def _by_label(self):
        return {c.center: c for c in self.clusters}

    def center_distance(self, a: int, b: int):
        if a not in self._dist_cache:
            self._dist_cache[a] = distances_from(self.super_graph, a)
        return self._dist_cache[a].get(b, INF)

    def crossing_edges(self) -> set[tuple[int, int]]:
        """Base edges whose endpoints lie in different clusters (expansion of super-edges)."""
        out = set()
        for u, v in self.base.edges():
            cu, cv = self.member_of.get(u), self.member_of.get(v)
            if cu is not None and cv is not None and cu != cv:
                out.add((u, v))
        return out

    def connecting_edge(self, a: int, b: int) -> tuple[int, int]:
        """Smallest base edge joining clusters ``a`` and ``b``."""
        best = None
        for u in sorted(self.cluster(a).members):
            for v in self.base.neighbors(u):
                if self.member_of.get(v) == b:
                    cand = (u, v)
                    if best is None or cand < best:
                        best = cand
        if best is None:
            raise StructureError(f"clusters {a} and {b} are not adjacent")
        return best


def contract_to_cluster_graph(g: Graph, clustering: Sequence) -> ClusterGraph:
    """Contract disjoint connected blocks into a cluster graph.

    ``clustering`` holds node sets or :class:`~limrand.decomposition.Cluster`
    records.  Bare node sets become clusters centred at their smallest ID with a
    BFS spanning tree.
    """
    from .decomposition import Cluster

    clusters = []
    member_of: dict[int, int] = {}
    for block in clustering:
        if isinstance(block, Cluster):
            c = block
        else:
            members = frozenset(block)
            if not members:
                raise StructureError("empty block")
            center = min(members)
            parent = bfs_tree(g, center, members) if center in g else {}
            c = Cluster(center=center, members=members,
                        tree_edges=tree_edges_from_parents(parent))
        for v in c.members:
            if v not in g:
                raise StructureError(f"block member {v} is not a graph node")
            if v in member_of:
                raise StructureError(f"node {v} lies in two blocks")
            member_of[v] = c.center
        if len(bfs_tree(g, next(iter(c.members)), c.members)) != len(c.members):
            raise StructureError(f"block centred at {c.center} is not connected")
        clusters.append(c)
    labels = [c.center for c in clusters]
    if len(set(labels)) != len(labels):
        raise StructureError("cluster labels (centers) must be distinct")
    sadj: dict[int, set[int]] = {c.center: set() for c in clusters}
    for u, v in g.edges():
        a, b = member_of.get(u), member_of.get(v)
        if a is not None and b is not None and a != b:
            sadj[a].add(b)
            sadj[b].add(a)
    return ClusterGraph(clusters=clusters, base=g, super_graph=Graph(sadj, validate=False),
                        member_of=member_of)


# ---------------------------------------------------------------------------
# bipartite instances for splitting


@dataclass(frozen=True)
class BipartiteGraph:
    left: tuple[int, ...]
    right: tuple[int, ...]
    adj: Mapping[int, tuple[int, ...]]

    @property
    def n(self) -> int:
        return len(self.left) + len(self.right)

    def degree(self, u: int) -> int:
        return len(self.adj[u])


def random_bipartite(n_left: int, n_right: int, degree: int, seed: int) -> BipartiteGraph:
    """Every left node picks ``degree`` distinct right neighbors uniformly.

    Left IDs are 1..n_left and right IDs n_left+1..n_left+n_right.
    """
    if degree > n_right:
        raise ParameterError("degree exceeds the right side")
    rng = random.Random(f"{seed}:bip")
    left = tuple(range(1, n_left + 1))
    right = tuple(range(n_left + 1, n_left + n_right + 1))
    adj = {u: tuple(sorted(rng.sample(right, degree))) for u in left}
    return BipartiteGraph(left, right, adj)
