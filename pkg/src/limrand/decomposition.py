"""Cluster and network-decomposition records plus JSON IO."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from typing import Any

from .graph import Graph, bfs_tree, tree_edges_from_parents


@dataclass(frozen=True)
class Cluster:
    """A connected cluster with a spanning tree rooted at its center.

    ``tree_edges`` may touch Steiner nodes (tree nodes that are not members);
    those are listed in ``steiner``.
    """

    center: int
    members: frozenset
    tree_edges: frozenset = frozenset()
    radius: int | None = None
    gathered_bits: tuple = ()
    bit_sources: tuple = ()
    isolated: bool = False
    steiner: frozenset = frozenset()
    color: int | None = None

    @property
    def id(self) -> int:
        return self.center

    def tree_nodes(self) -> set[int]:
        nodes = set(self.members)
        for u, v in self.tree_edges:
            nodes.add(u)
            nodes.add(v)
        return nodes

    def with_color(self, color: int) -> "Cluster":
        return dataclasses.replace(self, color=color)

    def to_dict(self) -> dict:
        return {
            "id": self.center,
            "center": self.center,
            "members": sorted(self.members),
            "tree_edges": sorted([min(e), max(e)] for e in self.tree_edges),
            "steiner": sorted(self.steiner),
            "radius": self.radius,
            "color": self.color,
            "isolated": self.isolated,
            "gathered_bits": len(self.gathered_bits),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Cluster":
        return cls(center=int(d["center"]), members=frozenset(int(v) for v in d["members"]),
                   tree_edges=frozenset((int(a), int(b)) for a, b in d.get("tree_edges", [])),
                   radius=d.get("radius"), isolated=bool(d.get("isolated", False)),
                   steiner=frozenset(int(v) for v in d.get("steiner", [])), color=d.get("color"))


def bfs_cluster(g: Graph, center: int, members, color: int | None = None, **kw) -> Cluster:
    """Cluster over ``members`` with a BFS tree inside the induced subgraph."""
    members = frozenset(members)
    parent = bfs_tree(g, center, members)
    radius = _depth_max(parent)
    return Cluster(center=center, members=members, tree_edges=tree_edges_from_parents(parent),
                   radius=radius, color=color, **kw)


def _depth_max(parent) -> int:
    depth: dict[int, int] = {}

    def d(v):
        if v not in depth:
            chain = []
            while v not in depth and parent[v] is not None:
                chain.append(v)
                v = parent[v]
            base = depth.get(v, 0)
            depth.setdefault(v, base)
            for i, u in enumerate(reversed(chain)):
                depth[u] = base + i + 1
        return depth[v]

    return max((d(v) for v in parent), default=0)


@dataclass
class NetworkDecomposition:
    """Colored clusters with the bounds their producer claims.

    ``failed`` is True when the producer could not cluster every node;
    ``uncolored`` then lists the leftovers.  Success is decided by the
    verifier, never by this flag alone.
    """

    clusters: list
    diameter_bound: int
    color_bound: int
    congestion: int = 1
    failed: bool = False
    uncolored: frozenset = frozenset()
    rounds: int = 0
    max_message_bits: int = 0
    random_bits: int = 0
    stages: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)
    transcripts: list = field(default_factory=list)
    report: Any = None

    @property
    def color(self) -> dict[int, int | None]:
        return {c.center: c.color for c in self.clusters}

    def colors_used(self) -> int:
        return len({c.color for c in self.clusters if c.color is not None})

    def node_cluster(self) -> dict[int, int]:
        out = {}
        for c in self.clusters:
            for v in c.members:
                out[v] = c.center
        return out

    def to_dict(self) -> dict:
        return {
            "clusters": [c.to_dict() for c in sorted(self.clusters, key=lambda c: c.center)],
            "diameter_bound": self.diameter_bound,
            "color_bound": self.color_bound,
            "congestion": self.congestion,
            "failed": self.failed,
            "uncolored": sorted(self.uncolored),
            "rounds": self.rounds,
            "max_message_bits": self.max_message_bits,
            "random_bits": self.random_bits,
            "stages": self.stages,
            "constants": self.constants,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, default=_jsonable)

    @classmethod
    def from_dict(cls, d: dict) -> "NetworkDecomposition":
        return cls(clusters=[Cluster.from_dict(c) for c in d["clusters"]],
                   diameter_bound=int(d["diameter_bound"]), color_bound=int(d["color_bound"]),
                   congestion=int(d.get("congestion", 1)), failed=bool(d.get("failed", False)),
                   uncolored=frozenset(d.get("uncolored", [])), rounds=int(d.get("rounds", 0)),
                   max_message_bits=int(d.get("max_message_bits", 0)),
                   random_bits=int(d.get("random_bits", 0)), stages=d.get("stages", {}),
                   constants=d.get("constants", {}))


def _jsonable(x):
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    return repr(x)
