"""Ball carving with exponential shifts on a cluster graph.

Each phase, every live cluster v draws r_v ~ Geometric(1/2) capped at
geo_cap.  Clusters learn the two largest measures r_v - dist(v, .) over
distinct v among live clusters (only non-negative measures propagate).  A
cluster whose top two differ by more than 1 joins the top center and gets
the phase's color.  Same-phase clusters with different centers are never
adjacent, and every cluster on a shortest path to its center has the same
center, so merged clusters are connected.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Mapping

from ..decomposition import Cluster, NetworkDecomposition
from ..engine import NO_MESSAGE, NodeProgram, Step, message_bits, run_sync
from ..graph import ClusterGraph, Graph, contract_to_cluster_graph
from ..params import Params

NEG_INF = -math.inf


def top2_flood(adj: Mapping[int, tuple], values: Mapping[int, int]) -> tuple[dict, dict]:
    """Exact top-2 measures ``values[c] - dist(c, v)`` over distinct centers.

    Args:
        adj: adjacency of the subgraph the flood runs in.
        values: initial value per center; only measures >= 0 count.

    Returns:
        (entries, parent): entries[v] is a list of up to two (measure, center)
        pairs ordered by measure desc then center asc; parent[v] is the
        neighbor through which v's top entry arrived (None at the center).
    """
    entries: dict[int, list] = {}
    parent: dict[int, int | None] = {}
    heap = [(-val, c, c, -1) for c, val in values.items() if val >= 0]
    heapq.heapify(heap)
    while heap:
        negval, c, v, src = heapq.heappop(heap)
        have = entries.setdefault(v, [])
        if len(have) == 2 or (have and have[0][1] == c):
            continue
        have.append((-negval, c))
        if len(have) == 1:
            parent[v] = None if src < 0 else src
        nv = -negval - 1
        if nv >= 0:
            for u in adj[v]:
                eu = entries.get(u)
                if eu is None or (len(eu) < 2 and eu[0][1] != c):
                    heapq.heappush(heap, (-nv, c, u, v))
    return entries, parent


class Top2FloodProgram(NodeProgram):
    """Distributed form of :func:`top2_flood`.

    Input: the node's own initial value or None.  Each node forwards its top
    two (measure - 1, center) pairs whenever they change and halts at round
    ``horizon`` (max value + 1), after which no message can be in flight.
    """

    name = "top2-flood"

    def __init__(self, horizon: int):
        self.horizon = max(1, horizon)

    def init(self, ctx):
        val = ctx.input
        top = [(val, ctx.node)] if val is not None and val >= 0 else []
        st = {"top": top, "parent": None}
        msg = self._msg(top)
        return Step(state=st, broadcast=msg if msg else NO_MESSAGE, wake=self.horizon)

    @staticmethod
    def _msg(top):
        return tuple((m - 1, c) for m, c in top if m - 1 >= 0)

    def step(self, ctx, st, inbox, rnd):
        cands = {}
        for m, c in st["top"]:
            cands[c] = (m, st["parent"] if st["top"][0][1] == c else None)
        for u in sorted(inbox):
            for m, c in inbox[u]:
                if c not in cands or m > cands[c][0]:
                    cands[c] = (m, u)
        ranked = sorted(cands.items(), key=lambda kv: (-kv[1][0], kv[0]))[:2]
        top = [(m, c) for c, (m, _) in ranked]
        if ranked:
            st["parent"] = ranked[0][1][1]
        changed = top != st["top"]
        st["top"] = top
        msg = self._msg(top) if changed else ()
        if rnd >= self.horizon:
            return Step(state=st, halt=True, output=(tuple(top), st["parent"]))
        return Step(state=st, broadcast=msg if msg else NO_MESSAGE)


def flood_via_engine(g: Graph, values: Mapping[int, int]):
    """Run :class:`Top2FloodProgram`; returns (entries, parent, trace)."""
    horizon = max(values.values(), default=0) + 1
    trace = run_sync(Top2FloodProgram(horizon), g, dict(values))
    entries = {v: list(out[0]) for v, out in trace.outputs.items() if out[0]}
    parent = {v: out[1] for v, out in trace.outputs.items() if out[0]}
    return entries, parent, trace


@dataclass
class CarvingPhase:
    """Transcript of one ball-carving phase."""

    phase: int
    live: frozenset
    radii: dict
    entries: dict
    colored: dict           # cluster label -> center label
    parent: dict = field(default_factory=dict)


def decompose_cluster_graph(cg: ClusterGraph, rand, params: Params, phases: int | None = None,
                            cluster_radius: int | None = None, record: bool = False,
                            cluster_rounds: bool = True) -> NetworkDecomposition:
    """Color every cluster of ``cg`` by ball carving.

    Args:
        cg: the cluster graph; cluster labels are center IDs.
        rand: source whose handle for a center label supplies that cluster's bits.
        params: constants ledger (n, phases_factor, geo_cap_factor).
        phases: override of the phase count (default 10 * ceil(log2 n)).
        cluster_radius: declared bound on input cluster radii (default: measured).
        record: keep per-phase transcripts.

    Returns:
        A decomposition whose clusters are unions of input clusters; ``failed``
        marks leftovers after the last phase.  Isolated input clusters get
        color 1 without drawing bits.
    """
    phases = params.phases if phases is None else phases
    cap = params.geo_cap
    rho = cluster_radius if cluster_radius is not None else max((c.radius or 0 for c in cg.clusters), default=0)
    sadj = cg.super_adjacency
    start_bits = rand.total_consumed
    handles = {}
    center_of: dict[int, int] = {}
    color_of: dict[int, int] = {}
    sparent: dict[int, int | None] = {}
    live = set()
    for c in cg.clusters:
        if not sadj[c.center]:
            center_of[c.center], color_of[c.center], sparent[c.center] = c.center, 1, None
        else:
            live.add(c.center)
    transcripts = []
    used = 0
    for ph in range(1, phases + 1):
        if not live:
            break
        used = ph
        radii = {}
        for v in sorted(live):
            h = handles.get(v)
            if h is None:
                h = handles[v] = rand.handle(v)
            radii[v] = h.geometric(cap).value
        ladj = {v: tuple(u for u in sadj[v] if u in live) for v in live}
        entries, parent = top2_flood(ladj, radii)
        colored = {}
        for v in sorted(live):
            top = entries.get(v, [])
            if not top:
                continue
            m1 = top[0][0]
            m2 = top[1][0] if len(top) > 1 else NEG_INF
            if m1 - m2 > 1:
                colored[v] = top[0][1]
        for v, c in colored.items():
            center_of[v], color_of[v], sparent[v] = c, ph, parent[v]
        if record:
            transcripts.append(CarvingPhase(ph, frozenset(live), radii, entries, dict(colored),
                                            {v: parent[v] for v in colored}))
        live -= set(colored)

    groups: dict[tuple[int, int], list[int]] = {}
    for v, c in center_of.items():
        groups.setdefault((color_of[v], c), []).append(v)
    out = []
    for (col, c), labels in sorted(groups.items()):
        members, edges = set(), set()
        for lab in labels:
            cl = cg.cluster(lab)
            members |= cl.members
            edges |= cl.tree_edges
            p = sparent[lab]
            if p is not None:
                a, b = cg.connecting_edge(lab, p)
                edges.add((min(a, b), max(a, b)))
        out.append(Cluster(center=c, members=frozenset(members), tree_edges=frozenset(edges),
                           radius=None, color=col, isolated=len(labels) == 1 and not sadj[c]))
    uncolored = frozenset(v for lab in live for v in cg.cluster(lab).members)
    base_per_round = 2 * rho + 1 if cluster_rounds else 1
    max_id = max(cg.member_of, default=1)
    return NetworkDecomposition(
        clusters=out,
        diameter_bound=2 * (cap * (2 * rho + 1) + rho),
        color_bound=max(1, phases),
        congestion=1,
        failed=bool(live),
        uncolored=uncolored,
        rounds=used * (cap + 1) * base_per_round,
        max_message_bits=message_bits(((cap, max_id), (cap, max_id))) if used else 0,
        random_bits=rand.total_consumed - start_bits,
        stages={"phases_used": used, "phases": phases, "cap": cap, "cluster_radius": rho},
        transcripts=transcripts,
    )


def elkin_neiman(g: Graph, rand, params: Params, phases: int | None = None,
                 record: bool = False) -> NetworkDecomposition:
    """Ball carving directly on G (every node its own cluster)."""
    cg = singleton_cluster_graph(g)
    nd = decompose_cluster_graph(cg, rand, params, phases=phases, cluster_radius=0, record=record)
    nd.constants = params.to_dict()
    return nd


def singleton_cluster_graph(g: Graph) -> ClusterGraph:
    clusters = [Cluster(center=v, members=frozenset((v,)), radius=0) for v in g.nodes]
    return ClusterGraph(clusters=clusters, base=g, super_graph=g,
                        member_of={v: v for v in g.nodes})


__all__ = ["top2_flood", "Top2FloodProgram", "flood_via_engine", "decompose_cluster_graph",
           "elkin_neiman", "singleton_cluster_graph", "contract_to_cluster_graph", "CarvingPhase"]
