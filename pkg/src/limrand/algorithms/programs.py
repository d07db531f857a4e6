"""Small node programs and families used for derandomization experiments."""

from __future__ import annotations

import itertools
from typing import Mapping

from ..engine import NodeProgram, Step
from ..graph import Graph

EDGE_COLOR_BITS = 4


class HaltWithId(NodeProgram):
    """Every node outputs its own ID in round 0; uses no randomness."""

    name = "halt-with-id"

    def init(self, ctx):
        return Step(halt=True, output=ctx.node)

    def step(self, ctx, state, inbox, rnd):
        return Step(halt=True, output=ctx.node)


class FloodMin(NodeProgram):
    """Deterministic flooding of the minimum ID; runs ``ctx.params.n`` rounds."""

    name = "flood-min"

    def init(self, ctx):
        horizon = ctx.params.n if ctx.params is not None else 1
        if horizon <= 1 or not ctx.neighbors:
            return Step(halt=True, output=ctx.node)
        return Step(state=(ctx.node, horizon), broadcast=ctx.node, wake=1)

    def step(self, ctx, state, inbox, rnd):
        best, horizon = state
        new = min([best, *inbox.values()])
        if rnd >= horizon - 1:
            return Step(halt=True, output=new)
        if new < best:
            return Step(state=(new, horizon), broadcast=new, wake=rnd + 1)
        return Step(state=(new, horizon), wake=rnd + 1)


class RandomEdgeColoring(NodeProgram):
    """One-round 2-coloring attempt on graphs whose components are single edges.

    Each node reads a 4-bit value r and sends it to its neighbor; the larger r
    takes color 1 and the smaller color 0.  A tie leaves both nodes without a
    color (output None).  Isolated nodes output color 0 at once.
    """

    name = "random-edge-coloring"

    def init(self, ctx):
        if not ctx.neighbors:
            return Step(halt=True, output=0)
        r = ctx.rand.uint(EDGE_COLOR_BITS)
        return Step(state=r, broadcast=r)

    def step(self, ctx, state, inbox, rnd):
        other = next(iter(inbox.values()))
        if other == state:
            return Step(halt=True, output=None)
        return Step(halt=True, output=int(state > other))


def matching_family(max_nodes: int = 3, id_range: int = 9) -> list[Graph]:
    """Every graph on 1..max_nodes nodes with IDs from {1..id_range} whose edges form a matching.

    For the defaults this is 9 + 36 * 2 + 84 * 4 = 417 labeled graphs, which
    are exactly the labeled graphs on at most 3 nodes with maximum degree 1.
    """
    out = []
    for size in range(1, max_nodes + 1):
        for nodes in itertools.combinations(range(1, id_range + 1), size):
            pairs = list(itertools.combinations(nodes, 2))
            for r in range(size // 2 + 1):
                for edges in itertools.combinations(pairs, r):
                    used = [v for e in edges for v in e]
                    if len(used) == len(set(used)):
                        out.append(Graph.from_edges(nodes, edges))
    return out


def proper_two_coloring(g: Graph, outputs: Mapping[int, object]) -> bool:
    """Every node has a color in {0, 1} and the endpoints of each edge differ."""
    if any(outputs.get(v) not in (0, 1) for v in g.nodes):
        return False
    return all(outputs[u] != outputs[v] for u, v in g.edges())


def outputs_are_ids(g: Graph, outputs: Mapping[int, object]) -> bool:
    return all(outputs.get(v) == v for v in g.nodes)


def component_minimum(g: Graph, outputs: Mapping[int, object]) -> bool:
    for comp in g.components():
        low = min(comp)
        if any(outputs.get(v) != low for v in comp):
            return False
    return True
