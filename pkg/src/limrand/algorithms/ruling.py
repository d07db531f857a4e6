"""Deterministic (alpha, beta)-ruling sets by ID-bit phases.

One phase per ID bit, most significant first, each lasting alpha - 1 rounds.
In a phase, surviving candidates whose current bit is 0 flood a one-bit token
for alpha - 1 hops through all of G; candidates with bit 1 that hear it drop
out.  Two survivors closer than alpha differ in some bit and the one with a 1
there would have dropped, so survivors are alpha-independent.  A dropped node
is within alpha - 1 of a node that survives that phase, hence every candidate
is within (alpha - 1) * B of the final set, B being the ID length.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..engine import NO_MESSAGE, NodeProgram, SimTrace, Step, message_bits, run_sync
from ..errors import ParameterError
from ..graph import Graph
from ..params import Params


@dataclass
class RulingSet:
    nodes: frozenset
    alpha: int
    beta: int
    rounds: int
    max_message_bits: int
    trace: SimTrace | None = field(default=None, repr=False)


class RulingSetProgram(NodeProgram):
    name = "ruling-set"

    def __init__(self, alpha: int, id_bits: int):
        self.P = alpha - 1
        self.B = id_bits

    def _bit(self, v: int, phase: int) -> int:
        return (v >> (self.B - 1 - phase)) & 1

    def init(self, ctx):
        cand = bool(ctx.input)
        send = cand and self._bit(ctx.node, 0) == 0
        # a flooder counts as reached in its own phase
        st = {"cand": cand, "phase": 0, "reached": send}
        return Step(state=st, broadcast=True if send else NO_MESSAGE, wake=self.P)

    def step(self, ctx, st, inbox, rnd):
        P = self.P
        out = None
        if inbox and not st["reached"]:
            st["reached"] = True
            # inbox arrives rnd - phase_start hops from the nearest flooder
            if rnd - st["phase"] * P < P:
                out = True
        if rnd == (st["phase"] + 1) * P:
            if st["cand"] and st["reached"] and self._bit(ctx.node, st["phase"]) == 1:
                st["cand"] = False
            st["phase"] += 1
            st["reached"] = False
            if st["phase"] == self.B:
                return Step(state=st, halt=True, output=st["cand"],
                            broadcast=True if out else NO_MESSAGE)
            if st["cand"] and self._bit(ctx.node, st["phase"]) == 0:
                out = st["reached"] = True
            return Step(state=st, broadcast=True if out else NO_MESSAGE, wake=(st["phase"] + 1) * P)
        return Step(state=st, broadcast=True if out else NO_MESSAGE)


def _check(g: Graph, U, alpha: int, params: Params | None):
    if alpha < 2:
        raise ParameterError("alpha must be >= 2")
    U = frozenset(U)
    if not U:
        raise ParameterError("U must be nonempty")
    if not U <= set(g.nodes):
        raise ParameterError("U must be a subset of V")
    params = params or Params(n=g.n)
    B = params.id_bits
    if max(g.nodes) >= 1 << B:
        raise ParameterError(f"node id {max(g.nodes)} does not fit in {B} bits")
    return U, params, B


def ruling_set(g: Graph, U, alpha: int, params: Params | None = None,
               simulate: bool = True) -> RulingSet:
    """Compute an (alpha, (alpha - 1) * B)-ruling set of U in G.

    Args:
        g: graph; every node relays tokens.
        U: target set.
        alpha: independence distance (>= 2).
        params: supplies the ID length B (defaults to Params(n=|V|)).
        simulate: run the node program on the engine; otherwise use the
            equivalent centralized computation (same output, same round count).

    Returns:
        A :class:`RulingSet` with the guaranteed beta.
    """
    U, params, B = _check(g, U, alpha, params)
    beta = (alpha - 1) * B
    if simulate:
        trace = run_sync(RulingSetProgram(alpha, B), g, {v: v in U for v in g.nodes},
                         round_cap=B * (alpha - 1) + 1, params=params)
        S = frozenset(v for v, keep in trace.outputs.items() if keep)
        return RulingSet(S, alpha, beta, trace.rounds_executed, trace.max_message_bits, trace)
    return _ruling_fast(g, U, alpha, B)


def _ruling_fast(g: Graph, U: frozenset, alpha: int, B: int) -> RulingSet:
    P = alpha - 1
    adj = g.adjacency
    cand = set(U)
    last = 0
    for phase in range(B):
        shift = B - 1 - phase
        src = [v for v in cand if not (v >> shift) & 1]
        if not src:
            continue
        reached = set(src)
        frontier = src
        d = 0
        while frontier and d < P:
            if any(adj[v] for v in frontier):
                last = phase * P + d + 1
            nxt = []
            for v in frontier:
                for u in adj[v]:
                    if u not in reached:
                        reached.add(u)
                        nxt.append(u)
            frontier = nxt
            d += 1
        cand = {v for v in cand if not ((v >> shift) & 1 and v in reached)}
    bits = message_bits(True) if last else 0
    return RulingSet(frozenset(cand), alpha, P * B, last, bits)
