"""Synchronous round executor with CONGEST bit auditing.

A :class:`NodeProgram` is driven in lockstep rounds.  Round 0 is ``init``;
anything a node emits while being stepped in round ``r`` is in flight during
round ``r + 1`` and delivered to the recipient's ``step`` call of that round.
The executor is event driven: a node is only stepped in rounds where it has
mail or where it asked to be woken, so long idle stretches cost nothing.
"""

from __future__ import annotations

import dataclasses
import heapq
import json
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

from .errors import ParameterError, SimTimeout
from .graph import Graph
from .params import Params, clog2

NO_MESSAGE = object()


@dataclass
class Step:
    """What a node does at the end of a round.

    Attributes:
        state: new local state.
        send: per-neighbor messages.
        broadcast: one message to every neighbor (combined with ``send``).
        halt: stop after this step; ``output`` becomes final.
        wake: absolute round at which to be stepped even without mail.
    """

    state: Any = None
    send: Mapping[int, Any] | None = None
    broadcast: Any = NO_MESSAGE
    halt: bool = False
    output: Any = None
    wake: int | None = None


@dataclass
class NodeContext:
    node: int
    neighbors: tuple[int, ...]
    input: Any
    rand: Any
    params: Params | None


class NodeProgram:
    """Base class; subclasses override ``init`` and ``step``."""

    name = "program"

    def init(self, ctx: NodeContext) -> Step:
        raise NotImplementedError

    def step(self, ctx: NodeContext, state, inbox: dict, rnd: int) -> Step:
        raise NotImplementedError


@dataclass
class SimTrace:
    rounds_executed: int = 0
    last_round: int = 0
    max_message_bits: int = 0
    total_messages: int = 0
    total_random_bits: int = 0
    outputs: dict = field(default_factory=dict)
    halted: bool = True

    def to_json(self) -> str:
        d = dataclasses.asdict(self)
        d["outputs"] = {str(k): v for k, v in sorted(self.outputs.items())}
        return json.dumps(d, sort_keys=True, default=repr)


# ---------------------------------------------------------------------------
# canonical message length


def _gamma(x: int) -> int:
    """Elias-gamma code length of x >= 1."""
    return 2 * x.bit_length() - 1


def message_bits(msg) -> int:
    """Length of ``msg`` under a canonical length-prefixed encoding.

    bool/None: 1 bit.  int: sign + gamma(bitlen + 1) + bitlen.  float: 64.
    str/bytes/tuple/list/set/dict: gamma(len + 1) + contents.
    """
    if msg is None or isinstance(msg, bool):
        return 1
    if isinstance(msg, int):
        b = abs(msg).bit_length()
        return 1 + _gamma(b + 1) + b
    if isinstance(msg, float):
        return 64
    if isinstance(msg, str):
        msg = msg.encode()
    if isinstance(msg, (bytes, bytearray)):
        return _gamma(len(msg) + 1) + 8 * len(msg)
    if isinstance(msg, dict):
        return _gamma(len(msg) + 1) + sum(message_bits(k) + message_bits(v) for k, v in msg.items())
    if isinstance(msg, (tuple, list, frozenset, set)):
        items = sorted(msg) if isinstance(msg, (set, frozenset)) else msg
        return _gamma(len(items) + 1) + sum(message_bits(x) for x in items)
    raise TypeError(f"cannot encode message of type {type(msg).__name__}")


# ---------------------------------------------------------------------------


def run_sync(program: NodeProgram, g: Graph, inputs: Mapping | None = None, rand=None,
             round_cap: int = 10**9, params: Params | None = None) -> SimTrace:
    """Execute ``program`` on every node of ``g``.

    Args:
        program: the node algorithm.
        g: communication graph.
        inputs: per-node local input (missing nodes get None).
        rand: a :class:`~limrand.randomness.RandomnessSource` or None.
        round_cap: largest round number that may execute.
        params: global parameters visible to every node.

    Returns:
        The run's :class:`SimTrace`.

    Raises:
        SimTimeout: some node is still running past ``round_cap`` or the run
            deadlocked (no mail, no wake-ups, unhalted nodes).
    """
    if round_cap < 1:
        raise ParameterError("round_cap must be >= 1")
    inputs = inputs or {}
    start_bits = rand.total_consumed if rand is not None else 0
    adj = g.adjacency
    ctxs = {v: NodeContext(v, adj[v], inputs.get(v), rand.handle(v) if rand is not None else None,
                           params) for v in g.nodes}
    trace = SimTrace()
    states: dict[int, Any] = {}
    halted: set[int] = set()
    wakes: list[tuple[int, int]] = []
    pending: dict[int, dict] = {}

    def absorb(v: int, st: Step, rnd: int) -> None:
        states[v] = st.state
        out = {}
        if st.broadcast is not NO_MESSAGE:
            for u in adj[v]:
                out[u] = st.broadcast
        if st.send:
            for u, m in st.send.items():
                if u not in ctxs[v].neighbors:
                    raise ParameterError(f"node {v} sent to non-neighbor {u}")
                out[u] = m
        if out:
            trace.total_messages += len(out)
            if st.broadcast is not NO_MESSAGE and not st.send:
                bits = message_bits(st.broadcast)
            else:
                bits = max(message_bits(m) for m in out.values())
            if bits > trace.max_message_bits:
                trace.max_message_bits = bits
            trace.rounds_executed = rnd + 1
            for u, m in out.items():
                if u not in halted:
                    pending.setdefault(u, {})[v] = m
        if st.halt:
            halted.add(v)
            trace.outputs[v] = st.output
        elif st.wake is not None:
            if st.wake <= rnd:
                raise ParameterError(f"node {v} asked to wake at past round {st.wake}")
            heapq.heappush(wakes, (st.wake, v))

    for v in g.nodes:
        absorb(v, program.init(ctxs[v]), 0)

    rnd = 0
    while len(halted) < len(ctxs):
        # mail sent in round rnd is delivered in round rnd + 1
        if pending:
            nxt = rnd + 1
        elif wakes:
            nxt = wakes[0][0]
        else:
            trace.halted = False
            trace.total_random_bits = (rand.total_consumed - start_bits) if rand is not None else 0
            raise SimTimeout(f"deadlock at round {rnd} with {len(ctxs) - len(halted)} running nodes", trace)
        if nxt > round_cap:
            trace.halted = False
            trace.last_round = rnd
            trace.total_random_bits = (rand.total_consumed - start_bits) if rand is not None else 0
            raise SimTimeout(f"round cap {round_cap} exceeded", trace)
        rnd = nxt
        inbox_all, pending = pending, {}
        active = set(inbox_all)
        while wakes and wakes[0][0] <= rnd:
            active.add(heapq.heappop(wakes)[1])
        for v in sorted(active):
            if v in halted:
                continue
            absorb(v, program.step(ctxs[v], states[v], inbox_all.get(v, {}), rnd), rnd)
        trace.last_round = rnd
    trace.total_random_bits = (rand.total_consumed - start_bits) if rand is not None else 0
    return trace


def audit_congest(trace: SimTrace, n: int, B: int) -> bool:
    """True iff every message fit in ``B * ceil(log2 n)`` bits."""
    if B < 1:
        raise ParameterError("B must be >= 1")
    return trace.max_message_bits <= B * clog2(max(n, 2))


def inflate_n(params: Params, true_n: int, virtual_N: int) -> Params:
    """Configuration in which every use of n reads ``virtual_N``."""
    if virtual_N < true_n:
        raise ParameterError(f"virtual_N={virtual_N} is below the true size {true_n}")
    return dataclasses.replace(params, n=virtual_N)


# ---------------------------------------------------------------------------
# aggregate over a rooted tree


def tree_aggregate(g: Graph, parent: Mapping[int, int | None], values: Mapping[int, Any],
                   op: Callable[[Any, Any], Any]) -> tuple[dict, SimTrace]:
    """Run the convergecast and return (per-node subtree aggregate, trace)."""
    trace = run_sync(TreeAggregate(op), g, {v: (parent.get(v), values[v]) for v in g.nodes})
    return trace.outputs, trace


class TreeAggregate(NodeProgram):
    """Convergecast of an associative aggregate over a rooted forest.

    Input per node: ``(parent, value)`` with parent None at roots.  Each node
    outputs the aggregate of its subtree, so roots output the tree total.
    Takes (tree depth + 1) rounds.
    """

    name = "tree-aggregate"

    def __init__(self, op):
        self.op = op

    def init(self, ctx):
        parent, value = ctx.input
        # announce to parent so it learns its child count
        send = {parent: ("child",)} if parent is not None else None
        return Step(state={"parent": parent, "acc": value, "kids": None, "got": 0}, send=send, wake=1)

    def step(self, ctx, state, inbox, rnd):
        if state["kids"] is None:
            state["kids"] = sum(1 for m in inbox.values() if m == ("child",))
            inbox = {u: m for u, m in inbox.items() if m != ("child",)}
        for m in inbox.values():
            state["acc"] = self.op(state["acc"], m[1])
            state["got"] += 1
        if state["got"] == state["kids"]:
            p = state["parent"]
            send = {p: ("agg", state["acc"])} if p is not None else None
            return Step(state=state, send=send, halt=True, output=state["acc"])
        return Step(state=state)
