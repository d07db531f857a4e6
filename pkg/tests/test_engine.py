import json

import pytest
from hypothesis import given, strategies as st

from conftest import path_graph
from limrand.algorithms.programs import FloodMin, HaltWithId
from limrand.engine import (NO_MESSAGE, NodeProgram, SimTrace, Step, TreeAggregate, audit_congest,
                            inflate_n, message_bits, run_sync, tree_aggregate)
from limrand.errors import ParameterError, SimTimeout
from limrand.graph import Graph, bfs_tree, generate
from limrand.params import Params
from limrand.randomness import FullSource


def test_halt_immediately_counts_zero_rounds():
    g = generate("gnp", 20, {"p": 0.2}, seed=1)
    tr = run_sync(HaltWithId(), g)
    assert tr.rounds_executed == 0
    assert tr.outputs == {v: v for v in g.nodes}
    assert tr.max_message_bits == 0


def test_flood_min_on_path():
    g = path_graph([1, 2, 3, 4, 5])
    tr = run_sync(FloodMin(), g, params=Params(n=5))
    assert tr.rounds_executed == 4
    assert set(tr.outputs.values()) == {1}


def test_single_node_sends_nothing():
    g = Graph({7: set()})
    tr = run_sync(FloodMin(), g, params=Params(n=1))
    assert tr.max_message_bits == 0 and tr.total_messages == 0 and tr.outputs == {7: 7}


class Echo(NodeProgram):
    """Sends its id in round 0 and halts on the reply: exactly one round of mail."""

    def init(self, ctx):
        return Step(state=None, broadcast=ctx.node)

    def step(self, ctx, state, inbox, rnd):
        return Step(halt=True, output=(rnd, sorted(inbox.values())))


def test_delivery_is_one_round_delayed():
    g = path_graph([1, 2, 3])
    tr = run_sync(Echo(), g)
    assert tr.outputs[2] == (1, [1, 3])
    assert tr.rounds_executed == 1
    assert tr.total_messages == 4


class Forever(NodeProgram):
    def init(self, ctx):
        return Step(state=0, broadcast=0)

    def step(self, ctx, state, inbox, rnd):
        return Step(state=state + 1, broadcast=state + 1)


class Stuck(NodeProgram):
    def init(self, ctx):
        return Step(state=0)

    def step(self, ctx, state, inbox, rnd):
        return Step(state=0)


def test_round_cap_timeout_carries_trace():
    g = path_graph([1, 2])
    with pytest.raises(SimTimeout) as exc:
        run_sync(Forever(), g, round_cap=5)
    assert exc.value.trace is not None and exc.value.trace.last_round == 5
    assert not exc.value.trace.halted


def test_deadlock_is_timeout():
    with pytest.raises(SimTimeout):
        run_sync(Stuck(), path_graph([1, 2]))


def test_round_cap_must_be_positive():
    with pytest.raises(ParameterError):
        run_sync(HaltWithId(), path_graph([1, 2]), round_cap=0)


class BadSender(NodeProgram):
    def init(self, ctx):
        return Step(send={999: 1}, halt=True)


def test_sending_to_non_neighbor_rejected():
    with pytest.raises(ParameterError):
        run_sync(BadSender(), path_graph([1, 2]))


def test_message_bits_encoding():
    assert message_bits(None) == 1 and message_bits(True) == 1
    assert message_bits(0) == 1 + 1
    assert message_bits(5) == 1 + (2 * 3 - 1) + 3
    assert message_bits((1, 2)) > message_bits(1) + message_bits(2)
    assert message_bits({1, 2}) == message_bits([1, 2])
    assert message_bits("ab") == message_bits(b"ab")
    with pytest.raises(TypeError):
        message_bits(object())


@given(st.integers(-10 ** 9, 10 ** 9), st.integers(-10 ** 9, 10 ** 9))
def test_message_bits_monotone_in_magnitude(a, b):
    if abs(a) <= abs(b):
        assert message_bits(a) <= message_bits(b)


def test_audit_congest_examples():
    assert audit_congest(SimTrace(max_message_bits=0), 1024, 1)
    assert audit_congest(SimTrace(max_message_bits=80), 1024, 8)
    assert not audit_congest(SimTrace(max_message_bits=81), 1024, 8)
    with pytest.raises(ParameterError):
        audit_congest(SimTrace(), 16, 0)


@given(st.integers(0, 500), st.integers(2, 5000), st.integers(1, 20))
def test_audit_congest_monotone_in_B(bits, n, B):
    tr = SimTrace(max_message_bits=bits)
    if audit_congest(tr, n, B):
        assert audit_congest(tr, n, B + 1)


def test_inflate_n():
    p = Params(n=100)
    assert inflate_n(p, 100, 100) == p
    q = inflate_n(Params(n=16), 16, 256)
    assert q.phases == 2 * Params(n=16).phases
    with pytest.raises(ParameterError):
        inflate_n(p, 100, 50)


def test_determinism_and_json():
    g = generate("gnp", 30, {"p": 0.15}, seed=4)
    a = run_sync(FloodMin(), g, params=Params(n=30))
    b = run_sync(FloodMin(), g, params=Params(n=30))
    assert a.to_json() == b.to_json()
    assert json.loads(a.to_json())["rounds_executed"] == a.rounds_executed


class RandomBits(NodeProgram):
    def init(self, ctx):
        return Step(halt=True, output=ctx.rand.bits(3))


def test_random_bits_accounted():
    g = path_graph([1, 2, 3, 4])
    tr = run_sync(RandomBits(), g, rand=FullSource(9))
    assert tr.total_random_bits == 12


class Ball(NodeProgram):
    """Collects the IDs within T hops, then halts."""

    def __init__(self, T):
        self.T = T

    def init(self, ctx):
        return Step(state=frozenset([ctx.node]), broadcast=frozenset([ctx.node]), wake=1)

    def step(self, ctx, state, inbox, rnd):
        seen = state.union(*inbox.values())
        if rnd >= self.T:
            return Step(halt=True, output=seen)
        return Step(state=seen, broadcast=seen, wake=rnd + 1)


@given(st.integers(0, 10 ** 6), st.integers(1, 3))
def test_information_locality(seed, T):
    g = generate("path", 20, ids="sequential")
    tr = run_sync(Ball(T), g)
    # surgery far from node 1: remove an edge beyond its T-ball
    cut = 1 + T + 2
    h = Graph.from_edges(g.nodes, [e for e in g.edges() if e != (cut, cut + 1)])
    tr2 = run_sync(Ball(T), h)
    assert tr.outputs[1] == tr2.outputs[1] == frozenset(range(1, T + 2))


@given(st.integers(2, 40), st.integers(0, 10 ** 6))
def test_tree_aggregate_matches_direct_sum(n, seed):
    g = generate("tree", n, seed=seed)
    root = min(g.nodes)
    parent = bfs_tree(g, root)
    values = {v: v % 7 for v in g.nodes}
    out, tr = tree_aggregate(g, parent, values, lambda a, b: a + b)
    assert out[root] == sum(values.values())
    assert tr.rounds_executed <= n + 1


def test_tree_aggregate_min_on_forest():
    g = Graph.from_edges([1, 2, 3, 4], [(1, 2), (3, 4)])
    out, _ = tree_aggregate(g, {1: None, 2: 1, 3: None, 4: 3}, {1: 5, 2: 3, 3: 9, 4: 8}, min)
    assert out[1] == 3 and out[3] == 8
    assert TreeAggregate(min).name == "tree-aggregate"
    assert NO_MESSAGE is not None
