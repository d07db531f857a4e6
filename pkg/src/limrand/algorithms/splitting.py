"""Zero-round splitting from a shared k-wise tape.

Every right node colors itself by the tape bit at its own ID; nobody talks.
With k-wise independence for k >= the degree being inspected, a left node of
degree D is monochromatic with probability 2^(1-D).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..engine import NodeProgram, SimTrace, Step, run_sync
from ..errors import InputError, ParameterError
from ..graph import BipartiteGraph, Graph
from ..params import Params
from ..randomness import KWiseTape, SharedSource, field_degree, seed_to_bits
from ..verify import verify_splitting

COLORS = ("blue", "red")


class SplitProgram(NodeProgram):
    """Right nodes output the color named by their tape bit; left nodes output None."""

    name = "split"

    def init(self, ctx):
        if ctx.input == "right":
            return Step(halt=True, output=COLORS[ctx.rand.at(ctx.node)])
        return Step(halt=True, output=None)

    def step(self, ctx, state, inbox, rnd):  # never reached
        return Step(halt=True)


@dataclass
class SplitResult:
    coloring: dict
    rounds: int
    random_bits: int
    failed_left: list
    trace: SimTrace | None = None

    @property
    def ok(self) -> bool:
        return not self.failed_left


def split_tape(seed, bip: BipartiteGraph, params: Params) -> SharedSource:
    """Shared source holding a (split_k_factor * L)-wise tape long enough for every right ID."""
    k = params.split_k_factor * params.L
    m = field_degree(max(bip.right) + 1)
    return SharedSource(KWiseTape(seed_to_bits(seed, k * m), k, m))


def check_degrees(bip: BipartiteGraph, params: Params, c_min: float) -> None:
    need = max(2, math.ceil(params.L ** c_min))
    for u in bip.left:
        if bip.degree(u) < need:
            raise InputError(f"left node {u} has degree {bip.degree(u)} < {need}", node=u)


def split(bip: BipartiteGraph, rand: SharedSource, params: Params | None = None,
          c_min: float = 1.0, simulate: bool = True) -> SplitResult:
    """Two-color the right side so that each left node sees both colors.

    Args:
        bip: the instance.
        rand: shared tape; right node v reads position v.
        params: constants (n defaults to |U| + |V|).
        c_min: every left degree must be at least max(2, L**c_min).
        simulate: run the (zero-round) node program on the engine.

    Raises:
        InputError: a left node violates the degree precondition.
    """
    params = params or Params(n=bip.n)
    if not isinstance(rand, SharedSource):
        raise ParameterError("split reads a shared tape")
    check_degrees(bip, params, c_min)
    before = rand.total_consumed
    ids = np.array(bip.right, dtype=np.int64)
    trace = None
    if simulate:
        rand.prefetch(ids)
        g = _as_graph(bip)
        trace = run_sync(SplitProgram(), g, {v: "right" for v in bip.right}, rand=rand,
                         params=params)
        coloring = {v: trace.outputs[v] for v in bip.right}
        rounds = trace.rounds_executed
    else:
        bits = rand.read_at(ids)
        coloring = dict(zip(bip.right, (COLORS[b] for b in bits.tolist())))
        rounds = 0
    rep = verify_splitting(bip.adj, coloring)
    failed = [] if rep.valid else _failed(bip, coloring)
    return SplitResult(coloring, rounds, rand.total_consumed - before, failed, trace)


def _failed(bip, coloring):
    return [u for u in bip.left if len({coloring[v] for v in bip.adj[u]}) < 2]


def _as_graph(bip: BipartiteGraph) -> Graph:
    adj = {v: set() for v in bip.left + bip.right}
    for u, nb in bip.adj.items():
        for v in nb:
            adj[u].add(v)
            adj[v].add(u)
    return Graph(adj, validate=False)


def chernoff_envelope(n_left: int, degree: int) -> float:
    """Union bound 2 |U| exp(-D / 12) on the fraction of failing runs."""
    return 2 * n_left * math.exp(-degree / 12)


def exact_failure_bound(n_left: int, degree: int) -> float:
    """Union bound |U| * 2^(1 - D) under independence of the D neighbor bits."""
    return n_left * 2.0 ** (1 - degree)
