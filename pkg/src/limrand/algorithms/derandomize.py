"""Exhaustive seed search: one ID-to-bits function that works on a whole family."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from ..engine import NodeProgram, run_sync
from ..errors import BudgetError, ParameterError, SimTimeout
from ..graph import Graph
from ..params import Params
from ..randomness import FullSource

Checker = Callable[[Graph, Mapping[int, object]], bool]


@dataclass
class DerandResult:
    seed: int | None
    exhausted: bool
    runs: int
    per_seed_failures: dict = field(default_factory=dict)
    per_graph_failures: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"seed": self.seed, "exhausted": self.exhausted, "runs": self.runs,
                "per_seed_failures": {str(k): v for k, v in sorted(self.per_seed_failures.items())},
                "per_graph_failures": self.per_graph_failures}


def run_with_seed(program: NodeProgram, g: Graph, seed: int, round_cap: int = 64,
                  params: Params | None = None):
    """Outputs of ``program`` on ``g`` when node v's bits are the seed-s stream of ID v, or None on error."""
    try:
        trace = run_sync(program, g, rand=FullSource(seed), round_cap=round_cap,
                         params=params or Params(n=max(g.n, 1)))
    except (SimTimeout, BudgetError):
        return None
    return trace.outputs


def brute_force_derandomize(family: Sequence[Graph], program: NodeProgram, checker: Checker,
                            seed_space_bits: int, *, max_runs: int = 2 ** 22,
                            round_cap: int = 64, full_counts: bool = False,
                            params_for: Callable[[Graph], Params] | None = None) -> DerandResult:
    """Return the first seed s in [0, 2^bits) whose induced bits succeed on every family member.

    Seed s fixes the random bits of every ID (stream of ID v under
    ``FullSource(s)``), so the same seed works for any graph built from those IDs.

    Args:
        family: the labeled graphs to cover.
        program: the randomized node program.
        checker: ``checker(graph, outputs) -> bool``.
        seed_space_bits: seeds range over 0 .. 2^bits - 1.
        max_runs: refuse to start if 2^bits * |family| exceeds this.
        round_cap: per-run round limit; hitting it counts as a failure.
        full_counts: run every graph for every seed so the failure counts are
            exact; otherwise a seed is abandoned at its first failing graph.
        params_for: per-graph parameters (default ``Params(n=|V|)``).

    Raises:
        ParameterError: empty family, negative bits or infeasible budget.
    """
    if seed_space_bits < 0:
        raise ParameterError("seed_space_bits must be >= 0")
    if not family:
        raise ParameterError("family is empty")
    total = (1 << seed_space_bits) * len(family)
    if total > max_runs:
        raise ParameterError(f"{total} runs exceed the budget of {max_runs}")
    params_for = params_for or (lambda g: Params(n=max(g.n, 1)))
    plist = [params_for(g) for g in family]
    per_seed: dict[int, int] = {}
    per_graph = [0] * len(family)
    runs = 0
    for s in range(1 << seed_space_bits):
        fails = 0
        for j, g in enumerate(family):
            runs += 1
            out = run_with_seed(program, g, s, round_cap, plist[j])
            if out is None or not checker(g, out):
                fails += 1
                per_graph[j] += 1
                if not full_counts:
                    break
        per_seed[s] = fails
        if fails == 0:
            return DerandResult(s, False, runs, per_seed, per_graph)
    return DerandResult(None, True, runs, per_seed, per_graph)
