"""Sub-sampling large hyperedges so each keeps about mark_factor * L marked nodes.

A hyperedge of size s is in class i = ceil(log2 s), i.e. s in (2^(i-1), 2^i].
Classes with 2^i <= L^mark_threshold_power are left alone (every node counts
as marked).  In larger classes each node marks itself with probability
p_i = min(1, mark_factor * L / 2^i), decided by comparing L random bits with
floor(p_i * 2^L).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ..params import Params, clog2
from ..randomness import FullSource, KWiseTape, SharedSource, field_degree, seed_to_bits


@dataclass
class MarkResult:
    marked: dict                      # class -> frozenset of marked nodes
    counts: list                      # per hyperedge, number of marked members
    classes: list                     # per hyperedge, its class
    passthrough: set = field(default_factory=set)
    random_bits: int = 0


def size_class(size: int) -> int:
    return clog2(max(size, 1))


def mark_threshold(i: int, params: Params) -> int:
    full = 1 << params.L
    return min(full, (params.mark_factor * params.L * full) >> i)


def mark_tape(seed, params: Params) -> SharedSource:
    """Shared k-wise tape (k = mark_k_factor * L) with one element per (class, node ID).

    Hyperedges have at most n nodes, so classes run over 0..L.
    """
    k = params.mark_k_factor * params.L
    m = max(params.L, field_degree((params.L + 1) * params.id_space))
    return SharedSource(KWiseTape(seed_to_bits(seed, k * m), k, m))


def mark_hyperedges(hyperedges: Sequence[Iterable[int]], rand, params: Params) -> MarkResult:
    """Mark nodes per size class.

    Args:
        hyperedges: node sets; their classes follow from their sizes.
        rand: a k-wise :class:`SharedSource` (node v of class i uses element
            i * id_space + v - 1, top L bits) or a :class:`FullSource`
            (L private bits per node and class).
        params: constants ledger.

    Returns:
        Marked sets per class and per-hyperedge marked counts.
    """
    edges = [frozenset(e) for e in hyperedges]
    classes = [size_class(len(e)) for e in edges]
    L = params.L
    limit = L ** params.mark_threshold_power
    before = rand.total_consumed
    marked: dict[int, frozenset] = {}
    passthrough = set()
    for i in sorted(set(classes)):
        nodes = sorted(set().union(*(e for e, c in zip(edges, classes) if c == i)))
        if (1 << i) <= limit:
            marked[i] = frozenset(nodes)
            passthrough.add(i)
            continue
        thr = mark_threshold(i, params)
        marked[i] = frozenset(_draw(rand, i, nodes, params, thr))
    counts = [len(e & marked[c]) for e, c in zip(edges, classes)]
    return MarkResult(marked, counts, classes, passthrough, rand.total_consumed - before)


def _draw(rand, i: int, nodes: list[int], params: Params, thr: int) -> list[int]:
    L = params.L
    if isinstance(rand, SharedSource):
        tape = rand.tape
        ids = np.array(nodes, dtype=np.int64)
        pos = i * params.id_space + ids - 1
        vals = rand.elements(pos) >> (tape.m - L)
        return ids[vals < thr].tolist()
    if isinstance(rand, FullSource):
        out = []
        for v in nodes:
            h = rand.handle(v)
            h.pos = i * L
            if h.uint(L) < thr:
                out.append(v)
        return out
    raise TypeError("marking needs a shared k-wise tape or a full source")
