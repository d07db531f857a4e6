"""Strong-diameter decomposition from a short shared random seed.

Phases are colors.  A phase runs p = epochs epochs over the live nodes (not
yet clustered, not set aside this phase).  In epoch i each live node becomes a
center with probability min(1, 2^i * L / n), forced to 1 in the last epoch,
and draws X_u ~ Geometric(1/2).  Node v measures (R_i + X_u) - d(u, v) in the
live subgraph, with R_i = (p - i) * c * L.  Reached nodes whose top two
measures differ by more than 1 join the top center; the other reached nodes
are set aside until the next phase.

All randomness comes from two k-wise independent tapes (sampling, radii) over
GF(2^m), indexed by (phase, epoch, node ID), so no private bits are used.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from ..decomposition import Cluster, NetworkDecomposition
from ..engine import message_bits
from ..errors import BudgetError, ParameterError
from ..graph import Graph, distances_from
from ..params import Params
from ..randomness import KWiseTape, SharedSource, field_degree
from .ballcarving import top2_flood


@dataclass
class PhaseState:
    """Transcript of one epoch."""

    phase: int
    epoch: int
    R: int
    live: frozenset
    centers: dict                 # center -> X_u
    measures: dict                # node -> (m1, m2, center) for reached nodes
    outcome: dict                 # node -> ("clustered", center) | ("set_aside", None)
    reach: dict = field(default_factory=dict)   # node -> number of centers reaching it


@dataclass(frozen=True)
class SharedLayout:
    """Tape geometry: field degree and how many elements one radius may use."""

    k: int
    m: int
    t: int
    phases: int
    epochs: int
    id_space: int

    @classmethod
    def for_params(cls, params: Params) -> "SharedLayout":
        cap = params.geo_cap
        span = params.phases * params.epochs * params.id_space
        m = field_degree(span * cap)
        if m > 62:
            raise ParameterError(f"position space needs GF(2^{m}); reduce n or id_c")
        if params.L > m:
            raise ParameterError("field narrower than the sampling precision")
        t = -(-cap // m)
        return cls(params.kwise_k, m, t, params.phases, params.epochs, params.id_space)

    @property
    def seed_bits(self) -> int:
        """Two independent k-wise sub-tapes of k m-bit coefficients each."""
        return 2 * self.k * self.m

    def base(self, phase: int, epoch: int, ids: np.ndarray) -> np.ndarray:
        return ((phase - 1) * self.epochs + (epoch - 1)) * self.id_space + (ids - 1)


def tapes_from_bits(bits, layout: SharedLayout) -> tuple[KWiseTape, KWiseTape]:
    bits = np.asarray(bits, dtype=np.uint8)
    km = layout.k * layout.m
    if bits.size < 2 * km:
        raise BudgetError(f"shared seed has {bits.size} bits, needs {2 * km}")
    return KWiseTape(bits[:km], layout.k, layout.m), KWiseTape(bits[km:2 * km], layout.k, layout.m)


def _leading_ones(elems: np.ndarray, m: int, cap: int) -> np.ndarray:
    """Geometric values from rows of m-bit elements read MSB first."""
    rows = elems.shape[0]
    bits = ((elems[:, :, None] >> np.arange(m - 1, -1, -1)) & 1).reshape(rows, -1)[:, :cap]
    zero = bits == 0
    first = np.where(zero.any(axis=1), zero.argmax(axis=1) + 1, cap)
    return first.astype(np.int64)


def shared_rand_decompose(g: Graph, rand: SharedSource | None, params: Params, *,
                          record: bool = False, count_reach: bool = False,
                          tape_for_node: Mapping[int, tuple] | None = None) -> NetworkDecomposition:
    """Carve G into strong-diameter clusters using only shared randomness.

    Args:
        g: the graph.
        rand: shared source whose tape prefix is the seed of the two sub-tapes.
        params: constants ledger.
        record: keep :class:`PhaseState` transcripts.
        count_reach: also count, per epoch, how many centers reach each node.
        tape_for_node: per-node (sampling, radius) tape pair overriding ``rand``
            (used when clusters hold locally shared seeds).

    Returns:
        A decomposition with color_bound = phases and
        diameter_bound = 2 * (R_1 + geo_cap); ``failed`` if nodes remain.
    """
    layout = SharedLayout.for_params(params)
    if tape_for_node is None:
        if rand is None:
            raise ParameterError("need a shared source or per-node tapes")
        seed = rand.read_at(np.arange(layout.seed_bits))
        pair = tapes_from_bits(seed, layout)
        groups = {pair: list(g.nodes)}
        random_bits = rand.total_consumed
    else:
        groups: dict = {}
        for v in g.nodes:
            groups.setdefault(tape_for_node[v], []).append(v)
        random_bits = layout.seed_bits * len(groups)

    cap, L, m = params.geo_cap, params.L, layout.m
    adj = g.adjacency
    unclustered = set(g.nodes)
    center_of: dict[int, int] = {}
    color_of: dict[int, int] = {}
    parent_of: dict[int, int | None] = {}
    transcripts: list[PhaseState] = []
    rounds = 0
    used = 0
    max_init = 0

    def draw(phase, epoch, live_sorted):
        thr = params.center_threshold(epoch)
        centers = {}
        for (samp, rad), nodes in groups.items():
            ids = np.array([v for v in nodes if v in live_sorted], dtype=np.int64)
            if ids.size == 0:
                continue
            pos = layout.base(phase, epoch, ids)
            top = samp.elements(pos) >> (m - L)
            chosen = ids[top < thr]
            if chosen.size == 0:
                continue
            cpos = layout.base(phase, epoch, chosen) * layout.t
            elems = np.stack([rad.elements(cpos + j) for j in range(layout.t)], axis=1)
            xs = _leading_ones(elems, m, cap)
            centers.update(zip(chosen.tolist(), xs.tolist()))
        return centers

    for phase in range(1, params.phases + 1):
        if not unclustered:
            break
        used = phase
        live = set(unclustered)
        for epoch in range(1, params.epochs + 1):
            if not live:
                break
            R = params.base_radius(epoch)
            rounds += R + cap + 1
            centers = draw(phase, epoch, live)
            values = {u: R + x for u, x in centers.items()}
            max_init = max(max_init, max(values.values(), default=0))
            ladj = {v: tuple(u for u in adj[v] if u in live) for v in live}
            entries, parent = top2_flood(ladj, values)
            outcome, measures = {}, {}
            for v in sorted(entries):
                top = entries[v]
                m1, c1 = top[0]
                m2 = top[1][0] if len(top) > 1 else 0
                measures[v] = (m1, m2, c1)
                # a reached node with no live neighbor has nobody to be separated from
                if m1 - m2 > 1 or not ladj[v]:
                    outcome[v] = ("clustered", c1)
                    center_of[v], color_of[v], parent_of[v] = c1, phase, parent[v]
                else:
                    outcome[v] = ("set_aside", None)
            if record:
                reach = {}
                if count_reach:
                    lg = Graph(ladj, validate=False)
                    for u, val in values.items():
                        for w in distances_from(lg, u, val):
                            reach[w] = reach.get(w, 0) + 1
                transcripts.append(PhaseState(phase, epoch, R, frozenset(live), dict(centers),
                                              measures, outcome, reach))
            live -= set(outcome)
            unclustered -= {v for v, o in outcome.items() if o[0] == "clustered"}

    groups_out: dict[tuple[int, int], set] = {}
    for v, c in center_of.items():
        groups_out.setdefault((color_of[v], c), set()).add(v)
    clusters = []
    for (col, c), mem in sorted(groups_out.items()):
        edges = frozenset((min(v, parent_of[v]), max(v, parent_of[v]))
                          for v in mem if parent_of[v] is not None)
        clusters.append(Cluster(center=c, members=frozenset(mem), tree_edges=edges, color=col))
    R1 = params.base_radius(1)
    max_id = max(g.nodes)
    return NetworkDecomposition(
        clusters=clusters,
        diameter_bound=2 * (R1 + cap),
        color_bound=params.phases,
        congestion=1,
        failed=bool(unclustered),
        uncolored=frozenset(unclustered),
        rounds=rounds,
        max_message_bits=message_bits(((max_init, max_id), (max_init, max_id))) if used else 0,
        random_bits=random_bits,
        stages={"phases_used": used, "epochs": params.epochs, "k": layout.k, "m": layout.m,
                "seed_bits": layout.seed_bits, "c_prime": 2 * (R1 + cap) / L ** 2},
        constants=params.to_dict(),
        transcripts=transcripts,
    )


TapeFactory = Callable[[int], tuple]
