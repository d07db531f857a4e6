"""Decompositions when only a sparse set S holds one random bit per node."""

from __future__ import annotations

from ..decomposition import Cluster, NetworkDecomposition
from ..graph import contract_to_cluster_graph
from ..params import Params
from ..randomness import PooledSource, SparseSource
from .ballcarving import decompose_cluster_graph
from .gather import gather_bits
from .shared import SharedLayout, shared_rand_decompose, tapes_from_bits


def decompose_one_bit(g, rand: SparseSource, params: Params | None = None,
                      simulate: bool = False, k: int | None = None) -> NetworkDecomposition:
    """Gather k = onebit_bits_factor * L^2 bits per cluster, then carve the cluster graph.

    The diameter bound is 2 * (cap * (2 rho + 1) + rho) with rho = (h' - 1) * B
    the cluster radius bound of the gathering stage; ``stages['C']`` reports it
    as a multiple of h * L^4.  ``k`` overrides the per-cluster bit count
    (small values exercise non-isolated clusters at desk scale).
    """
    params = params or Params(n=g.n)
    start = rand.total_consumed
    k = k or params.onebit_bits_factor * params.L ** 2
    gr = gather_bits(g, rand, k, params, simulate=simulate)
    cg = contract_to_cluster_graph(g, gr.clusters)
    pools = PooledSource({c.center: c.gathered_bits for c in gr.clusters})
    rho = gr.radius_bound
    nd = decompose_cluster_graph(cg, pools, params, cluster_radius=rho)
    nd.rounds += gr.rounds
    nd.max_message_bits = max(nd.max_message_bits, gr.max_message_bits)
    nd.random_bits = rand.total_consumed - start
    nd.stages.update(gather=gr.stages, h_prime=gr.h_prime, k=k,
                     clusters_in=len(gr.clusters),
                     isolated=sum(c.isolated for c in gr.clusters),
                     C=nd.diameter_bound / (rand.h * params.L ** 4))
    nd.constants = params.to_dict()
    return nd


def decompose_one_bit_strong(g, rand: SparseSource, params: Params | None = None,
                             simulate: bool = False, gather_k: int | None = None) -> NetworkDecomposition:
    """Gather a shared-carving seed per cluster and run the shared carving with it.

    Isolated clusters already within the diameter bound are kept whole with
    color 1.  Every other node reads the seed gathered at its own cluster's
    center, so the diameter bound 2 * (R_1 + cap) does not depend on h.

    ``gather_k`` gathers fewer bits than a full seed (the rest is zero); it
    only exists to exercise the carving path on small graphs.
    """
    params = params or Params(n=g.n)
    start = rand.total_consumed
    layout = SharedLayout.for_params(params)
    bound = 2 * (params.base_radius(1) + params.geo_cap)
    gr = gather_bits(g, rand, gather_k or layout.seed_bits, params, collect_isolated=True, simulate=simulate)
    kept, rest, tape_for = [], [], {}
    for c in gr.clusters:
        if c.isolated and 2 * c.radius <= bound:
            kept.append(Cluster(center=c.center, members=c.members, tree_edges=c.tree_edges,
                                radius=c.radius, isolated=True, color=1))
        else:
            rest.append(c)
    clusters = list(kept)
    failed, uncolored, rounds = False, frozenset(), 0
    if rest:
        for c in rest:
            pair = tapes_from_bits(_pad(c.gathered_bits, layout.seed_bits), layout)
            for v in c.members:
                tape_for[v] = pair
        sub = g.subgraph(tape_for)
        inner = shared_rand_decompose(sub, None, params, tape_for_node=tape_for)
        clusters += inner.clusters
        failed, uncolored, rounds = inner.failed, inner.uncolored, inner.rounds
    return NetworkDecomposition(
        clusters=clusters, diameter_bound=bound, color_bound=params.phases, congestion=1,
        failed=failed, uncolored=uncolored, rounds=gr.rounds + rounds,
        max_message_bits=gr.max_message_bits, random_bits=rand.total_consumed - start,
        stages={"gather": gr.stages, "h_prime": gr.h_prime, "seed_bits": layout.seed_bits,
                "kept_isolated": len(kept), "carved_clusters": len(rest),
                "c_prime": bound / params.L ** 2},
        constants=params.to_dict())


def _pad(bits, length):
    """Isolated clusters may hold fewer bits than a full seed; missing bits are 0."""
    bits = list(bits)
    return bits + [0] * (length - len(bits))
