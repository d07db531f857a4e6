"""Independent validators.

They only look at (graph, artifact); nothing a producer records about its own
success is trusted.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from .decomposition import NetworkDecomposition
from .engine import NodeProgram, SimTrace, Step, run_sync
from .errors import ContractViolation, ParameterError, SimTimeout
from .graph import INF, Graph, bfs_distances, distances_from
from .params import Params


@dataclass
class Report:
    valid: bool = True
    violations: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    def add(self, kind: str, **detail) -> None:
        self.valid = False
        self.violations.append({"kind": kind, **detail})

    def kinds(self) -> set[str]:
        return {v["kind"] for v in self.violations}

    def to_dict(self) -> dict:
        return {"valid": self.valid, "violations": self.violations, "stats": self.stats}


def _tree_diameter(adj: Mapping[int, set[int]], start: int) -> int:
    def far(s):
        dist = {s: 0}
        frontier = [s]
        while frontier:
            nxt = []
            for v in frontier:
                for u in adj[v]:
                    if u not in dist:
                        dist[u] = dist[v] + 1
                        nxt.append(u)
            frontier = nxt
        best = max(dist, key=lambda v: (dist[v], -v))
        return best, dist[best]

    a, _ = far(start)
    return far(a)[1]


def verify_decomposition(g: Graph, nd: NetworkDecomposition, *, weak: bool = False) -> Report:
    """Check a decomposition against its own declared bounds.

    Checks: the member sets partition V; every tree uses edges of G, is a tree,
    contains its center and members and has diameter at most the bound; colors
    lie in 1..color_bound; adjacent members of distinct clusters differ in
    color; every node lies in at most ``congestion`` trees per color.

    Args:
        g: the base graph.
        nd: the artifact.
        weak: also report the largest weak (in-G) member diameter.

    Returns:
        A :class:`Report`; every violation names the offending nodes/clusters.
    """
    rep = Report()
    owner: dict[int, int] = {}
    ids = Counter(c.center for c in nd.clusters)
    for cid, cnt in ids.items():
        if cnt > 1:
            rep.add("duplicate-cluster-id", cluster=cid)
    for c in nd.clusters:
        for v in c.members:
            if v not in g:
                rep.add("unknown-node", cluster=c.center, node=v)
            elif v in owner:
                rep.add("overlap", node=v, clusters=[owner[v], c.center])
            else:
                owner[v] = c.center
    missing = [v for v in g.nodes if v not in owner]
    if missing:
        rep.add("uncovered", nodes=missing[:20], count=len(missing))

    max_diam = 0
    load: dict[tuple[int, Any], int] = defaultdict(int)
    for c in nd.clusters:
        edges = {(min(a, b), max(a, b)) for a, b in c.tree_edges}
        tadj: dict[int, set[int]] = defaultdict(set)
        for v in c.members:
            tadj[v]
        bad_edges = [e for e in edges if not g.has_edge(*e)]
        if bad_edges:
            rep.add("tree-edge-not-in-graph", cluster=c.center, edges=sorted(bad_edges)[:10])
        for a, b in edges:
            tadj[a].add(b)
            tadj[b].add(a)
        if c.center not in c.members:
            rep.add("center-not-member", cluster=c.center)
        root = c.center if c.center in tadj else min(tadj, default=None)
        if root is None:
            rep.add("empty-cluster", cluster=c.center)
            continue
        reach = distances_from(Graph(tadj, validate=False), root)
        if len(reach) != len(tadj):
            rep.add("tree-disconnected", cluster=c.center,
                    unreachable=sorted(set(tadj) - set(reach))[:10])
        elif len(edges) != len(tadj) - 1:
            rep.add("tree-has-cycle", cluster=c.center)
        else:
            diam = _tree_diameter(tadj, root)
            max_diam = max(max_diam, diam)
            if diam > nd.diameter_bound:
                rep.add("diameter", cluster=c.center, diameter=diam, bound=nd.diameter_bound)
        if not (isinstance(c.color, int) and 1 <= c.color <= nd.color_bound):
            rep.add("color-range", cluster=c.center, color=c.color, bound=nd.color_bound)
        for v in tadj:
            load[(v, c.color)] += 1

    for (v, col), cnt in sorted(load.items(), key=lambda t: (t[0][0], str(t[0][1]))):
        if cnt > nd.congestion:
            rep.add("congestion", node=v, color=col, trees=cnt, bound=nd.congestion)

    color_of = {c.center: c.color for c in nd.clusters}
    for u, v in g.edges():
        cu, cv = owner.get(u), owner.get(v)
        if cu is not None and cv is not None and cu != cv and color_of[cu] == color_of[cv]:
            rep.add("color-conflict", edge=[u, v], clusters=[cu, cv], color=color_of[cu])

    rep.stats = {
        "clusters": len(nd.clusters),
        "colors_used": len({c.color for c in nd.clusters}),
        "max_tree_diameter": max_diam,
        "max_congestion": max(load.values(), default=0),
    }
    if weak:
        wd = 0
        for c in nd.clusters:
            for v in c.members:
                d = distances_from(g, v)
                wd = max(wd, max((d.get(u, 0) for u in c.members), default=0))
        rep.stats["max_weak_diameter"] = wd
    return rep


def verify_ruling(g: Graph, U: Iterable[int], S: Iterable[int], alpha: int, beta: int) -> Report:
    """Exact check that S is an (alpha, beta)-ruling set for U."""
    U, S = set(U), set(S)
    rep = Report()
    if not S <= U:
        rep.add("not-subset", nodes=sorted(S - U)[:20])
    for s in sorted(S):
        near = distances_from(g, s, alpha - 1)
        close = sorted(t for t in near if t in S and t != s and t > s)
        for t in close:
            rep.add("independence", pair=[s, t], distance=near[t], alpha=alpha)
    if U:
        if not S:
            rep.add("domination", nodes=sorted(U)[:20], beta=beta)
        else:
            dist = bfs_distances(g, S)
            far = sorted(u for u in U if dist[u][0] > beta)
            if far:
                rep.add("domination", nodes=far[:20], count=len(far), beta=beta)
            rep.stats["max_domination"] = max(dist[u][0] for u in U)
    rep.stats["size"] = len(S)
    return rep


def verify_splitting(adj: Mapping[int, Iterable[int]], coloring: Mapping[int, Any]) -> Report:
    """Every left node must see both colors among its neighbors."""
    rep = Report()
    bad = []
    for u, nb in adj.items():
        cols = {coloring.get(v) for v in nb}
        if not {"red", "blue"} <= cols:
            bad.append(u)
    if bad:
        rep.add("monochromatic", nodes=bad[:20], count=len(bad))
    rep.stats["failed_left"] = len(bad)
    return rep


# ---------------------------------------------------------------------------
# local checkability

POISON = "poison"
ORPHAN = -1


def encode_decomposition(g: Graph, nd: NetworkDecomposition) -> dict[int, Any]:
    """Per-node outputs x_v describing a decomposition.

    x_v = {"cluster": c, "color": col, "trees": {center: (color, parent, depth, tree_nbrs)}}
    with parent None at a root and ``ORPHAN`` for tree nodes cut off from the
    root.  Nodes the format cannot describe (two clusters, clashing cluster
    IDs) get ``POISON``.
    """
    x: dict[int, Any] = {v: {"cluster": None, "color": None, "trees": {}} for v in g.nodes}
    poisoned: set[int] = set()
    seen_ids: dict[int, int] = {}
    for c in nd.clusters:
        seen_ids[c.center] = seen_ids.get(c.center, 0) + 1
    for c in nd.clusters:
        nodes = set(c.members)
        tadj: dict[int, set[int]] = defaultdict(set)
        for a, b in c.tree_edges:
            if a == b:
                continue
            tadj[a].add(b)
            tadj[b].add(a)
            nodes.update((a, b))
        if seen_ids[c.center] > 1:
            poisoned.update(v for v in nodes if v in x)
            continue
        for v in c.members:
            if v not in x:
                continue
            if x[v]["cluster"] is not None:
                poisoned.add(v)
            x[v]["cluster"] = c.center
            x[v]["color"] = c.color
        parent: dict[int, Any] = {}
        depth: dict[int, int] = {}
        if c.center in nodes:
            parent[c.center], depth[c.center] = None, 0
            frontier = [c.center]
            while frontier:
                nxt = []
                for v in frontier:
                    for u in sorted(tadj[v]):
                        if u not in parent:
                            parent[u], depth[u] = v, depth[v] + 1
                            nxt.append(u)
                frontier = nxt
        for v in nodes:
            if v not in x:
                continue
            entry = (c.color, parent.get(v, ORPHAN), depth.get(v, -1), tuple(sorted(tadj[v])))
            x[v]["trees"][c.center] = entry
    for v in poisoned:
        x[v] = POISON
    return x


class DecompositionChecker(NodeProgram):
    """Distributed checker for :func:`encode_decomposition` outputs.

    Round 1: every node sees its neighbors' x and checks the local rules
    (parent/depth consistency, tree-neighbor consistency, color range,
    conflicts, per-color load).  Then tree heights are convergecast; every
    node checks that its two deepest branches sum to at most D.  A node still
    waiting on a child at round D + 2 says no.  Contract radius: D + 3.
    """

    name = "decomposition-checker"

    def __init__(self, diameter_bound: int, color_bound: int, kappa: int):
        self.D = diameter_bound
        self.color_bound = color_bound
        self.kappa = kappa

    @property
    def radius(self) -> int:
        return self.D + 3

    def init(self, ctx):
        # wake at round 1 even without neighbors
        return Step(state={"x": ctx.input}, broadcast=ctx.input, wake=1)

    def _local(self, v, x, nbr_x, neighbors) -> tuple[bool, dict]:
        ok = True
        children: dict[int, set[int]] = {}
        if x == POISON or not isinstance(x, dict) or x.get("cluster") is None:
            return False, {}
        c, col = x["cluster"], x["color"]
        trees = x["trees"]
        if not (isinstance(col, int) and not isinstance(col, bool) and 1 <= col <= self.color_bound):
            ok = False
        if c not in trees or trees[c][0] != col:
            ok = False
        per_color = Counter(entry[0] for entry in trees.values())
        if per_color and max(per_color.values()) > self.kappa:
            ok = False
        nset = set(neighbors)
        for tc, (tcol, parent, depth, tnbrs) in trees.items():
            kids = set()
            for u in neighbors:
                xu = nbr_x.get(u)
                if isinstance(xu, dict) and tc in xu["trees"] and xu["trees"][tc][1] == v:
                    kids.add(u)
            children[tc] = kids
            if parent == ORPHAN:
                ok = False
                continue
            if parent is None:
                if depth != 0 or tc != v or c != v:
                    ok = False
            else:
                xp = nbr_x.get(parent)
                if parent not in nset or not isinstance(xp, dict) or tc not in xp["trees"]:
                    ok = False
                else:
                    pcol, _, pdepth, _ = xp["trees"][tc]
                    if pdepth != depth - 1 or pcol != tcol:
                        ok = False
            expect = kids | ({parent} if parent is not None else set())
            if set(tnbrs) != expect:
                ok = False
        for u in neighbors:
            xu = nbr_x.get(u)
            if isinstance(xu, dict) and xu.get("cluster") not in (None, c) and xu.get("color") == col:
                ok = False
        return ok, children

    def step(self, ctx, state, inbox, rnd):
        if rnd == 1 and "ok" not in state:
            ok, children = self._local(ctx.node, state["x"], inbox, ctx.neighbors)
            state.update(ok=ok, children=children, heights={tc: {} for tc in children},
                         done=set())
            deadline = self.D + 2
            state["deadline"] = deadline
            return self._advance(ctx, state, rnd, first=True)
        if "ok" not in state:
            return Step(state=state)
        for u, msg in inbox.items():
            if isinstance(msg, list):
                for tc, h in msg:
                    if tc in state["heights"]:
                        state["heights"][tc][u] = h
        return self._advance(ctx, state, rnd)

    def _advance(self, ctx, state, rnd, first=False):
        x = state["x"]
        send: dict[int, list] = {}
        for tc, kids in state["children"].items():
            if tc in state["done"]:
                continue
            got = state["heights"][tc]
            if set(got) >= kids:
                branch = sorted((h + 1 for h in got.values()), reverse=True)
                if sum(branch[:2]) > self.D:
                    state["ok"] = False
                state["done"].add(tc)
                parent = x["trees"][tc][1]
                if parent is not None and parent != ORPHAN and parent in ctx.neighbors:
                    send.setdefault(parent, []).append((tc, branch[0] if branch else 0))
        finished = state["done"] >= set(state["children"])
        if finished:
            return Step(state=state, send=send or None, halt=True, output=bool(state["ok"]))
        if rnd >= state["deadline"]:
            return Step(state=state, send=send or None, halt=True, output=False)
        return Step(state=state, send=send or None, wake=state["deadline"] if first else None)


@dataclass
class LocalCheckResult:
    per_node: dict
    all_yes: bool
    trace: SimTrace

    @property
    def no_nodes(self) -> list[int]:
        return sorted(v for v, ok in self.per_node.items() if not ok)


def local_check(g: Graph, outputs: Mapping[int, Any], checker: NodeProgram, d: int,
                n: int | None = None) -> LocalCheckResult:
    """Run a distributed checker and enforce its d-round contract.

    Args:
        g: the graph.
        outputs: per-node values x_v handed to the checker as input.
        checker: a node program outputting True/False per node.
        d: declared checking radius.
        n: node count exposed to the checker (defaults to |V|).

    Raises:
        ContractViolation: the checker needed more than d rounds.
    """
    if d < 1:
        raise ParameterError("d must be >= 1")
    params = Params(n=max(1, n if n is not None else g.n))
    try:
        trace = run_sync(checker, g, outputs, round_cap=d, params=params)
    except SimTimeout as exc:
        raise ContractViolation(f"checker did not finish within {d} rounds") from exc
    if max(trace.rounds_executed, trace.last_round) > d:
        raise ContractViolation(f"checker used {trace.last_round} rounds, contract is {d}")
    per_node = {v: bool(trace.outputs.get(v)) for v in g.nodes}
    return LocalCheckResult(per_node, all(per_node.values()), trace)


def check_decomposition_locally(g: Graph, nd: NetworkDecomposition) -> LocalCheckResult:
    checker = DecompositionChecker(nd.diameter_bound, nd.color_bound, nd.congestion)
    return local_check(g, encode_decomposition(g, nd), checker, checker.radius)
