"""Monte-Carlo experiment runner.

A run is described by one JSON document (:class:`ExperimentConfig`).  Trial
``i`` uses seed ``base_seed + i`` for its randomness and, unless a fixed graph
pool is configured, for its graph too.  Every output is checked by the
verifiers; the producer's own success flag is never used.  Each trial lands
in exactly one category: valid, invalid-artifact, timeout or budget-exhausted.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import os
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
from scipy.stats import binomtest

from .algorithms.ballcarving import elkin_neiman
from .algorithms.onebit import decompose_one_bit, decompose_one_bit_strong
from .algorithms.ruling import ruling_set
from .algorithms.shared import shared_rand_decompose
from .algorithms.shatter import shatter_decompose
from .algorithms.splitting import split, split_tape
from .engine import inflate_n
from .errors import BudgetError, ParameterError, SimTimeout
from .graph import Graph, generate, random_bipartite, write_edgelist
from .params import Params, clog2
from .randomness import SparseSource, make_source, place_sparse
from .verify import verify_decomposition, verify_ruling, verify_splitting

CATEGORIES = ("valid", "invalid-artifact", "timeout", "budget-exhausted")

CSV_COLUMNS = (
    "trial", "seed", "graph_seed", "family", "n", "N", "category", "valid",
    "colors_used", "color_bound", "clusters", "max_tree_diameter", "diameter_bound",
    "max_congestion", "rounds", "max_message_bits", "congest_ok", "random_bits",
    "ruling_size", "failed_left", "vbar_size", "s_size", "separated_size",
    "fallback_clusters", "violations",
)

QUANTILE_FIELDS = ("colors_used", "max_tree_diameter", "rounds", "max_message_bits",
                   "random_bits", "s_size", "failed_left")


@dataclass
class ExperimentConfig:
    """One experiment.

    Attributes:
        algorithm: one of :data:`ALGORITHMS`.
        family: graph family, or a list cycled by trial index.
        n: node count, or a list cycled by trial index.
        family_params: e.g. ``{"p": 0.02}`` for gnp.
        ids: "random" (injection into {1..n^id_c}) or "sequential".
        base_seed: trial i uses seed base_seed + i.
        trials: number of trials (>= 1).
        graph_seed: if set, graphs come from a fixed pool seeded
            graph_seed + (i mod graph_pool) instead of the trial seed.
        graph_pool: size of that pool.
        constants: overrides for :class:`~limrand.params.Params`.
        algo_params: algorithm arguments (alpha, beta, beta_factor, h, T, k,
            gather_k, phases, left, right, degree, c_min, simulate).
        randomness: ``{"mode": ...}`` plus source options; ``mode`` "default"
            picks the algorithm's natural source, "zero" an all-zero tape.
        budget: random-bit budget; exceeding it is budget-exhausted.
        virtual_N: node count the nodes are told (inflation), >= n.
        round_cap: trials needing more rounds count as timeout.
        congest_B: CONGEST audit multiplier (messages <= B * ceil(log2 n)).
        artifacts: "none", "invalid" or "all" decomposition JSON dumps.
        out: output directory (None: keep in memory).
        name: label stored in the aggregate.
    """

    algorithm: str = "elkin_neiman"
    family: Any = "gnp"
    n: Any = 64
    family_params: dict = field(default_factory=dict)
    ids: str = "random"
    base_seed: int = 0
    trials: int = 1
    graph_seed: int | None = None
    graph_pool: int = 1
    constants: dict = field(default_factory=dict)
    algo_params: dict = field(default_factory=dict)
    randomness: dict = field(default_factory=lambda: {"mode": "default"})
    budget: int | None = None
    virtual_N: int | None = None
    round_cap: int = 10 ** 9
    congest_B: int = 16
    artifacts: str = "invalid"
    out: str | None = None
    name: str = "experiment"

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.trials < 1:
            raise ParameterError("trials must be >= 1")
        if self.algorithm not in ALGORITHMS:
            raise ParameterError(f"unknown algorithm {self.algorithm!r}; choose from {sorted(ALGORITHMS)}")
        if self.graph_pool < 1:
            raise ParameterError("graph_pool must be >= 1")
        if self.artifacts not in ("none", "invalid", "all"):
            raise ParameterError("artifacts must be none, invalid or all")
        known = {f.name for f in dataclasses.fields(Params)} - {"n"}
        bad = set(self.constants) - known
        if bad:
            raise ParameterError(f"unknown constants: {sorted(bad)}")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        bad = set(d) - known
        if bad:
            raise ParameterError(f"unknown config fields: {sorted(bad)}")
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls.from_dict(json.loads(text))

    def override(self, **dotted) -> "ExperimentConfig":
        """Copy with fields replaced by dotted path, e.g. ``{"algo_params.h": 8}``."""
        d = self.to_dict()
        for path, value in dotted.items():
            set_dotted(d, path, value)
        return ExperimentConfig.from_dict(d)


def set_dotted(d: dict, path: str, value) -> None:
    keys = path.split(".")
    cur = d
    for k in keys[:-1]:
        nxt = cur.get(k)
        if nxt is None:
            nxt = cur[k] = {}
        if not isinstance(nxt, dict):
            raise ParameterError(f"{path}: {k} is not a mapping")
        cur = nxt
    cur[keys[-1]] = value


def parse_value(text: str):
    """CLI override values are JSON when they parse as JSON, plain strings otherwise."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


# ---------------------------------------------------------------------------
# per-algorithm trial bodies; each returns (row fields, verifier report, artifact)


def _pick(value, i):
    return value[i % len(value)] if isinstance(value, (list, tuple)) else value


def _source(cfg: ExperimentConfig, seed: int, default: str, params: Params):
    opts = dict(cfg.randomness)
    mode = opts.pop("mode", "default")
    if mode == "default":
        mode = default
    if mode == "zero":
        return make_source("shared", seed, constant=0, tape_bits=opts.get("tape_bits"))
    if mode == "kwise":
        opts.setdefault("k", params.kwise_k)
        opts.setdefault("id_space", params.id_space)
    return make_source(mode, seed, **opts)


def _decomposition_row(g: Graph, nd) -> tuple[dict, Any]:
    rep = verify_decomposition(g, nd)
    row = {"colors_used": nd.colors_used(), "color_bound": nd.color_bound,
           "clusters": len(nd.clusters), "max_tree_diameter": rep.stats.get("max_tree_diameter", ""),
           "diameter_bound": nd.diameter_bound, "max_congestion": rep.stats.get("max_congestion", ""),
           "rounds": nd.rounds, "max_message_bits": nd.max_message_bits,
           "random_bits": nd.random_bits}
    return row, rep


def _run_ruling(cfg, g, params, seed):
    ap = cfg.algo_params
    alpha = int(ap.get("alpha", 2))
    rs = ruling_set(g, g.nodes, alpha, params, simulate=bool(ap.get("simulate", True)))
    # check against a caller-chosen beta (absolute, or a multiple of L) instead of the guarantee
    beta = int(ap["beta"]) if "beta" in ap else rs.beta
    if "beta_factor" in ap:
        beta = int(ap["beta_factor"]) * params.L
    rep = verify_ruling(g, g.nodes, rs.nodes, alpha, beta)
    row = {"rounds": rs.rounds, "max_message_bits": rs.max_message_bits, "random_bits": 0,
           "ruling_size": len(rs.nodes)}
    return row, rep, None


def _run_elkin_neiman(cfg, g, params, seed):
    rand = _source(cfg, seed, "full", params)
    nd = elkin_neiman(g, rand, params, phases=cfg.algo_params.get("phases"))
    row, rep = _decomposition_row(g, nd)
    return row, rep, nd


def _run_shared(cfg, g, params, seed):
    opts = {"mode": "shared", "tape_bits": 10 ** 6, **cfg.randomness}
    if opts["mode"] == "default":
        opts["mode"] = "shared"
    rand = _source(dataclasses.replace(cfg, randomness=opts), seed, "shared", params)
    nd = shared_rand_decompose(g, rand, params)
    row, rep = _decomposition_row(g, nd)
    return row, rep, nd


def _sparse(cfg, g, seed):
    h = int(cfg.algo_params.get("h", 1))
    return SparseSource(place_sparse(g, h, seed), h, seed)


def _run_one_bit(cfg, g, params, seed):
    ap = cfg.algo_params
    nd = decompose_one_bit(g, _sparse(cfg, g, seed), params, simulate=bool(ap.get("simulate", False)),
                           k=ap.get("k"))
    row, rep = _decomposition_row(g, nd)
    return row, rep, nd


def _run_one_bit_strong(cfg, g, params, seed):
    ap = cfg.algo_params
    nd = decompose_one_bit_strong(g, _sparse(cfg, g, seed), params,
                                  simulate=bool(ap.get("simulate", False)), gather_k=ap.get("gather_k"))
    row, rep = _decomposition_row(g, nd)
    return row, rep, nd


def _run_shatter(cfg, g, params, seed):
    ap = cfg.algo_params
    T = int(ap.get("T", params.L))
    rand = _source(cfg, seed, "full", params)
    nd = shatter_decompose(g, T, rand, params, simulate=bool(ap.get("simulate", False)))
    row, rep = _decomposition_row(g, nd)
    r = nd.report
    row.update(vbar_size=r.vbar_size, s_size=r.s_size, separated_size=r.separated_size,
               fallback_clusters=r.fallback_clusters)
    return row, rep, nd


ALGORITHMS: dict[str, Callable] = {
    "ruling": _run_ruling,
    "elkin_neiman": _run_elkin_neiman,
    "shared": _run_shared,
    "one_bit": _run_one_bit,
    "one_bit_strong": _run_one_bit_strong,
    "shatter": _run_shatter,
    "split": None,  # bipartite instances; handled in _trial
}


def _trial(cfg: ExperimentConfig, i: int) -> tuple[dict, Any, Graph | None]:
    seed = cfg.base_seed + i
    gseed = seed if cfg.graph_seed is None else cfg.graph_seed + i % cfg.graph_pool
    family = _pick(cfg.family, i)
    row = {c: "" for c in CSV_COLUMNS}
    row.update(trial=i, seed=seed, graph_seed=gseed, family=family)
    artifact = g = None
    try:
        if cfg.algorithm == "split":
            ap = cfg.algo_params
            bip = random_bipartite(int(ap.get("left", 200)), int(ap.get("right", 400)),
                                   int(ap.get("degree", 64)), gseed)
            params = _params(cfg, bip.n)
            res = split(bip, split_tape(seed, bip, params), params,
                        c_min=float(ap.get("c_min", 1.0)), simulate=bool(ap.get("simulate", True)))
            rep = verify_splitting(bip.adj, res.coloring)
            row.update(n=bip.n, N=params.n, rounds=res.rounds, random_bits=res.random_bits,
                       failed_left=len(res.failed_left), max_message_bits=0)
        else:
            n = int(_pick(cfg.n, i))
            params = _params(cfg, n)
            g = generate(family, n, cfg.family_params, gseed, id_c=params.id_c, ids=cfg.ids)
            fields, rep, artifact = ALGORITHMS[cfg.algorithm](cfg, g, params, seed)
            row.update(fields, n=n, N=params.n)
        category = "valid" if rep.valid else "invalid-artifact"
        row["violations"] = ";".join(sorted(rep.kinds()))
        if isinstance(row["rounds"], int) and row["rounds"] > cfg.round_cap:
            category = "timeout"
        elif cfg.budget is not None and isinstance(row["random_bits"], int) and row["random_bits"] > cfg.budget:
            category = "budget-exhausted"
        if isinstance(row["max_message_bits"], int):
            row["congest_ok"] = int(row["max_message_bits"] <= cfg.congest_B * clog2(max(params.n, 2)))
    except SimTimeout:
        category = "timeout"
    except BudgetError:
        category = "budget-exhausted"
    row["category"] = category
    row["valid"] = int(category == "valid")
    return row, artifact, g


def _params(cfg: ExperimentConfig, n: int) -> Params:
    params = Params(n=n, **cfg.constants)
    if cfg.virtual_N is not None:
        params = inflate_n(params, n, int(cfg.virtual_N))
    return params


# ---------------------------------------------------------------------------


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    records: list
    aggregate: dict

    @property
    def success_rate(self) -> float:
        return self.aggregate["success_rate"]

    def column(self, name: str) -> list:
        return [r[name] for r in self.records]

    def to_csv(self, extra: dict | None = None) -> str:
        buf = io.StringIO()
        cols = list(extra or {}) + list(CSV_COLUMNS)
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for r in self.records:
            w.writerow({**(extra or {}), **r})
        return buf.getvalue()

    def write(self, out: str) -> None:
        os.makedirs(out, exist_ok=True)
        with open(os.path.join(out, "trials.csv"), "w", newline="") as fh:
            fh.write(self.to_csv())
        with open(os.path.join(out, "aggregate.json"), "w") as fh:
            json.dump(self.aggregate, fh, sort_keys=True, indent=2)
            fh.write("\n")


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    ci = binomtest(successes, trials).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)


def _quantiles(values: list) -> dict | None:
    vals = [v for v in values if isinstance(v, (int, float)) and not isinstance(v, bool)]
    if not vals:
        return None
    a = np.asarray(vals, dtype=float)
    return {"min": float(a.min()), "p50": float(np.quantile(a, 0.5)),
            "p95": float(np.quantile(a, 0.95)), "max": float(a.max()), "mean": round(float(a.mean()), 9)}


def _aggregate(cfg: ExperimentConfig, records: list) -> dict:
    counts = {c: 0 for c in CATEGORIES}
    for r in records:
        counts[r["category"]] += 1
    k, t = counts["valid"], len(records)
    lo, hi = wilson_interval(k, t)
    first_n = records[0]["n"] if records and records[0]["n"] != "" else (cfg.n if isinstance(cfg.n, int) else 1)
    constants = _params(cfg, int(first_n)).to_dict()
    return {
        "name": cfg.name,
        "config": cfg.to_dict(),
        "constants": constants,
        "seed_range": [cfg.base_seed, cfg.base_seed + cfg.trials - 1],
        "trials": t,
        "categories": counts,
        "success_rate": k / t,
        "wilson95": [lo, hi],
        "failure_rate": 1 - k / t,
        "quantiles": {f: q for f in QUANTILE_FIELDS if (q := _quantiles([r[f] for r in records]))},
    }


def run_experiment(cfg: ExperimentConfig, progress: Callable[[int], None] | None = None) -> ExperimentReport:
    """Run every trial, verify it and aggregate.

    Output is a deterministic function of ``cfg``.  With ``cfg.out`` set,
    writes trials.csv, aggregate.json and artifacts/trial-<i>.json.
    """
    cfg.validate()
    records = []
    art_dir = os.path.join(cfg.out, "artifacts") if cfg.out else None
    for i in range(cfg.trials):
        row, artifact, graph = _trial(cfg, i)
        records.append(row)
        keep = cfg.artifacts == "all" or (cfg.artifacts == "invalid" and row["category"] != "valid")
        if art_dir and artifact is not None and keep:
            os.makedirs(art_dir, exist_ok=True)
            with open(os.path.join(art_dir, f"trial-{i}.json"), "w") as fh:
                fh.write(artifact.to_json() + "\n")
            with open(os.path.join(art_dir, f"trial-{i}.graph.txt"), "w") as fh:
                write_edgelist(graph, fh)
        if progress:
            progress(i)
    report = ExperimentReport(cfg, records, _aggregate(cfg, records))
    if cfg.out:
        report.write(cfg.out)
    return report


def sweep(cfg: ExperimentConfig, axis: str, values: Sequence) -> list[ExperimentReport]:
    """One report per value of the dotted config field ``axis``.

    With ``cfg.out`` set, each report goes to ``out/<axis>=<value>/`` and a
    combined ``out/sweep.csv`` gains a leading axis column.
    """
    values = list(values)
    if not values:
        raise ParameterError("sweep needs at least one value")
    reports = []
    for v in values:
        sub_out = os.path.join(cfg.out, f"{axis}={v}") if cfg.out else None
        reports.append(run_experiment(cfg.override(**{axis: v, "out": sub_out})))
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        with open(os.path.join(cfg.out, "sweep.csv"), "w", newline="") as fh:
            for j, (v, rep) in enumerate(zip(values, reports)):
                text = rep.to_csv(extra={axis: v})
                fh.write(text if j == 0 else text.split("\n", 1)[1])
    return reports
