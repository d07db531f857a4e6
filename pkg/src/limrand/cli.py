"""Command line: ``python -m limrand <subcommand>``."""

from __future__ import annotations

import argparse
import json
import sys

from .algorithms.derandomize import brute_force_derandomize
from .algorithms.programs import (FloodMin, HaltWithId, RandomEdgeColoring, component_minimum,
                                  matching_family, outputs_are_ids, proper_two_coloring)
from .decomposition import NetworkDecomposition
from .errors import ParameterError
from .graph import FAMILIES, generate, read_edgelist, write_edgelist
from .harness import ExperimentConfig, parse_value, run_experiment, sweep
from .randomness import KWiseTape, dump_tape, field_degree, load_tape, seed_to_bits
from .verify import check_decomposition_locally, verify_decomposition

PROGRAMS = {
    "edge-coloring": (RandomEdgeColoring, proper_two_coloring),
    "halt-with-id": (HaltWithId, outputs_are_ids),
    "flood-min": (FloodMin, component_minimum),
}


def _kv(items: list[str]) -> dict:
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ParameterError(f"expected KEY=VALUE, got {item!r}")
        out[key] = parse_value(value)
    return out


def _load_config(args) -> ExperimentConfig:
    d = {}
    if args.config:
        with open(args.config) as fh:
            d = json.load(fh)
    cfg = ExperimentConfig.from_dict(d)
    over = _kv(args.set)
    if args.seed is not None:
        over["base_seed"] = int(args.seed, 0)
    if args.trials is not None:
        over["trials"] = args.trials
    if args.out is not None:
        over["out"] = args.out
    return cfg.override(**over) if over else cfg


def cmd_generate(args) -> int:
    g = generate(args.family, args.n, _kv(args.param), int(args.seed, 0), id_c=args.id_c, ids=args.ids)
    if args.out:
        with open(args.out, "w") as fh:
            write_edgelist(g, fh)
    else:
        sys.stdout.write(write_edgelist(g))
    return 0


def _summary(rep) -> dict:
    a = rep.aggregate
    return {"name": a["name"], "trials": a["trials"], "categories": a["categories"],
            "success_rate": a["success_rate"], "wilson95": a["wilson95"]}


def cmd_run(args) -> int:
    rep = run_experiment(_load_config(args))
    print(json.dumps(_summary(rep), sort_keys=True))
    return 1 if args.strict and rep.aggregate["categories"]["invalid-artifact"] else 0


def cmd_sweep(args) -> int:
    values = [parse_value(v) for v in args.values.split(",")] if args.values else []
    reports = sweep(_load_config(args), args.axis, values)
    for v, rep in zip(values, reports):
        print(json.dumps({args.axis: v, **_summary(rep)}, sort_keys=True))
    bad = any(r.aggregate["categories"]["invalid-artifact"] for r in reports)
    return 1 if args.strict and bad else 0


def cmd_verify(args) -> int:
    g = read_edgelist(args.graph)
    with open(args.artifact) as fh:
        nd = NetworkDecomposition.from_dict(json.load(fh))
    rep = verify_decomposition(g, nd)
    out = rep.to_dict()
    if args.local:
        lc = check_decomposition_locally(g, nd)
        out["local"] = {"all_yes": lc.all_yes, "no_nodes": lc.no_nodes}
    print(json.dumps(out, sort_keys=True, default=list))
    return 0 if rep.valid else 1


def cmd_derandomize(args) -> int:
    program_cls, checker = PROGRAMS[args.program]
    family = matching_family(args.max_nodes, args.id_range)
    res = brute_force_derandomize(family, program_cls(), checker, args.bits, max_runs=args.max_runs,
                                  full_counts=args.full_counts)
    out = res.to_dict()
    out["family_size"] = len(family)
    if not args.verbose:
        out.pop("per_seed_failures")
        out.pop("per_graph_failures")
    print(json.dumps(out, sort_keys=True))
    return 1 if res.exhausted else 0


def cmd_tape(args) -> int:
    if args.show:
        with open(args.show) as fh:
            header, bits = load_tape(fh.read())
        print(json.dumps({**header, "ones": int(bits.sum())}, sort_keys=True))
        return 0
    if args.mode == "shared":
        bits = seed_to_bits(args.seed, args.length)
        k = None
    else:
        m = field_degree(args.length)
        tape = KWiseTape(seed_to_bits(args.seed, args.k * m), args.k, m)
        bits = tape.bits(range(args.length))
        k = args.k
    text = dump_tape(bits, args.mode, k)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="limrand", description="Limited-randomness network decomposition toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a random graph as an edge list")
    g.add_argument("--family", choices=FAMILIES, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--param", action="append", metavar="KEY=VALUE", help="family parameter, e.g. p=0.02")
    g.add_argument("--seed", default="0")
    g.add_argument("--ids", choices=("random", "sequential"), default="random")
    g.add_argument("--id-c", type=int, default=3)
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    for name, func, helptext in (("run", cmd_run, "run one experiment"),
                                 ("sweep", cmd_sweep, "run an experiment per value of one field")):
        r = sub.add_parser(name, help=helptext)
        r.add_argument("--config", help="JSON experiment config")
        r.add_argument("--seed", help="base seed (decimal or 0x hex)")
        r.add_argument("--trials", type=int)
        r.add_argument("--out", help="output directory")
        r.add_argument("--set", action="append", metavar="PATH=VALUE",
                       help="override a config field by dotted path, e.g. algo_params.h=8")
        r.add_argument("--strict", action="store_true", help="exit 1 if any trial is invalid-artifact")
        if name == "sweep":
            r.add_argument("--axis", required=True, help="dotted config field")
            r.add_argument("--values", required=True, help="comma-separated values")
        r.set_defaults(func=func)

    v = sub.add_parser("verify", help="check a decomposition artifact against a graph")
    v.add_argument("--graph", required=True)
    v.add_argument("--artifact", required=True)
    v.add_argument("--local", action="store_true", help="also run the distributed checker")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("derandomize", help="exhaustive seed search over the small matching family")
    d.add_argument("--program", choices=sorted(PROGRAMS), default="edge-coloring")
    d.add_argument("--bits", type=int, default=12)
    d.add_argument("--max-nodes", type=int, default=3)
    d.add_argument("--id-range", type=int, default=9)
    d.add_argument("--max-runs", type=int, default=2 ** 22)
    d.add_argument("--full-counts", action="store_true")
    d.add_argument("--verbose", action="store_true", help="include failure counts")
    d.set_defaults(func=cmd_derandomize)

    t = sub.add_parser("tape", help="dump a random tape, or describe a dumped one")
    t.add_argument("--mode", choices=("shared", "kwise"), default="shared")
    t.add_argument("--seed", default="00", help="hex seed")
    t.add_argument("--length", type=int, default=1024)
    t.add_argument("--k", type=int, default=2)
    t.add_argument("--out")
    t.add_argument("--show", metavar="FILE")
    t.set_defaults(func=cmd_tape)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
