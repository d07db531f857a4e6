"""Run every bundled experiment config and print one summary line each.

Usage: python scripts/run_all.py --out results [--only shared,split]
"""

from __future__ import annotations

import argparse
import glob
import json
import os
import time

from limrand.harness import ExperimentConfig, run_experiment, sweep

SWEEPS = {"strong": ("algo_params.h", [2, 8, 32]), "inflation": ("virtual_N", [16, 256, 4096]),
          "ruling": ("algo_params.alpha", [2, 4, 8])}


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="results")
    p.add_argument("--only", help="comma-separated config names")
    args = p.parse_args()
    here = os.path.join(os.path.dirname(__file__), "configs")
    only = set(args.only.split(",")) if args.only else None
    for path in sorted(glob.glob(os.path.join(here, "*.json"))):
        name = os.path.splitext(os.path.basename(path))[0]
        if only and name not in only:
            continue
        with open(path) as fh:
            cfg = ExperimentConfig.from_dict(json.load(fh)).override(out=os.path.join(args.out, name))
        t = time.time()
        if name in SWEEPS:
            axis, values = SWEEPS[name]
            if name == "ruling":
                # the checked beta follows alpha
                reps = [run_experiment(cfg.override(**{axis: a, "algo_params.beta_factor": a,
                                                       "out": os.path.join(cfg.out, f"{axis}={a}")}))
                        for a in values]
            else:
                reps = sweep(cfg, axis, values)
            for v, rep in zip(values, reps):
                print(f"{name} {axis}={v}: success {rep.success_rate:.3f} "
                      f"wilson95 {rep.aggregate['wilson95']}")
        else:
            rep = run_experiment(cfg)
            print(f"{name}: success {rep.success_rate:.3f} wilson95 {rep.aggregate['wilson95']}")
        print(f"  ({time.time() - t:.1f}s, written to {cfg.out})")


if __name__ == "__main__":
    main()
