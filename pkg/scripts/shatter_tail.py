"""Histogram of the ruling-set size |S| left by shattering, per T.

Usage: python scripts/shatter_tail.py --trials 200 --T 1 2 3
"""

from __future__ import annotations

import argparse
from collections import Counter

from limrand.harness import ExperimentConfig, run_experiment


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--p", type=float, default=0.02)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--T", type=int, nargs="+", default=[1, 2, 3])
    args = p.parse_args()
    for T in args.T:
        cfg = ExperimentConfig(algorithm="shatter", family="gnp", n=args.n, family_params={"p": args.p},
                               trials=args.trials, algo_params={"T": T})
        rep = run_experiment(cfg)
        sizes = Counter(rep.column("s_size"))
        vbar = Counter(rep.column("vbar_size"))
        print(f"T={T}: valid {rep.success_rate:.3f} |S| {dict(sorted(sizes.items()))} "
              f"mean |Vbar| {sum(k * v for k, v in vbar.items()) / args.trials:.1f}")


if __name__ == "__main__":
    main()
