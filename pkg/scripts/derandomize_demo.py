"""Exhaustive seed search for each bundled program; prints seed and run count.

Usage: python scripts/derandomize_demo.py --bits 12
"""

from __future__ import annotations

import argparse
import time

from limrand.algorithms.derandomize import brute_force_derandomize
from limrand.algorithms.programs import matching_family
from limrand.cli import PROGRAMS


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--bits", type=int, default=12)
    p.add_argument("--max-nodes", type=int, default=3)
    p.add_argument("--id-range", type=int, default=9)
    args = p.parse_args()
    family = matching_family(args.max_nodes, args.id_range)
    print(f"family: {len(family)} labeled graphs")
    for name, (program, checker) in sorted(PROGRAMS.items()):
        t = time.time()
        res = brute_force_derandomize(family, program(), checker, args.bits)
        print(f"{name}: seed {res.seed} exhausted {res.exhausted} runs {res.runs} ({time.time() - t:.2f}s)")


if __name__ == "__main__":
    main()
