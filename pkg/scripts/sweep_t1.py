"""Sweep the first parameter of an integral and write a CSV of the values.

A thin wrapper around ``ellbeta sweep`` that fills in a radial sweep for a
sampled parameter set:

    python scripts/sweep_t1.py --family cn --n 2 --steps 20 --out sweep.csv
"""

import argparse
import json
import os
import sys
import tempfile

from ellbeta.cli import main as cli_main


def main():
    ap = argparse.ArgumentParser(description="t1 sweep")
    ap.add_argument("--family", default="univariate")
    ap.add_argument("--n", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--steps", type=int, default=20)
    ap.add_argument("--start", type=float)
    ap.add_argument("--stop", type=float)
    ap.add_argument("--out")
    args = ap.parse_args()
    sweep = {"steps": args.steps}
    if args.start is not None:
        sweep["start"] = args.start
    if args.stop is not None:
        sweep["stop"] = args.stop
    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
        json.dump({"family": args.family, "n": args.n, "seed": args.seed, "sweep": sweep}, fh)
    argv = ["sweep", "--config", fh.name]
    if args.out:
        argv += ["--out", args.out]
    try:
        return cli_main(argv)
    finally:
        os.unlink(fh.name)


if __name__ == "__main__":
    sys.exit(main())
