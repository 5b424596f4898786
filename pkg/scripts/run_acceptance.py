"""Run the acceptance suite and print one PASS/FAIL line per criterion.

    python scripts/run_acceptance.py [--workers N]
"""

import argparse
import os
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--workers", type=int, help="value of ELLBETA_WORKERS for the run")
    args = ap.parse_args()
    if args.workers is not None:
        os.environ["ELLBETA_WORKERS"] = str(args.workers)
    os.chdir(ROOT)
    return pytest.main(["tests/test_acceptance.py", "-q", "-p", "no:cacheprovider"])


if __name__ == "__main__":
    sys.exit(main())
