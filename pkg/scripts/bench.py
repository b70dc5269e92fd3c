"""Run the CLI ``bench`` subcommand over a few graph sizes.

    python3 scripts/bench.py --sizes 10000:50000 100000:500000 --k 20
"""
from __future__ import annotations

import argparse
import sys

from opinion_campaign.cli import main as cli_main


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", nargs="+", default=["10000:50000", "100000:500000"], help="n:m pairs")
    ap.add_argument("--k", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args(argv)
    worst = 0
    for size in a.sizes:
        n, m = size.split(":")
        worst = max(worst, cli_main(["bench", "--n", n, "--m", m, "--k", str(a.k), "--seed", str(a.seed)]))
    return worst


if __name__ == "__main__":
    sys.exit(main())
