"""Iterations, time and quality of every variant on the standard instance.

A thin wrapper over ``l0sr bench``; the table lands in ``<out>/bench.csv``.

    python scripts/bench_table.py --out results/bench
"""
import argparse
import sys

from l0sr.cli import main as cli_main


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/bench")
    ap.add_argument("--mu", default="0.005,0.01")
    args = ap.parse_args()
    return cli_main([
        "bench", "--input.pattern", "piecewise_constant_blocks",
        "--solver.variant", "aniso_l0,iso_l0,iso_tv_baseline",
        "--solver.mu", args.mu, "--output.dir", args.out,
    ])


if __name__ == "__main__":
    sys.exit(main())
