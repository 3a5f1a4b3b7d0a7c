"""Run the benchmark matrix and write a CSV file.

Usage: python3 scripts/bench.py [--out bench.csv] [--n 10000,100000] [--epsilon 0.1,0.01]
Thin wrapper over ``qsummary bench`` that also writes the table to disk.
"""

import argparse
import io
import sys

from qsummary.cli import main as cli_main


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="bench.csv")
    ap.add_argument("--n", default="10000,100000")
    ap.add_argument("--epsilon", default="0.1,0.01")
    ap.add_argument("--order", default="random,sorted,reverse,sawtooth,duplicate-heavy")
    ap.add_argument("--algo", default="greedy,gk,wgreedy,wgk")
    ap.add_argument("--seed", default="1")
    args = ap.parse_args(argv)
    buf = io.StringIO()
    code = cli_main(["bench", "--n", args.n, "--epsilon", args.epsilon, "--order", args.order,
                     "--algo", args.algo, "--seed", args.seed], out=buf)
    with open(args.out, "w") as fh:
        fh.write(buf.getvalue())
    sys.stdout.write(buf.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
