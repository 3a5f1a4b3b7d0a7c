"""Post-flush summary size of the segment and greedy rules as the stream grows.

Usage: python3 scripts/space_trend.py [--epsilon 0.01] [--seeds 0,1,2] [--max-exp 6]
Prints CSV: n,seed,segment_size,greedy_size,greedy_over_segment
"""

import argparse
import sys
from fractions import Fraction

from qsummary.compaction import flush, process
from qsummary.core import new_summary
from qsummary.streams import StreamSpec, generate_arrays


def post_flush_size(algo, values, eps):
    s = new_summary(eps, algo, "paper")
    for v in values:
        process(s, v)
    flush(s)
    return s.size


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--epsilon", default="0.01")
    ap.add_argument("--seeds", default="0")
    ap.add_argument("--min-exp", type=int, default=3)
    ap.add_argument("--max-exp", type=int, default=6)
    args = ap.parse_args(argv)
    eps = Fraction(args.epsilon)
    print("n,seed,segment_size,greedy_size,greedy_over_segment")
    for exp in range(args.min_exp, args.max_exp + 1):
        n = 10**exp
        for seed in (int(x) for x in args.seeds.split(",")):
            values = generate_arrays(StreamSpec(n, "random", seed=seed))[0].tolist()
            seg = post_flush_size("gk", values, eps)
            gre = post_flush_size("greedy", values, eps)
            print(f"{n},{seed},{seg},{gre},{gre / seg:.3f}")
            sys.stdout.flush()


if __name__ == "__main__":
    main()
