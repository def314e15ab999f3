#!/usr/bin/env python3
"""Sweep missing rates x strategies on the synthetic benchmark and print a table.

Example:
    python scripts/missing_rate_sweep.py --n 2000 --seeds 5 --rates 0.1 0.2 0.3 0.4
"""

import argparse
import statistics

from tsalign import benchmark_alignment


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=2000)
    parser.add_argument("--m", type=int, default=4)
    parser.add_argument("--jitter", type=float, default=4.0)
    parser.add_argument("--rates", type=float, nargs="+", default=[0.1, 0.2, 0.3, 0.4])
    parser.add_argument("--seeds", type=int, default=5)
    parser.add_argument("--strategies", nargs="+", default=["greedy", "expect"])
    parser.add_argument("--value-model", choices=("ar1", "sine", "walk"), default="ar1")
    args = parser.parse_args()

    print(f"{'strategy':10s} {'rate':>5s} {'F1':>8s} {'tuples':>8s} {'cand':>8s} {'ms':>8s}")
    for strategy in args.strategies:
        for rate in args.rates:
            rows = [benchmark_alignment(args.n, args.m, args.jitter, rate, strategy,
                                        seed, value_model=args.value_model)
                    for seed in range(args.seeds)]
            f1 = statistics.mean(r["f1"] for r in rows)
            tuples = statistics.mean(r["aligned_tuple_count"] for r in rows)
            cand = statistics.mean(r["candidate_count"] for r in rows)
            ms = statistics.mean(r["wall_time_ms"] for r in rows)
            print(f"{strategy:10s} {rate:5.2f} {f1:8.4f} {tuples:8.0f} {cand:8.0f} {ms:8.1f}")


if __name__ == "__main__":
    main()
