#!/usr/bin/env python3
"""Ratio-statistic digit tables over the standard census, bases 4/8/10/16.

For each base this prints the observed leading-digit frequencies of
x_m / ((3/4)^m x_0) after m = 10 steps over 100,000 seeds congruent to
1 mod 6, next to the limiting prediction (uniform over powers of two for a
power-of-two base, the logarithmic law otherwise).
"""

import argparse

from benford_lab import collatz as cz


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--start", type=int, default=419_753_999_998_525)
    ap.add_argument("--count", type=int, default=100_000)
    ap.add_argument("--iterations", "-m", type=int, default=10)
    ap.add_argument("--bases", default="4,8,10,16")
    args = ap.parse_args()

    seeds = cz.census_1mod6(args.start, args.count)
    for base in (int(b) for b in args.bases.split(",")):
        result = cz.ratio_digit_experiment(seeds, args.iterations, base)
        print(f"\n== base {base} ==")
        print(result.to_text_table())


if __name__ == "__main__":
    main()
