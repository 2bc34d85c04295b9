#!/usr/bin/env python3
"""Emit the sample-size table as CSV on stdout.

One row per (property, family, eps, p, delta, C). For the two relative
properties the last column holds the plain approximation size at additive
error p, the price of resolving weight-p ranges without a relative
guarantee; watch it grow like 1/p^2 against the relative column's 1/p as
p shrinks.
"""

import argparse

from vcsample import size_table, size_table_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--families", nargs="+",
                    default=["intervals", "halfplanes", "rectangles", "disks"])
    ap.add_argument("--eps", nargs="+", type=float, default=[0.1, 0.2, 0.5])
    ap.add_argument("--p", nargs="+", type=float, default=[0.05, 0.01, 0.005])
    ap.add_argument("--delta", nargs="+", type=float, default=[0.25])
    ap.add_argument("--C", nargs="+", type=float, default=[1.0])
    args = ap.parse_args()

    rows = size_table(
        args.families,
        {"eps": args.eps, "p": args.p, "delta": args.delta, "C": args.C},
    )
    print(size_table_csv(rows), end="")


if __name__ == "__main__":
    main()
