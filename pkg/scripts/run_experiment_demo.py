#!/usr/bin/env python3
"""Small end-to-end experiment demo.

Draws a clustered 1-d ground set, runs the additive-approximation property
over a grid of eps values, prints the per-cell table, and writes the JSON
payload next to this script. Rerunning with the same seed reproduces the
JSON byte for byte.
"""

import argparse
import pathlib

from vcsample import ExperimentConfig, SourceSpec, run_experiment


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=400)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=20240817)
    ap.add_argument("--out", default=None, help="JSON output path")
    args = ap.parse_args()

    cfg = ExperimentConfig(
        family="intervals",
        property="approx",
        source=SourceSpec("clusters", n=args.n),
        eps_values=(0.05, 0.1, 0.2),
        delta=0.25,
        trials=args.trials,
        C=0.5,
        seed=args.seed,
    )
    result = run_experiment(cfg)
    print(result.to_csv_text(), end="")
    out = args.out or str(pathlib.Path(__file__).with_name("experiment_demo.json"))
    result.save_json(out)
    print(f"# JSON payload -> {out}")


if __name__ == "__main__":
    main()
