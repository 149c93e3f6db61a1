#!/usr/bin/env python3
"""Run the full MCAR-vs-MAR completion benchmark and write all three outputs.

Equivalent to the `lowrank-bench` CLI but convenient for editing defaults in
place during experiments. Writes report.{txt,csv,json} into --outdir.
"""

import argparse
import pathlib

from lowrankmc.bench import ExperimentConfig, render_table, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="bench_out")
    ap.add_argument("--reps", type=int, default=100)
    ap.add_argument("--size", type=int, default=300, help="matrix side length")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=0)
    args = ap.parse_args()

    cfg = ExperimentConfig(m=args.size, n=args.size, n_reps=args.reps,
                           master_seed=args.seed, threads=args.threads)
    report = run_experiment(cfg)

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for fmt, suffix in (("ascii", "txt"), ("csv", "csv"), ("json", "json")):
        path = outdir / f"report.{suffix}"
        path.write_text(render_table(report, fmt), newline="")
        print(f"wrote {path}")
    print()
    print(render_table(report, "ascii"))


if __name__ == "__main__":
    main()
