#!/usr/bin/env python3
"""Run the full experiment battery at reporting scale.

Writes one CSV per experiment into --results-dir (default ./results) plus a
combined JSON, and prints one verdict line per experiment.  Exits nonzero
if any experiment verdict fails.
"""

from __future__ import annotations

import argparse
import pathlib
import sys
import time

from onebit.harness import EXPERIMENT_ORDER, ExperimentConfig, run


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--delta", type=float, default=0.2)
    ap.add_argument("--net-size", type=int, default=200)
    ap.add_argument("--workers", type=int, default=4)
    ap.add_argument("--results-dir", default="results")
    args = ap.parse_args()

    out = pathlib.Path(args.results_dir)
    out.mkdir(parents=True, exist_ok=True)

    failures = []
    for name in EXPERIMENT_ORDER:
        cfg = ExperimentConfig(
            experiment=name,
            delta=args.delta,
            trials=args.trials,
            seed=args.seed,
            net_size=args.net_size,
            out_path=str(out / f"{name}.csv"),
        )
        t0 = time.time()
        status = run(cfg, workers=args.workers)
        verdict = "pass" if status == 0 else "FAIL"
        print(f"{name:13s} {verdict}  ({time.time() - t0:6.1f}s)  -> {cfg.out_path}")
        if status != 0:
            failures.append(name)

    combined = ExperimentConfig(
        experiment="all",
        delta=args.delta,
        trials=args.trials,
        seed=args.seed,
        net_size=args.net_size,
        out_path=str(out / "all.json"),
        format="json",
    )
    status = run(combined, workers=args.workers)
    print(f"{'all':13s} {'pass' if status == 0 else 'FAIL'}  -> {combined.out_path}")
    if status != 0 and "all" not in failures:
        failures.append("all")

    if failures:
        print(f"failed: {', '.join(failures)}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
