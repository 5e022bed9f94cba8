#!/usr/bin/env python3
"""Generalization-gap experiment: train each standard architecture on
several split policies of two task families and compare test accuracies.

Expected direction (a qualitative finding, hours of CPU at full scale):
for each family, every architecture's size-extrapolation accuracy falls
below its own iid accuracy, and extrapolation <= interpolation for at
least 3 of 4 architectures.  Exact percentages are seed- and
hardware-dependent and are not a target.

Requires the `spatialbench` CLI on PATH (dataset generation + scoring).

Usage:
  python3 scripts/run_gap.py --out runs/gap            # full scale
  python3 scripts/run_gap.py --out runs/gap --smoke    # minutes, tiny
"""

import argparse
import json
import subprocess
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))
from spatialbench_baselines.train import TrainSpec, train_and_predict  # noqa: E402

FAMILIES = ("size", "straightness")
POLICIES = ("iid", "size_interpolation", "size_extrapolation")
ARCHS = ("alexnet", "vgg19", "resnet34", "densenet121")


def sh(*cmd):
    subprocess.run([str(c) for c in cmd], check=True)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", required=True)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--epochs", type=int, default=30)
    ap.add_argument("--smoke", action="store_true",
                    help="tiny datasets + 2 epochs, to exercise the pipeline")
    args = ap.parse_args()
    out = Path(args.out)
    epochs = 2 if args.smoke else args.epochs
    counts = (40, 40) if args.smoke else (None, None)  # None = family default

    acc = {}
    for family in FAMILIES:
        for policy in POLICIES:
            data = out / "data" / f"{family}_{policy}"
            if not (data / "manifest.jsonl").exists():
                cmd = ["spatialbench", "generate", "--task", family,
                       "--split-policy", policy, "--seed", str(args.seed),
                       "--out", data]
                if counts[0]:
                    cmd += ["--count-per-class", counts[0],
                            "--test-count-per-class", counts[1]]
                sh(*cmd)
            for arch in ARCHS:
                run_dir = out / "runs" / f"{family}_{policy}_{arch}"
                summary_file = run_dir / "summary.json"
                if summary_file.exists():
                    summary = json.loads(summary_file.read_text())
                else:
                    spec = TrainSpec(architecture=arch, data_dir=str(data),
                                     out_dir=str(run_dir), epochs=epochs,
                                     seed=args.seed)
                    csv_path, _, summary = train_and_predict(spec)
                    # cross-check our accuracy against the generator's scorer
                    sh("spatialbench", "evaluate", "--data", data,
                       "--predictions", csv_path, "--format", "csv")
                    summary_file.write_text(json.dumps(summary) + "\n")
                acc[(family, policy, arch)] = summary["test_accuracy"]
                print(f"{family:14s} {policy:20s} {arch:12s} "
                      f"{100 * acc[(family, policy, arch)]:.1f}%")

    print("\ndirection check:")
    for family in FAMILIES:
        below_iid = [a for a in ARCHS
                     if acc[(family, "size_extrapolation", a)] < acc[(family, "iid", a)]]
        extrap_le_interp = [a for a in ARCHS
                            if acc[(family, "size_extrapolation", a)]
                            <= acc[(family, "size_interpolation", a)]]
        print(f"  {family}: extrapolation < iid for {len(below_iid)}/4 "
              f"architectures ({', '.join(below_iid) or 'none'}); "
              f"extrapolation <= interpolation for {len(extrap_le_interp)}/4")


if __name__ == "__main__":
    main()
