"""Command-line entry points: `train` fits one architecture on a dataset
directory, `probe` runs the kernel-learnability experiment."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .models import ARCHITECTURES
from .probe import describe, run_probe
from .train import TrainSpec, train_and_predict

DEFAULT_CONFIG = Path(__file__).resolve().parents[2] / "configs" / "default.json"


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="spatialbench-baselines")
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train one architecture, emit predictions")
    t.add_argument("--arch", required=True, choices=ARCHITECTURES)
    t.add_argument("--data", required=True, help="dataset directory")
    t.add_argument("--out", required=True, help="output directory")
    t.add_argument("--config", default=str(DEFAULT_CONFIG),
                   help="JSON with training hyperparameters")
    t.add_argument("--epochs", type=int)
    t.add_argument("--seed", type=int)
    t.add_argument("--device")
    t.add_argument("--bank", help="kernel bank file (tiny_cnn)")
    t.add_argument("--freeze-kernels", action="store_true",
                   help="tiny_cnn: use the bank weights untouched, no training")

    p = sub.add_parser("probe", help="kernel learnability probe (tiny_cnn)")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--bank", help="also probe a near-solution initialization")
    p.add_argument("--epochs", type=int, default=40)
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)

    args = parser.parse_args(argv)
    try:
        if args.command == "train":
            overrides = {"architecture": args.arch, "data_dir": args.data,
                         "out_dir": args.out, "bank": args.bank,
                         "freeze_kernels": args.freeze_kernels}
            for key in ("epochs", "seed", "device"):
                if getattr(args, key) is not None:
                    overrides[key] = getattr(args, key)
            spec = TrainSpec.from_config(args.config, **overrides)
            csv_path, log_path, summary = train_and_predict(spec)
            print(json.dumps({**summary, "predictions": str(csv_path),
                              "log": str(log_path)}, sort_keys=True))
        else:
            results = run_probe(args.data, args.out, bank=args.bank,
                                epochs=args.epochs, lr=args.lr, seed=args.seed)
            print(describe(results))
        return 0
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
