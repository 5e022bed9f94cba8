"""Command-line entry point: generate / classify / calibrate / evaluate /
inspect.

Exit codes: 0 success, 1 usage error, 2 data or I/O error.  All generation
is seeded explicitly (--seed is required), so equal argv means byte-equal
outputs.  The SPATIAL_BENCH_THREADS environment variable caps parallel
generation (0 = auto).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import evalreport, geometry, kernelnet, tasks
from .errors import SpatialBenchError
from .imageio import read_image


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as exit code 1."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _add_generate(sub):
    p = sub.add_parser("generate", help="render a dataset tree + manifest")
    p.add_argument("--task", required=True, choices=tasks.TASKS)
    p.add_argument("--seed", required=True, type=int,
                   help="master seed (required: no silent nondeterminism)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--color-mode", choices=("two_color", "three_color"))
    p.add_argument("--count-per-class", type=int)
    p.add_argument("--test-count-per-class", type=int)
    p.add_argument("--split-policy", choices=tasks.SPLIT_POLICIES, default="iid")
    p.add_argument("--size-range", nargs=2, type=float, metavar=("LO", "HI"))
    p.add_argument("--canvas", nargs=2, type=int, metavar=("W", "H"))
    p.add_argument("--centroid-dx-min", type=float)
    p.add_argument("--area-ratio-min", type=float)
    p.add_argument("--overlap-range", nargs=2, type=float, metavar=("LO", "HI"))
    p.add_argument("--reflex-range", nargs=2, type=float, metavar=("LO", "HI"))
    p.add_argument("--turn-angle-range", nargs=2, type=float, metavar=("LO", "HI"))
    p.add_argument("--guard-px", type=int)
    p.add_argument("--stroke-width", type=float)
    p.add_argument("--budget", type=int)
    p.add_argument("--format", choices=("pgm", "png"), default="pgm")
    p.add_argument("--threads", type=int, help="worker count (0 = auto)")
    p.add_argument("--force", action="store_true",
                   help="allow writing into a non-empty directory")


def _add_classify(sub):
    p = sub.add_parser("classify", help="run a deterministic net over a dataset")
    p.add_argument("--data", required=True, help="dataset directory")
    p.add_argument("--net", choices=("straightness", "convexity"),
                   help="defaults to the dataset's own task")
    p.add_argument("--bank", help="kernel bank file (straightness net)")
    p.add_argument("--disk-radius", type=int, default=kernelnet.DEFAULT_DISK_RADIUS)
    p.add_argument("--delta", type=float, default=kernelnet.DEFAULT_DELTA)
    p.add_argument("--split", choices=("train", "test", "all"), default="all")
    p.add_argument("--out", help="prediction CSV path (default: stdout)")


def _add_calibrate(sub):
    p = sub.add_parser("calibrate",
                       help="re-derive the straightness decision threshold")
    p.add_argument("--data", required=True,
                   help="straightness dataset directory (train split is used)")
    p.add_argument("--bank", help="starting kernel bank file")
    p.add_argument("--out", required=True, help="calibrated bank file")


def _add_evaluate(sub):
    p = sub.add_parser("evaluate", help="score a prediction CSV")
    p.add_argument("--data", required=True, help="dataset directory")
    p.add_argument("--predictions", required=True, help="prediction CSV path")
    p.add_argument("--split", choices=("train", "test"), default="test")
    p.add_argument("--format", choices=("markdown", "csv"), default="markdown")
    p.add_argument("--reference", choices=evalreport.ARCHITECTURES,
                   help="attach this architecture's paper-reported accuracies")
    p.add_argument("--out", help="write the report here instead of stdout")


def _add_inspect(sub):
    p = sub.add_parser("inspect", help="dump one manifest item")
    p.add_argument("--data", required=True, help="dataset directory")
    p.add_argument("--id", required=True, dest="item_id", help="manifest item id")


def build_parser() -> _Parser:
    parser = _Parser(prog="spatialbench")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    _add_generate(sub)
    _add_classify(sub)
    _add_calibrate(sub)
    _add_evaluate(sub)
    _add_inspect(sub)
    return parser


def _config_from_args(args) -> tasks.TaskConfig:
    kwargs = {"task": args.task, "seed": args.seed,
              "split_policy": args.split_policy, "image_format": args.format}
    optional = {
        "color_mode": args.color_mode,
        "count_per_class": args.count_per_class,
        "test_count_per_class": args.test_count_per_class,
        "canvas": args.canvas,
        "size_range": args.size_range,
        "centroid_dx_min": args.centroid_dx_min,
        "area_ratio_min": args.area_ratio_min,
        "overlap_range": args.overlap_range,
        "reflex_range": args.reflex_range,
        "turn_angle_range": args.turn_angle_range,
        "guard_px": args.guard_px,
        "stroke_width": args.stroke_width,
        "budget": args.budget,
    }
    for key, value in optional.items():
        if value is not None:
            kwargs[key] = tuple(value) if isinstance(value, list) else value
    return tasks.TaskConfig(**kwargs)


def _cmd_generate(args) -> int:
    cfg = _config_from_args(args)
    manifest = tasks.write_dataset(cfg, args.out, force=args.force,
                                   threads=args.threads)
    print(f"wrote {len(manifest.entries)} items to {args.out}")
    return 0


def _load_split(args):
    manifest = tasks.load_dataset(args.data)
    entries = [e for e in manifest.entries
               if args.split == "all" or e["split"] == args.split]
    return manifest, entries


def _cmd_classify(args) -> int:
    manifest, entries = _load_split(args)
    net = args.net or manifest.config.task
    if net == "straightness":
        bank = (kernelnet.parse_bank(Path(args.bank).read_text())
                if args.bank else kernelnet.corner_bank())
        decide = lambda img: kernelnet.classify_straightness(img, bank)
    elif net == "convexity":
        decide = lambda img: kernelnet.classify_convexity(
            img, args.disk_radius, args.delta)
    else:
        raise UsageError(f"no deterministic net for task {net!r}; pass --net")
    root = Path(args.data)
    preds = {}
    for entry in entries:
        preds[entry["id"]] = decide(read_image(root / entry["path"]))
    text = evalreport.serialize_predictions(
        evalreport.PredictionSet(f"kernelnet_{net}", preds))
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {len(preds)} predictions to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_calibrate(args) -> int:
    manifest = tasks.load_dataset(args.data)
    if manifest.config.task != "straightness":
        raise UsageError("calibrate needs a straightness dataset")
    bank = (kernelnet.parse_bank(Path(args.bank).read_text())
            if args.bank else kernelnet.corner_bank())
    root = Path(args.data)
    train = [e for e in manifest.entries if e["split"] == "train"]
    images = (read_image(root / e["path"]) for e in train)
    labels = (e["label"] for e in train)
    tuned = kernelnet.calibrate_threshold(images, labels, bank)
    Path(args.out).write_text(kernelnet.serialize_bank(tuned))
    print(f"calibrated threshold {tuned.decision_threshold} "
          f"on {len(train)} items -> {args.out}")
    return 0


def _cmd_evaluate(args) -> int:
    manifest = tasks.load_dataset(args.data)
    source = Path(args.predictions).stem
    preds = evalreport.parse_predictions(Path(args.predictions).read_text(), source)
    known = {e["id"] for e in manifest.entries if e["split"] == args.split}
    scoped = evalreport.PredictionSet(
        source, {i: l for i, l in preds.entries.items() if i in known})
    report = evalreport.score(manifest, scoped, split=args.split)
    if args.reference:
        report = evalreport.attach_reference(report, args.reference)
    text = evalreport.render_report(report, args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_inspect(args) -> int:
    manifest = tasks.load_dataset(args.data)
    matches = [e for e in manifest.entries if e["id"] == args.item_id]
    if not matches:
        raise UsageError(f"no item {args.item_id!r} in {args.data}")
    entry = matches[0]
    scene = tasks.regenerate_scene(manifest.config, entry)
    print(json.dumps(entry, indent=2, sort_keys=True))
    print(f"oracle label: {tasks.oracle_label(scene)}")
    for i, obj in enumerate(scene.objects):
        shape = obj.shape
        print(f"object {i}: {shape.kind} color={obj.color_index} "
              f"z={obj.z_order} size_param={shape.size_param:.2f}")
        if shape.kind == geometry.CIRCLE:
            print(f"  center=({shape.center[0]:.2f}, {shape.center[1]:.2f}) "
                  f"radius={shape.radius:.2f}")
        else:
            pts = ", ".join(f"({x:.2f}, {y:.2f})" for x, y in shape.vertices)
            print(f"  vertices: {pts}")
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "classify": _cmd_classify,
    "calibrate": _cmd_calibrate,
    "evaluate": _cmd_evaluate,
    "inspect": _cmd_inspect,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help()
            return 1
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SpatialBenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def console_main():
    sys.exit(main())


if __name__ == "__main__":
    console_main()
