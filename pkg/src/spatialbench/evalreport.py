"""Scoring of prediction files against dataset manifests.

Accuracies are kept as exact integer (correct, total) pairs and only
formatted to one-decimal percentages at render time.  Reports can carry an
optional reference column of previously published accuracies for the four
standard data-driven architectures; reference values are labeled
"paper-reported" and never mixed with measured numbers.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import DataError, PredictionError
from .tasks import DatasetManifest

ARCHITECTURES = ("alexnet", "vgg19", "resnet34", "densenet121")

# Previously reported test accuracies (percent) of the four data-driven
# architectures, keyed (task, color_mode, split_policy).  Values follow the
# ARCHITECTURES order.  Attached to reports for side-by-side context only.
REPORTED_ACCURACY: Dict[Tuple[str, str, str], Tuple[float, ...]] = {
    ("left_right", "three_color", "scale_up"): (100.0,),
    ("left_right", "three_color", "scale_down"): (96.1,),
    ("left_right", "three_color", "irregular_convex"): (99.5,),
    ("left_right", "three_color", "non_convex"): (100.0,),
    ("front_back", "three_color", "size_extrapolation"): (90.8, 90.2, 87.0, 89.4),
    ("front_back", "three_color", "size_interpolation"): (90.5, 97.0, 94.1, 94.5),
    ("front_back", "three_color", "irregular_convex"): (91.1, 72.5, 86.9, 92.6),
    ("size", "three_color", "size_extrapolation"): (84.4, 76.5, 86.4, 73.9),
    ("size", "three_color", "size_interpolation"): (91.6, 65.8, 97.8, 88.4),
    ("size", "three_color", "irregular_convex"): (94.6, 95.6, 92.3, 87.2),
    ("size", "three_color", "non_convex"): (92.8, 93.8, 92.2, 87.3),
    ("convexity", "two_color", "size_extrapolation"): (68.9, 84.9, 71.8, 85.8),
    ("convexity", "two_color", "size_interpolation"): (81.5, 95.9, 91.2, 95.5),
    ("convexity", "three_color", "size_extrapolation"): (61.2, 57.2, 65.4, 69.2),
    ("convexity", "three_color", "size_interpolation"): (75.4, 78.1, 90.9, 81.9),
    ("straightness", "two_color", "size_extrapolation"): (72.5, 91.2, 82.7, 87.3),
    ("straightness", "two_color", "size_interpolation"): (82.1, 96.6, 95.1, 90.4),
    ("straightness", "three_color", "size_extrapolation"): (65.8, 72.5, 78.4, 75.7),
    ("straightness", "three_color", "size_interpolation"): (78.8, 83.6, 80.5, 92.6),
}


def reported_accuracy(task: str, color_mode: str, policy: str,
                      architecture: str) -> Optional[float]:
    """Previously reported accuracy (percent) for one architecture, if any."""
    row = REPORTED_ACCURACY.get((task, color_mode, policy))
    if row is None or architecture not in ARCHITECTURES:
        return None
    if len(row) == 1:  # single-architecture table
        return row[0] if architecture == "alexnet" else None
    return row[ARCHITECTURES.index(architecture)]


@dataclass(frozen=True)
class PredictionSet:
    """id -> predicted label, plus a tag naming the classifier."""

    source: str
    entries: Dict[str, int]

    def __post_init__(self):
        for item_id, label in self.entries.items():
            if label not in (0, 1):
                raise PredictionError(f"prediction for {item_id!r} must be 0 or 1, "
                                      f"got {label!r}")


def parse_predictions(text: str, source: str = "predictions") -> PredictionSet:
    """Parse the interchange CSV (header `id,label`)."""
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row]
    if not rows or [c.strip() for c in rows[0]] != ["id", "label"]:
        raise PredictionError("prediction CSV must start with header 'id,label'")
    entries: Dict[str, int] = {}
    for row in rows[1:]:
        if len(row) != 2:
            raise PredictionError(f"bad prediction row: {row!r}")
        item_id = row[0].strip()
        if item_id in entries:
            raise PredictionError(f"duplicate prediction id: {item_id!r}")
        try:
            entries[item_id] = int(row[1])
        except ValueError:
            raise PredictionError(f"non-integer label for {item_id!r}: {row[1]!r}")
    return PredictionSet(source, entries)


def serialize_predictions(preds: PredictionSet) -> str:
    lines = ["id,label"]
    lines += [f"{item_id},{label}" for item_id, label in preds.entries.items()]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ReportRow:
    """Exact confusion counts for one (task, policy, split, source) cell."""

    task: str
    policy: str
    split: str
    source: str
    correct0: int
    total0: int
    correct1: int
    total1: int
    reference: Optional[float] = None  # paper-reported percent, if attached

    @property
    def total(self) -> int:
        return self.total0 + self.total1

    @property
    def correct(self) -> int:
        return self.correct0 + self.correct1

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0

    @property
    def confusion(self) -> Tuple[int, int, int, int]:
        """(true0, false1, false0, true1): rows = actual, columns = predicted."""
        return (self.correct0, self.total0 - self.correct0,
                self.total1 - self.correct1, self.correct1)


@dataclass(frozen=True)
class EvalReport:
    rows: Tuple[ReportRow, ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))


def score(manifest: DatasetManifest, preds: PredictionSet,
          split: str = "test") -> EvalReport:
    """Score predictions over one split of a manifest.

    Every item of the split must have a prediction, and every prediction id
    must exist in the manifest; anything else raises instead of skipping.
    """
    known = {e["id"] for e in manifest.entries}
    unknown = set(preds.entries) - known
    if unknown:
        raise PredictionError(
            f"{len(unknown)} prediction ids not in manifest, "
            f"e.g. {sorted(unknown)[:3]}")
    cells: Dict[Tuple[str, str], List[int]] = {}
    missing = 0
    for entry in manifest.entries:
        if entry["split"] != split:
            continue
        key = (entry["task"], entry["split_policy"])
        cell = cells.setdefault(key, [0, 0, 0, 0])  # c0, t0, c1, t1
        if entry["id"] not in preds.entries:
            missing += 1
            continue
        label = entry["label"]
        hit = int(preds.entries[entry["id"]] == label)
        cell[2 * label] += hit
        cell[2 * label + 1] += 1
    if missing:
        raise PredictionError(f"{missing} {split}-split items lack predictions")
    if not cells:
        raise DataError(f"manifest has no {split}-split items")
    rows = tuple(
        ReportRow(task, policy, split, preds.source, c0, t0, c1, t1)
        for (task, policy), (c0, t0, c1, t1) in sorted(cells.items()))
    return EvalReport(rows)


def attach_reference(report: EvalReport, architecture: str) -> EvalReport:
    """Annotate each row with the paper-reported accuracy for architecture,
    where one exists for the row's (task, policy)."""
    rows = []
    for row in report.rows:
        color_mode = _row_color_mode(row)
        ref = reported_accuracy(row.task, color_mode, row.policy, architecture)
        rows.append(replace(row, reference=ref))
    return EvalReport(tuple(rows))


def _row_color_mode(row: ReportRow) -> str:
    # Two-object tasks always use the full palette; the single-object tables
    # are keyed by mode, which the source tag may carry as a suffix.
    if row.task in ("left_right", "front_back", "size"):
        return "three_color"
    return "three_color" if row.source.endswith("three_color") else "two_color"


_CSV_COLUMNS = ("task", "policy", "split", "source",
                "correct0", "total0", "correct1", "total1",
                "accuracy_pct", "paper_reported_pct")


def _pct(x: Optional[float]) -> str:
    return "" if x is None else f"{x:.1f}"


def render_report(report: EvalReport, fmt: str = "markdown") -> str:
    """Render as an aligned markdown table or machine-readable CSV."""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(_CSV_COLUMNS)
        for r in report.rows:
            writer.writerow([r.task, r.policy, r.split, r.source,
                             r.correct0, r.total0, r.correct1, r.total1,
                             _pct(100.0 * r.accuracy), _pct(r.reference)])
        return buf.getvalue()
    if fmt != "markdown":
        raise DataError(f"unknown report format: {fmt!r}")
    headers = ["task", "policy", "split", "source", "n", "accuracy",
               "acc(label=0)", "acc(label=1)", "paper-reported"]
    body = []
    for r in report.rows:
        acc0 = 100.0 * r.correct0 / r.total0 if r.total0 else None
        acc1 = 100.0 * r.correct1 / r.total1 if r.total1 else None
        ref = "" if r.reference is None else f"{r.reference:.1f}%"
        body.append([r.task, r.policy, r.split, r.source, str(r.total),
                     f"{100.0 * r.accuracy:.1f}%",
                     "" if acc0 is None else f"{acc0:.1f}%",
                     "" if acc1 is None else f"{acc1:.1f}%", ref])
    widths = [max(len(h), *(len(row[i]) for row in body)) if body else len(h)
              for i, h in enumerate(headers)]
    def line(cells):
        return "| " + " | ".join(c.ljust(w) for c, w in zip(cells, widths)) + " |"
    out = [line(headers),
           "|" + "|".join("-" * (w + 2) for w in widths) + "|"]
    out += [line(row) for row in body]
    return "\n".join(out) + "\n"


def parse_report_csv(text: str) -> EvalReport:
    """Inverse of render_report(..., 'csv'): identical EvalReport back."""
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row]
    if not rows or tuple(rows[0]) != _CSV_COLUMNS:
        raise DataError("report CSV header mismatch")
    parsed = []
    for row in rows[1:]:
        task, policy, split, source = row[:4]
        c0, t0, c1, t1 = (int(v) for v in row[4:8])
        ref = float(row[9]) if row[9] else None
        parsed.append(ReportRow(task, policy, split, source, c0, t0, c1, t1, ref))
    return EvalReport(tuple(parsed))
