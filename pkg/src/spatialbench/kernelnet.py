"""Deterministic convolutional classifiers built from hand-placed kernels.

Straightness: binarize, score twelve 3x3 foreground/background templates at
every pixel (exact-match count in 0..9, out-of-bounds cells are background),
take the pixelwise maximum across templates, then threshold the global
maximum.  A perfect-match response anywhere marks a line vertex, so the
decision is invariant to line length, position, and palette assignment.

Convexity: normalized disk response (foreground fraction within a radius-r
disk).  At a boundary vertex of interior angle theta the continuum value is
theta/(2*pi), and for a convex region no boundary point can exceed 1/2, so
thresholding the maximum boundary response at 1/2 + delta detects reflex
vertices at any object size.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from . import _backend
from .errors import BinarizeTieError, DataError, NoObjectError, ShapeError

DEFAULT_THRESHOLD = 9
DEFAULT_DISK_RADIUS = 9
DEFAULT_DELTA = 0.08

# The twelve corner templates (rows top to bottom; 1 = foreground expected).
# Four "notch" templates fire on the background sliver that pokes into the
# stroke on the inner side of a bend, four "wedge" templates on the
# foreground L at the outer corner, and four "bevel" variants add coverage
# for oblique bend orientations.  No digitized straight stroke of width >= 3
# (any angle, either cap) produces an exact 9/9 match for any of them.
_TEMPLATES = {
    "notch_n": ("101", "111", "111"),
    "notch_e": ("111", "110", "111"),
    "notch_s": ("111", "111", "101"),
    "notch_w": ("111", "011", "111"),
    "wedge_nw": ("111", "100", "100"),
    "wedge_ne": ("111", "001", "001"),
    "wedge_sw": ("100", "100", "111"),
    "wedge_se": ("001", "001", "111"),
    "bevel_ne": ("111", "001", "011"),
    "bevel_se": ("001", "101", "111"),
    "bevel_nw": ("111", "100", "110"),
    "bevel_sw": ("110", "100", "111"),
}


@dataclass(frozen=True)
class TemplateKernel:
    """3x3 binary matching template; 1 expects foreground, 0 background."""

    cells: np.ndarray
    id: str

    def __post_init__(self):
        c = np.asarray(self.cells, dtype=np.uint8)
        if c.shape != (3, 3):
            raise ShapeError("template must be 3x3")
        if not (c.any() and (c == 0).any()):
            raise ShapeError("template needs at least one 1-cell and one 0-cell")
        object.__setattr__(self, "cells", c)


@dataclass(frozen=True)
class KernelBank:
    kernels: Tuple[TemplateKernel, ...]
    decision_threshold: int = DEFAULT_THRESHOLD

    def __post_init__(self):
        if len(self.kernels) != 12:
            raise ShapeError(f"bank must hold exactly 12 kernels, got {len(self.kernels)}")
        if not 0 <= self.decision_threshold <= 9:
            raise ShapeError("decision threshold must be in [0, 9]")
        object.__setattr__(self, "kernels", tuple(self.kernels))

    @property
    def parameter_count(self) -> int:
        return sum(k.cells.size for k in self.kernels)

    def stacked(self) -> np.ndarray:
        return np.stack([k.cells for k in self.kernels])


def corner_bank(decision_threshold: int = DEFAULT_THRESHOLD) -> KernelBank:
    """The default 12-template corner bank (108 weights)."""
    kernels = tuple(
        TemplateKernel(np.array([[int(ch) for ch in row] for row in rows], dtype=np.uint8), kid)
        for kid, rows in _TEMPLATES.items()
    )
    return KernelBank(kernels, decision_threshold)


# ---------------------------------------------------------------------------
# Pipeline stages
# ---------------------------------------------------------------------------

def binarize(img: np.ndarray) -> np.ndarray:
    """Foreground mask: background level = majority vote over the 1-px border."""
    ring = np.concatenate([img[0, :], img[-1, :], img[1:-1, 0], img[1:-1, -1]])
    levels, counts = np.unique(ring, return_counts=True)
    order = np.argsort(counts)
    if len(levels) > 1 and counts[order[-1]] == counts[order[-2]]:
        raise BinarizeTieError("border ring has no majority background level")
    background = levels[order[-1]]
    return (img != background).astype(np.uint8)


def template_match_map(binary: np.ndarray, kernel: TemplateKernel) -> np.ndarray:
    """Per-pixel exact-match count (0..9) of one template."""
    if binary.shape[0] < 3 or binary.shape[1] < 3:
        raise ShapeError("image must be at least 3x3")
    return _backend.template_match(np.ascontiguousarray(binary, dtype=np.uint8),
                                   kernel.cells[None])[0]


def max_merge(maps: Sequence[np.ndarray]) -> np.ndarray:
    """Pixelwise maximum across feature maps."""
    maps = list(maps)
    if not maps:
        raise ShapeError("no feature maps to merge")
    shape = maps[0].shape
    if any(m.shape != shape for m in maps):
        raise ShapeError("feature map dimensions differ")
    out = maps[0]
    for m in maps[1:]:
        out = np.maximum(out, m)
    return out


def classify_straightness(img: np.ndarray, bank: KernelBank = None) -> int:
    """1 = straight, 0 = broken.  Broken iff some window matches a corner
    template at or above the bank's decision threshold."""
    if bank is None:
        bank = corner_bank()
    fg = binarize(img)
    if not fg.any():
        raise NoObjectError("empty foreground")
    scores = _backend.template_match(np.ascontiguousarray(fg), bank.stacked())
    peak = int(scores.max())
    return 0 if peak >= bank.decision_threshold else 1


def disk_response_map(binary: np.ndarray, radius: int) -> np.ndarray:
    """Foreground fraction within a radius-r disk at every pixel."""
    if radius < 3:
        raise ShapeError("disk radius must be >= 3")
    counts, disk_area = _backend.disk_count(np.ascontiguousarray(binary, dtype=np.uint8),
                                            int(radius))
    return counts / float(disk_area)


def boundary_mask(binary: np.ndarray) -> np.ndarray:
    """Foreground pixels with at least one background 4-neighbor (image
    border counts as background)."""
    fg = binary.astype(bool)
    pad = np.zeros((fg.shape[0] + 2, fg.shape[1] + 2), dtype=bool)
    pad[1:-1, 1:-1] = fg
    interior = pad[:-2, 1:-1] & pad[2:, 1:-1] & pad[1:-1, :-2] & pad[1:-1, 2:]
    return fg & ~interior


def classify_convexity(img: np.ndarray, radius: int = DEFAULT_DISK_RADIUS,
                       delta: float = DEFAULT_DELTA) -> int:
    """1 = convex, 0 = concave.  Concave iff some boundary pixel's disk
    response reaches 1/2 + delta."""
    fg = binarize(img)
    if not fg.any():
        raise NoObjectError("empty foreground")
    resp = disk_response_map(fg, radius)
    b = boundary_mask(fg)
    peak = float(resp[b].max())
    return 0 if peak >= 0.5 + delta else 1


# ---------------------------------------------------------------------------
# Bank serialization and threshold calibration
# ---------------------------------------------------------------------------

def serialize_bank(bank: KernelBank) -> str:
    """Plain text: 12 blocks of 3 lines of 3 digits, then a threshold line."""
    blocks = ["\n".join("".join(str(c) for c in row) for row in k.cells)
              for k in bank.kernels]
    return "\n\n".join(blocks) + f"\n\nthreshold {bank.decision_threshold}\n"


def parse_bank(text: str) -> KernelBank:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    threshold = DEFAULT_THRESHOLD
    rows: List[str] = []
    for ln in lines:
        if ln.startswith("threshold"):
            threshold = int(ln.split()[1])
        else:
            if len(ln) != 3 or any(ch not in "01" for ch in ln):
                raise DataError(f"bad kernel row: {ln!r}")
            rows.append(ln)
    if len(rows) != 36:
        raise DataError(f"bank file must hold 12 3x3 kernels, found {len(rows)} rows")
    kernels = []
    for i in range(12):
        cells = np.array([[int(ch) for ch in rows[3 * i + j]] for j in range(3)],
                         dtype=np.uint8)
        kernels.append(TemplateKernel(cells, f"k{i}"))
    return KernelBank(tuple(kernels), threshold)


def calibrate_threshold(images: Iterable[np.ndarray], labels: Iterable[int],
                        bank: KernelBank = None) -> KernelBank:
    """Re-derive the decision threshold from labeled images.

    Sweeps every cutoff in 1..9 against the oracle labels and keeps the
    midpoint of the widest run of cutoffs achieving the best accuracy.
    """
    if bank is None:
        bank = corner_bank()
    stacked = bank.stacked()
    peaks, ys = [], []
    for img, y in zip(images, labels):
        fg = binarize(img)
        peaks.append(int(_backend.template_match(np.ascontiguousarray(fg), stacked).max()))
        ys.append(int(y))
    peaks_a = np.array(peaks)
    ys_a = np.array(ys)
    accs = {}
    for t in range(1, 10):
        pred = np.where(peaks_a >= t, 0, 1)
        accs[t] = float(np.mean(pred == ys_a))
    best = max(accs.values())
    run, best_run = [], []
    for t in range(1, 10):
        if accs[t] == best:
            run.append(t)
            if len(run) > len(best_run):
                best_run = list(run)
        else:
            run = []
    threshold = best_run[len(best_run) // 2]
    return KernelBank(bank.kernels, threshold)
