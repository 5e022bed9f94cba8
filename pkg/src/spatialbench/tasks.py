"""Dataset family generators: scene construction, labeling rules, size/shape
split protocols, and on-disk persistence (images + JSON-Lines manifest).

Five binary families share one pipeline: a per-item deterministic random
stream (child of the master seed by global item index) drives rejection-
sampled scene construction, the class label is enforced by a symmetry swap
that cannot invalidate placement (color swap for left/right and size, depth
swap for front/back, shape family for convexity/straightness), and every
label is re-derivable from the stored vector geometry alone.
"""

from __future__ import annotations

import dataclasses
import json
import math
import multiprocessing
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from . import geometry
from .errors import DataError, GenerationBudgetError
from .geometry import (CIRCLE, IRREGULAR_CONVEX, NON_CONVEX, POLYLINE,
                       REGULAR_POLYGON, Rng, Shape, translate)
from .imageio import encode_pgm, encode_png
from .raster import (DEFAULT_CANVAS, PALETTE, Scene, SceneObject, dilate_mask,
                     rasterize_scene, shape_mask)
from .rng import child_seed

LEFT_RIGHT = "left_right"
FRONT_BACK = "front_back"
SIZE = "size"
CONVEXITY = "convexity"
STRAIGHTNESS = "straightness"

TASKS = (LEFT_RIGHT, FRONT_BACK, SIZE, CONVEXITY, STRAIGHTNESS)
TWO_OBJECT_TASKS = (LEFT_RIGHT, FRONT_BACK, SIZE)

SIZE_POLICIES = ("iid", "size_interpolation", "size_extrapolation",
                 "scale_up", "scale_down")
SHAPE_POLICIES = ("irregular_convex", "non_convex")
SPLIT_POLICIES = SIZE_POLICIES + SHAPE_POLICIES

BASE_SIZE_RANGE = (20.0, 50.0)

# Default train-set item counts per class, per family.
DEFAULT_COUNTS = {LEFT_RIGHT: 1200, FRONT_BACK: 4800, SIZE: 1200,
                  CONVEXITY: 3000, STRAIGHTNESS: 1200}
DEFAULT_TEST_COUNT = 1000

# Object centers keep this distance from the canvas edge (beyond the shape's
# own reach), so every raster stays clear of the 2 px hard bound.
PLACE_MARGIN = 6.0

# Irregular polygon radii are jittered up to +30%; reserve that reach.
_REACH_FACTOR = {REGULAR_POLYGON: 1.0, CIRCLE: 1.0,
                 IRREGULAR_CONVEX: 1.32, NON_CONVEX: 1.32}

_ENV_THREADS = "SPATIAL_BENCH_THREADS"


@dataclass(frozen=True)
class TaskConfig:
    """Full recipe for one dataset: family, palette mode, counts, geometry
    margins, split protocol, and the master seed."""

    task: str
    color_mode: Optional[str] = None
    count_per_class: Optional[int] = None
    test_count_per_class: int = DEFAULT_TEST_COUNT
    canvas: Tuple[int, int] = DEFAULT_CANVAS
    size_range: Optional[Tuple[float, float]] = None
    split_policy: str = "iid"
    seed: int = 0
    centroid_dx_min: Optional[float] = None
    area_ratio_min: float = 1.2
    overlap_range: Tuple[float, float] = (0.1, 0.6)
    reflex_min: float = 210.0
    reflex_range: Tuple[float, float] = geometry.REFLEX_RANGE
    turn_angle_range: Tuple[float, float] = (120.0, 140.0)
    guard_px: int = 3
    stroke_width: float = 3.0
    budget: int = geometry.DEFAULT_BUDGET
    image_format: str = "pgm"

    def __post_init__(self):
        if self.task not in TASKS:
            raise DataError(f"unknown task: {self.task!r}")
        if self.split_policy not in SPLIT_POLICIES:
            raise DataError(f"unknown split policy: {self.split_policy!r}")
        if self.color_mode is None:
            mode = "three_color" if self.task in TWO_OBJECT_TASKS else "two_color"
            object.__setattr__(self, "color_mode", mode)
        if self.color_mode not in ("two_color", "three_color"):
            raise DataError(f"unknown color mode: {self.color_mode!r}")
        if self.task in TWO_OBJECT_TASKS and self.color_mode != "three_color":
            raise DataError(f"{self.task} scenes always use all three palette levels")
        if self.count_per_class is None:
            object.__setattr__(self, "count_per_class", DEFAULT_COUNTS[self.task])
        if self.count_per_class < 1 or self.test_count_per_class < 0:
            raise DataError("item counts must be positive")
        if self.size_range is None:
            rng = (40.0, 50.0) if self.task == CONVEXITY else BASE_SIZE_RANGE
            object.__setattr__(self, "size_range", rng)
        lo, hi = self.size_range
        if not lo < hi:
            raise DataError("size_range must satisfy s_lo < s_hi")
        olo, ohi = self.overlap_range
        if not (0.0 < olo < ohi < 1.0):
            raise DataError("overlap_range must be inside (0, 1)")
        if self.centroid_dx_min is None:
            object.__setattr__(self, "centroid_dx_min", 0.1 * self.canvas[0])
        if self.split_policy in SHAPE_POLICIES and self.task not in TWO_OBJECT_TASKS:
            raise DataError(f"shape-shift splits do not apply to {self.task}")
        if self.split_policy == "non_convex" and self.task == FRONT_BACK:
            raise DataError("front_back scenes must stay convex; "
                            "use the irregular_convex shift instead")

    def to_json(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> "TaskConfig":
        kwargs = dict(data)
        for key in ("canvas", "size_range", "overlap_range", "reflex_range",
                    "turn_angle_range"):
            if kwargs.get(key) is not None:
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)


@dataclass(frozen=True)
class DatasetManifest:
    config: TaskConfig
    entries: Tuple[dict, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        ids = [e["id"] for e in self.entries]
        if len(set(ids)) != len(ids):
            raise DataError("duplicate manifest ids")


# ---------------------------------------------------------------------------
# Split protocol
# ---------------------------------------------------------------------------

def make_size_splits(policy: str, base: Tuple[float, float] = BASE_SIZE_RANGE):
    """(train ranges, test ranges) under a size split policy.

    For base [20, 50]: interpolation trains on [15, 25] u [45, 55] and tests
    on (25, 45); extrapolation is the reverse; scale_up/scale_down test on
    1.5x / 0.5x the base.  Train and test ranges never overlap for non-iid
    policies (shared endpoints carry zero probability mass).
    """
    lo, hi = base
    if not lo < hi:
        raise DataError("size range must satisfy s_lo < s_hi")
    pad = (hi - lo) / 6.0
    if policy == "iid":
        return ((base,), (base,))
    if policy == "size_interpolation":
        return (((lo - pad, lo + pad), (hi - pad, hi + pad)),
                ((lo + pad, hi - pad),))
    if policy == "size_extrapolation":
        return (((lo + pad, hi - pad),),
                ((lo - pad, lo + pad), (hi - pad, hi + pad)))
    if policy == "scale_up":
        return ((base,), ((1.5 * lo, 1.5 * hi),))
    if policy == "scale_down":
        return ((base,), ((0.5 * lo, 0.5 * hi),))
    raise DataError(f"unknown size split policy: {policy!r}")


def _size_ranges(cfg: TaskConfig, split: str):
    if cfg.split_policy in SHAPE_POLICIES:
        return (cfg.size_range,)
    train, test = make_size_splits(cfg.split_policy, cfg.size_range)
    return train if split == "train" else test


def _sample_size(rng: Rng, ranges) -> float:
    widths = [hi - lo for lo, hi in ranges]
    u = rng.uniform(0.0, sum(widths))
    for (lo, _), w in zip(ranges, widths):
        if u <= w:
            return lo + u
        u -= w
    return ranges[-1][1]


# ---------------------------------------------------------------------------
# Placement helpers
# ---------------------------------------------------------------------------

def _pick_kind(cfg: TaskConfig, rng: Rng, split: str):
    """(kind, n) for one two-object-task shape under the split policy."""
    if split == "test" and cfg.split_policy in SHAPE_POLICIES:
        if cfg.split_policy == "irregular_convex":
            return IRREGULAR_CONVEX, rng.integers(3, 7)
        return NON_CONVEX, rng.integers(4, 7)
    choices = [(REGULAR_POLYGON, 3), (REGULAR_POLYGON, 4), (REGULAR_POLYGON, 5),
               (REGULAR_POLYGON, 6), (CIRCLE, 0)]
    return rng.choice(choices)


def _sample_center(cfg: TaskConfig, rng: Rng, reach: float) -> np.ndarray:
    w, h = cfg.canvas
    lo = PLACE_MARGIN + reach
    if w - lo <= lo or h - lo <= lo:
        raise DataError(f"canvas {w}x{h} too small for objects of reach {reach:.0f}")
    return np.array([rng.uniform(lo, w - lo), rng.uniform(lo, h - lo)])


def _make_object_shape(cfg: TaskConfig, rng: Rng, kind: str, n: int,
                       size: float, center) -> Shape:
    return geometry.gen_shape(
        kind, rng, size, n=n, rotation=rng.uniform(0.0, 2 * math.pi),
        center=center, reflex_range=cfg.reflex_range, budget=cfg.budget)


def _color_permutation(rng: Rng):
    """(color_a, color_b, background): a random bijection onto the palette."""
    p = rng.permutation(3)
    return int(p[0]), int(p[1]), int(p[2])


def _brightness_swap_needed(color_a: int, color_b: int, flag: bool) -> bool:
    return flag != (color_a > color_b)


# ---------------------------------------------------------------------------
# Scene builders (one per family)
# ---------------------------------------------------------------------------

def _build_disjoint_pair(cfg: TaskConfig, split: str, label: int, rng: Rng) -> Scene:
    """Shared builder for left_right and size: two disjoint objects."""
    w, h = cfg.canvas
    for _ in range(cfg.budget):
        ka, na = _pick_kind(cfg, rng, split)
        kb, nb = _pick_kind(cfg, rng, split)
        sa = _sample_size(rng, _size_ranges(cfg, split))
        sb = _sample_size(rng, _size_ranges(cfg, split))
        shape_a = _make_object_shape(cfg, rng, ka, na, sa,
                                     _sample_center(cfg, rng, sa * _REACH_FACTOR[ka]))
        shape_b = _make_object_shape(cfg, rng, kb, nb, sb,
                                     _sample_center(cfg, rng, sb * _REACH_FACTOR[kb]))
        ca, cb = geometry.centroid(shape_a), geometry.centroid(shape_b)
        if cfg.task == LEFT_RIGHT:
            if abs(ca[0] - cb[0]) < cfg.centroid_dx_min:
                continue
        else:
            aa, ab = geometry.area(shape_a), geometry.area(shape_b)
            if max(aa, ab) < cfg.area_ratio_min * min(aa, ab):
                continue
        ma = shape_mask(shape_a, w, h)
        mb = shape_mask(shape_b, w, h)
        if np.any(dilate_mask(ma, cfg.guard_px) & mb):
            continue
        color_a, color_b, bg = _color_permutation(rng)
        if cfg.task == LEFT_RIGHT:
            # label 1: the brighter object lies left of the darker one
            want_a_brighter = (ca[0] < cb[0]) == (label == 1)
        else:
            # label 1: the brighter object has the larger area
            want_a_brighter = (aa > ab) == (label == 1)
        if _brightness_swap_needed(color_a, color_b, want_a_brighter):
            color_a, color_b = color_b, color_a
        return Scene(
            objects=[SceneObject(shape_a, color_a, 0), SceneObject(shape_b, color_b, 1)],
            background=bg, label=label, task=cfg.task,
            metadata={"size_param": [sa, sb], "shape_kind": [ka, kb]})
    raise GenerationBudgetError(
        f"{cfg.task}: no valid placement within {cfg.budget} tries")


def _build_front_back(cfg: TaskConfig, split: str, label: int, rng: Rng) -> Scene:
    w, h = cfg.canvas
    olo, ohi = cfg.overlap_range
    for _ in range(cfg.budget):
        ka, na = _pick_kind(cfg, rng, split)
        kb, nb = _pick_kind(cfg, rng, split)
        sa = _sample_size(rng, _size_ranges(cfg, split))
        sb = _sample_size(rng, _size_ranges(cfg, split))
        ca = _sample_center(cfg, rng, sa * _REACH_FACTOR[ka])
        dist = rng.uniform(0.35, 0.85) * (sa + sb)
        ang = rng.uniform(0.0, 2 * math.pi)
        cb = ca + dist * np.array([math.cos(ang), math.sin(ang)])
        reach_b = sb * _REACH_FACTOR[kb] + PLACE_MARGIN
        if not (reach_b <= cb[0] <= w - reach_b and reach_b <= cb[1] <= h - reach_b):
            continue
        shape_a = _make_object_shape(cfg, rng, ka, na, sa, ca)
        shape_b = _make_object_shape(cfg, rng, kb, nb, sb, cb)
        ma = shape_mask(shape_a, w, h)
        mb = shape_mask(shape_b, w, h)
        na_px, nb_px = int(ma.sum()), int(mb.sum())
        inter = int(np.sum(ma & mb))
        if not na_px or not nb_px:
            continue
        overlap = inter / min(na_px, nb_px)
        if not olo <= overlap <= ohi:
            continue
        # either depth order must leave the occluded object >= 25% visible
        if (na_px - inter) / na_px < 0.25 or (nb_px - inter) / nb_px < 0.25:
            continue
        color_a, color_b, bg = _color_permutation(rng)
        z_a, z_b = (0, 1) if rng.sign() > 0 else (1, 0)
        # label 1: the brighter object sits in front (higher z)
        want_a_brighter = (z_a > z_b) == (label == 1)
        if _brightness_swap_needed(color_a, color_b, want_a_brighter):
            color_a, color_b = color_b, color_a
        return Scene(
            objects=[SceneObject(shape_a, color_a, z_a), SceneObject(shape_b, color_b, z_b)],
            background=bg, label=label, task=cfg.task,
            metadata={"size_param": [sa, sb], "shape_kind": [ka, kb],
                      "overlap_fraction": overlap})
    raise GenerationBudgetError(
        f"front_back: no valid occlusion within {cfg.budget} tries")


def _single_object_colors(cfg: TaskConfig, rng: Rng):
    if cfg.color_mode == "two_color":
        return 2, 0  # white object on black
    pairs = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]
    return rng.choice(pairs)


def _build_convexity(cfg: TaskConfig, split: str, label: int, rng: Rng) -> Scene:
    n = rng.choice((4, 5, 6))
    size = _sample_size(rng, _size_ranges(cfg, split))
    kind = IRREGULAR_CONVEX if label == 1 else NON_CONVEX
    center = _sample_center(cfg, rng, size * 1.32)
    shape = geometry.gen_shape(
        kind, rng, size, n=n, rotation=rng.uniform(0.0, 2 * math.pi),
        center=center, reflex_range=cfg.reflex_range, max_angle=150.0,
        budget=cfg.budget)
    color, bg = _single_object_colors(cfg, rng)
    return Scene(objects=[SceneObject(shape, color, 0)], background=bg,
                 label=label, task=cfg.task,
                 metadata={"size_param": size, "shape_kind": kind, "n": n})


def _build_straightness(cfg: TaskConfig, split: str, label: int, rng: Rng) -> Scene:
    w, h = cfg.canvas
    r = cfg.stroke_width / 2.0
    for _ in range(cfg.budget):
        length = _sample_size(rng, _size_ranges(cfg, split))
        shape = geometry.gen_shape(
            POLYLINE, rng, length, rotation=rng.uniform(0.0, 2 * math.pi),
            center=(0.0, 0.0), stroke_width=cfg.stroke_width,
            straight=(label == 1), turn_range=cfg.turn_angle_range)
        v = shape.vertices
        x0, y0 = v[:, 0].min() - r, v[:, 1].min() - r
        x1, y1 = v[:, 0].max() + r, v[:, 1].max() + r
        if x1 - x0 > w - 2 * PLACE_MARGIN or y1 - y0 > h - 2 * PLACE_MARGIN:
            continue  # does not fit at this orientation; redraw
        tx = rng.uniform(PLACE_MARGIN - x0, w - PLACE_MARGIN - x1)
        ty = rng.uniform(PLACE_MARGIN - y0, h - PLACE_MARGIN - y1)
        shape = translate(shape, tx, ty)
        color, bg = _single_object_colors(cfg, rng)
        return Scene(objects=[SceneObject(shape, color, 0)], background=bg,
                     label=label, task=cfg.task,
                     metadata={"size_param": length, "shape_kind": POLYLINE})
    raise GenerationBudgetError(
        f"straightness: line of the drawn lengths never fit the canvas "
        f"within {cfg.budget} tries")


_BUILDERS = {
    LEFT_RIGHT: _build_disjoint_pair,
    SIZE: _build_disjoint_pair,
    FRONT_BACK: _build_front_back,
    CONVEXITY: _build_convexity,
    STRAIGHTNESS: _build_straightness,
}


def build_scene(cfg: TaskConfig, split: str, label: int, rng: Rng) -> Scene:
    """Deterministically construct one labeled scene from an item stream."""
    return _BUILDERS[cfg.task](cfg, split, label, rng)


# ---------------------------------------------------------------------------
# Oracle labels (vector geometry only; no raster in the loop)
# ---------------------------------------------------------------------------

def oracle_label(scene: Scene) -> int:
    """Recompute the class label from the scene's stored geometry."""
    if scene.task in (LEFT_RIGHT, SIZE, FRONT_BACK):
        a, b = scene.objects
        bright, dark = (a, b) if a.color_index > b.color_index else (b, a)
        if scene.task == LEFT_RIGHT:
            return int(geometry.centroid(bright.shape)[0] < geometry.centroid(dark.shape)[0])
        if scene.task == SIZE:
            return int(geometry.area(bright.shape) > geometry.area(dark.shape))
        return int(bright.z_order > dark.z_order)
    obj = scene.objects[0].shape
    if scene.task == CONVEXITY:
        return int(geometry.is_convex(obj))
    return int(geometry.straightness_oracle(obj))


# ---------------------------------------------------------------------------
# Item enumeration and manifest assembly
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ItemSpec:
    index: int     # global, drives the per-item child seed
    split: str
    label: int
    ordinal: int   # position within (split, label)


def iter_items(cfg: TaskConfig) -> Iterator[ItemSpec]:
    index = 0
    for split, count in (("train", cfg.count_per_class),
                         ("test", cfg.test_count_per_class)):
        for label in (0, 1):
            for i in range(count):
                yield ItemSpec(index, split, label, i)
                index += 1


def build_item(cfg: TaskConfig, item: ItemSpec):
    """(manifest entry, scene) for one item, from its own child stream."""
    seed = child_seed(cfg.seed, item.index)
    scene = build_scene(cfg, item.split, item.label, Rng(seed))
    item_id = f"{cfg.task}-{item.split}-{item.label}-{item.ordinal:05d}"
    entry = {
        "id": item_id,
        "path": f"images/{item_id}.{cfg.image_format}",
        "label": item.label,
        "split": item.split,
        "task": cfg.task,
        "color_mode": cfg.color_mode,
        "size_param": scene.metadata["size_param"],
        "shape_kind": scene.metadata["shape_kind"],
        "seed": f"{seed:016x}",
        "colors": {"objects": [o.color_index for o in scene.objects],
                   "background": scene.background},
        "split_policy": cfg.split_policy,
    }
    return entry, scene


def regenerate_scene(cfg: TaskConfig, entry: dict) -> Scene:
    """Rebuild an item's scene bit-identically from its manifest entry."""
    return build_scene(cfg, entry["split"], entry["label"],
                       Rng(int(entry["seed"], 16)))


def generate_manifest(cfg: TaskConfig) -> DatasetManifest:
    """In-memory manifest for cfg (images not rendered)."""
    return DatasetManifest(cfg, tuple(build_item(cfg, it)[0] for it in iter_items(cfg)))


def _checked(cfg: TaskConfig, task: str) -> TaskConfig:
    if cfg.task != task:
        raise DataError(f"config is for task {cfg.task!r}, expected {task!r}")
    return cfg


def gen_left_right(cfg: TaskConfig) -> DatasetManifest:
    return generate_manifest(_checked(cfg, LEFT_RIGHT))


def gen_front_back(cfg: TaskConfig) -> DatasetManifest:
    return generate_manifest(_checked(cfg, FRONT_BACK))


def gen_size(cfg: TaskConfig) -> DatasetManifest:
    return generate_manifest(_checked(cfg, SIZE))


def gen_convexity(cfg: TaskConfig) -> DatasetManifest:
    return generate_manifest(_checked(cfg, CONVEXITY))


def gen_straightness(cfg: TaskConfig) -> DatasetManifest:
    return generate_manifest(_checked(cfg, STRAIGHTNESS))


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------

def resolve_threads(threads: Optional[int] = None) -> int:
    """Worker count: explicit arg, else the SPATIAL_BENCH_THREADS env var;
    0 (or unset) means auto."""
    if threads is None:
        raw = os.environ.get(_ENV_THREADS, "0")
        try:
            threads = int(raw)
        except ValueError:
            raise DataError(f"{_ENV_THREADS} must be an integer, got {raw!r}")
    if threads < 0:
        raise DataError("thread count must be >= 0")
    if threads == 0:
        threads = min(8, os.cpu_count() or 1)
    return threads


def _encode_item(args):
    cfg, item = args
    entry, scene = build_item(cfg, item)
    img = rasterize_scene(scene, cfg.canvas[0], cfg.canvas[1])
    payload = encode_png(img) if cfg.image_format == "png" else encode_pgm(img)
    return entry, payload


def write_dataset(cfg: TaskConfig, out_dir, force: bool = False,
                  threads: Optional[int] = None) -> DatasetManifest:
    """Render every item of cfg under out_dir.

    Layout: out_dir/images/*.{pgm,png}, out_dir/manifest.jsonl,
    out_dir/config.json.  Output bytes depend only on (cfg, seed), never on
    the worker count.  Refuses a non-empty out_dir unless force is set.
    """
    out = Path(out_dir)
    if out.exists() and any(out.iterdir()) and not force:
        raise DataError(f"output directory {out} is not empty (use force)")
    (out / "images").mkdir(parents=True, exist_ok=True)
    items = list(iter_items(cfg))
    n_workers = resolve_threads(threads)
    entries: List[dict] = []
    if n_workers <= 1 or len(items) < 4:
        results = map(_encode_item, ((cfg, it) for it in items))
        for entry, payload in results:
            (out / entry["path"]).write_bytes(payload)
            entries.append(entry)
    else:
        with multiprocessing.Pool(n_workers) as pool:
            for entry, payload in pool.imap(
                    _encode_item, ((cfg, it) for it in items),
                    chunksize=max(1, len(items) // (8 * n_workers))):
                (out / entry["path"]).write_bytes(payload)
                entries.append(entry)
    manifest = DatasetManifest(cfg, tuple(entries))
    with open(out / "manifest.jsonl", "w") as fh:
        for entry in entries:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")
    with open(out / "config.json", "w") as fh:
        json.dump(cfg.to_json(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def load_dataset(path) -> DatasetManifest:
    """Read back a dataset directory written by write_dataset."""
    root = Path(path)
    cfg_path = root / "config.json"
    man_path = root / "manifest.jsonl"
    if not cfg_path.is_file() or not man_path.is_file():
        raise DataError(f"{root} is not a dataset directory "
                        f"(missing config.json or manifest.jsonl)")
    with open(cfg_path) as fh:
        cfg = TaskConfig.from_json(json.load(fh))
    entries = []
    with open(man_path) as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                entries.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise DataError(f"{man_path}:{line_no}: bad JSON: {exc}")
    return DatasetManifest(cfg, tuple(entries))
