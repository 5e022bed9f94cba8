"""Deterministic rasterization of scenes to palette grayscale images.

Coverage rule: a pixel (x, y) samples its center (x+0.5, y+0.5).  Polygon
fill is even-odd scanline with the half-open rule (an edge covers scanlines
y1 <= yc < y2), spans are filled half-open [x_left, x_right), and boundary
ties break toward the lower coordinate.  Circles and polyline strokes
include their boundary (distance <= radius).  No anti-aliasing: outputs
stay on the palette exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import RenderError
from .geometry import CIRCLE, POLYLINE, Shape

PALETTE = (0, 128, 255)  # black, grey, white
DEFAULT_CANVAS = (224, 224)
DEFAULT_STROKE_WIDTH = 3.0
BOUNDS_MARGIN = 2.0


@dataclass(frozen=True)
class SceneObject:
    shape: Shape
    color_index: int  # palette index
    z_order: int      # higher draws later (in front)


@dataclass(frozen=True)
class Scene:
    """Vector-level description of one labeled image."""

    objects: List[SceneObject]
    background: int  # palette index
    label: int
    task: str
    metadata: dict = field(default_factory=dict)


def fill_polygon_mask(vertices: np.ndarray, width: int, height: int) -> np.ndarray:
    """Even-odd scanline fill of a simple polygon at pixel centers."""
    mask = np.zeros((height, width), dtype=bool)
    v = np.asarray(vertices, dtype=float)
    ys = np.arange(height) + 0.5
    xs = np.arange(width) + 0.5
    crossings = []
    n = len(v)
    for i in range(n):
        x1, y1 = v[i]
        x2, y2 = v[(i + 1) % n]
        if y1 == y2:
            continue
        lo, hi = (y1, y2) if y1 < y2 else (y2, y1)
        covered = (ys >= lo) & (ys < hi)
        xc = np.full(height, np.nan)
        xc[covered] = x1 + (ys[covered] - y1) * (x2 - x1) / (y2 - y1)
        crossings.append(xc)
    if not crossings:
        return mask
    xc = np.sort(np.stack(crossings, axis=1), axis=1)  # NaNs sort to the end
    n_cross = np.sum(~np.isnan(xc), axis=1)
    max_pairs = xc.shape[1] // 2
    for k in range(max_pairs):
        has = n_cross >= 2 * (k + 1)
        if not np.any(has):
            break
        xl = xc[:, 2 * k]
        xr = xc[:, 2 * k + 1]
        rowmask = has[:, None] & (xs[None, :] >= xl[:, None]) & (xs[None, :] < xr[:, None])
        mask |= rowmask
    return mask


def fill_circle_mask(center: np.ndarray, radius: float, width: int, height: int) -> np.ndarray:
    ys = (np.arange(height) + 0.5) - center[1]
    xs = (np.arange(width) + 0.5) - center[0]
    return (xs[None, :] ** 2 + ys[:, None] ** 2) <= radius ** 2


def stroke_polyline_mask(
    waypoints: np.ndarray, stroke_width: float, width: int, height: int
) -> np.ndarray:
    """Round-capped stroke: pixel centers within stroke_width/2 of any segment."""
    r = stroke_width / 2.0
    mask = np.zeros((height, width), dtype=bool)
    w = np.asarray(waypoints, dtype=float)
    for a, b in zip(w[:-1], w[1:]):
        x0 = max(0, int(np.floor(min(a[0], b[0]) - r - 1)))
        x1 = min(width, int(np.ceil(max(a[0], b[0]) + r + 1)))
        y0 = max(0, int(np.floor(min(a[1], b[1]) - r - 1)))
        y1 = min(height, int(np.ceil(max(a[1], b[1]) + r + 1)))
        if x0 >= x1 or y0 >= y1:
            continue
        cx = np.arange(x0, x1) + 0.5
        cy = np.arange(y0, y1) + 0.5
        gx, gy = np.meshgrid(cx, cy)
        d = b - a
        l2 = float(d @ d)
        if l2 == 0.0:
            px, py = a
        else:
            t = np.clip(((gx - a[0]) * d[0] + (gy - a[1]) * d[1]) / l2, 0.0, 1.0)
            px = a[0] + t * d[0]
            py = a[1] + t * d[1]
        mask[y0:y1, x0:x1] |= (gx - px) ** 2 + (gy - py) ** 2 <= r * r
    return mask


def shape_mask(shape: Shape, width: int, height: int) -> np.ndarray:
    if shape.kind == CIRCLE:
        return fill_circle_mask(shape.center, shape.radius, width, height)
    if shape.kind == POLYLINE:
        return stroke_polyline_mask(shape.vertices, shape.stroke_width, width, height)
    return fill_polygon_mask(shape.vertices, width, height)


def dilate_mask(mask: np.ndarray, radius: int) -> np.ndarray:
    """Binary dilation by a radius-r disk (shift-and-or)."""
    if radius <= 0:
        return mask
    h, w = mask.shape
    dy, dx = np.mgrid[-radius:radius + 1, -radius:radius + 1]
    offsets = np.argwhere(dx * dx + dy * dy <= radius * radius) - radius
    pad = np.zeros((h + 2 * radius, w + 2 * radius), dtype=bool)
    pad[radius:radius + h, radius:radius + w] = mask
    out = np.zeros((h, w), dtype=bool)
    for oy, ox in offsets:
        out |= pad[radius + oy:radius + oy + h, radius + ox:radius + ox + w]
    return out


def shape_bounds(shape: Shape):
    if shape.kind == CIRCLE:
        c, r = shape.center, shape.radius
        return c[0] - r, c[1] - r, c[0] + r, c[1] + r
    v = shape.vertices
    pad = shape.stroke_width / 2.0 if shape.kind == POLYLINE else 0.0
    return (v[:, 0].min() - pad, v[:, 1].min() - pad,
            v[:, 0].max() + pad, v[:, 1].max() + pad)


def _check_bounds(scene: Scene, width: int, height: int):
    for idx, obj in enumerate(scene.objects):
        x0, y0, x1, y1 = shape_bounds(obj.shape)
        if x0 < BOUNDS_MARGIN or y0 < BOUNDS_MARGIN or \
           x1 > width - BOUNDS_MARGIN or y1 > height - BOUNDS_MARGIN:
            raise RenderError(
                f"object {idx} ({obj.shape.kind}) exceeds canvas bounds: "
                f"bbox=({x0:.1f},{y0:.1f})-({x1:.1f},{y1:.1f}), canvas={width}x{height}"
            )


def rasterize_scene(scene: Scene, width: int = DEFAULT_CANVAS[0],
                    height: int = DEFAULT_CANVAS[1]) -> np.ndarray:
    """Painter's algorithm: background, then objects in ascending z_order."""
    _check_bounds(scene, width, height)
    img = np.full((height, width), PALETTE[scene.background], dtype=np.uint8)
    for obj in sorted(scene.objects, key=lambda o: o.z_order):
        img[shape_mask(obj.shape, width, height)] = PALETTE[obj.color_index]
    return img


def render_object_solo(scene: Scene, index: int, width: int = DEFAULT_CANVAS[0],
                       height: int = DEFAULT_CANVAS[1]) -> np.ndarray:
    """Render only objects[index] on the scene's background."""
    if not 0 <= index < len(scene.objects):
        raise RenderError(f"no object at index {index}")
    solo = Scene([scene.objects[index]], scene.background, scene.label,
                 scene.task, scene.metadata)
    return rasterize_scene(solo, width, height)
