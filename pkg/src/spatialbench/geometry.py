"""Shape construction and exact geometric oracles.

All polygons are simple and stored counterclockwise in pixel units.
Construction is rejection-sampled from a caller-supplied Rng, so equal
(spec, seed) pairs yield bit-identical vertex lists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import GenerationBudgetError, ShapeError
from .rng import Rng

REGULAR_POLYGON = "regular_polygon"
IRREGULAR_CONVEX = "irregular_convex_polygon"
NON_CONVEX = "non_convex_polygon"
CIRCLE = "circle"
POLYLINE = "polyline"

POLYGON_KINDS = (REGULAR_POLYGON, IRREGULAR_CONVEX, NON_CONVEX)

# Irregular-convex jitter: fraction of the angular step / of the radius.
ANGLE_JITTER = 0.25
RADIUS_JITTER = 0.30

# Non-convex construction defaults.  The reflex target range sits well above
# the 210 deg floor so that a radius-9 disk response at the reflex vertex
# clears the 0.58 decision cutoff with margin at every generated size.
REFLEX_MIN = 210.0
REFLEX_RANGE = (235.0, 255.0)

DEFAULT_BUDGET = 1000

COLLINEAR_EPS = 1e-9
STRAIGHT_TOL_RAD = 1e-6


@dataclass(frozen=True)
class Shape:
    """One scene object: polygon vertex list, circle, or stroked polyline.

    vertices: (n,2) float array.  Polygons: CCW boundary.  Circle: unused
    (center/radius carry the geometry).  Polyline: ordered waypoints.
    size_param: circumscribed-circle radius; for polylines, total arc length.
    """

    kind: str
    vertices: np.ndarray
    size_param: float
    center: Optional[np.ndarray] = None
    radius: float = 0.0
    stroke_width: float = 3.0

    def __post_init__(self):
        object.__setattr__(self, "vertices", np.asarray(self.vertices, dtype=float))


# ---------------------------------------------------------------------------
# Oracles
# ---------------------------------------------------------------------------

def _require_polygon(p: Shape) -> np.ndarray:
    if p.kind not in POLYGON_KINDS:
        raise ShapeError(f"expected a polygon, got {p.kind}")
    v = p.vertices
    if len(v) < 3:
        raise ShapeError(f"polygon needs >= 3 vertices, got {len(v)}")
    return v


def is_convex(p: Shape) -> bool:
    """True iff all cross products of consecutive edges share one sign.

    Zero cross products (collinear triples) are ignored: convexity is about
    reflex vertices, and a flat vertex is not reflex.
    """
    v = _require_polygon(p)
    e = np.roll(v, -1, axis=0) - v
    cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
    scale = float(np.abs(e).max()) ** 2 or 1.0
    nz = cross[np.abs(cross) > COLLINEAR_EPS * scale]
    if len(nz) == 0:
        return True
    return bool(np.all(nz > 0) or np.all(nz < 0))


def signed_area(vertices: np.ndarray) -> float:
    """Shoelace signed area; positive for CCW order."""
    x, y = vertices[:, 0], vertices[:, 1]
    x2, y2 = np.roll(x, -1), np.roll(y, -1)
    return float(np.sum(x * y2 - x2 * y) / 2.0)


def area(p: Shape) -> float:
    """Area in px^2: shoelace for polygons, pi*r^2 for circles."""
    if p.kind == CIRCLE:
        return math.pi * p.radius ** 2
    if p.kind == POLYLINE:
        raise ShapeError("polylines have no area")
    return abs(signed_area(_require_polygon(p)))


def centroid(p: Shape) -> np.ndarray:
    """Area centroid of a polygon or circle."""
    if p.kind == CIRCLE:
        return np.asarray(p.center, dtype=float)
    v = _require_polygon(p)
    x, y = v[:, 0], v[:, 1]
    x2, y2 = np.roll(x, -1), np.roll(y, -1)
    w = x * y2 - x2 * y
    a = np.sum(w) / 2.0
    cx = np.sum((x + x2) * w) / (6.0 * a)
    cy = np.sum((y + y2) * w) / (6.0 * a)
    return np.array([cx, cy])


def interior_angles(vertices: np.ndarray) -> np.ndarray:
    """Interior angle at each vertex of a CCW simple polygon, in degrees."""
    n = len(vertices)
    out = np.empty(n)
    for i in range(n):
        a, b, c = vertices[i - 1], vertices[i], vertices[(i + 1) % n]
        u = a - b
        w = c - b
        cross = w[0] * u[1] - w[1] * u[0]
        out[i] = math.degrees(math.atan2(cross, float(u @ w)) % (2 * math.pi))
    return out


def straightness_oracle(p: Shape) -> bool:
    """True iff all polyline waypoints are collinear within 1e-6 rad."""
    if p.kind != POLYLINE:
        raise ShapeError(f"expected a polyline, got {p.kind}")
    w = p.vertices
    if len(w) not in (2, 3):
        raise ShapeError("polyline must have 2 or 3 waypoints")
    segs = np.diff(w, axis=0)
    lens = np.hypot(segs[:, 0], segs[:, 1])
    if np.any(lens < 1e-12):
        raise ShapeError("degenerate zero-length polyline segment")
    if len(w) == 2:
        return True
    u, v = segs[0] / lens[0], segs[1] / lens[1]
    turn = abs(math.atan2(u[0] * v[1] - u[1] * v[0], float(u @ v)))
    return turn <= STRAIGHT_TOL_RAD


def translate(p: Shape, dx: float, dy: float) -> Shape:
    """The same shape shifted by (dx, dy)."""
    off = np.array([dx, dy], dtype=float)
    center = None if p.center is None else np.asarray(p.center, dtype=float) + off
    return Shape(p.kind, p.vertices + off, p.size_param, center=center,
                 radius=p.radius, stroke_width=p.stroke_width)


@dataclass(frozen=True)
class PairRelation:
    """Rasterized spatial relation between two area shapes."""

    centroid_dx: float
    disjoint: bool
    overlap_fraction_of_smaller: float


def pair_relation(a: Shape, b: Shape, guard_px: int = 3) -> PairRelation:
    """Relation of two area shapes on a local grid that covers them both.

    disjoint means the rasterized masks stay separated even after dilating
    one of them by a guard_px-radius disk (symmetric in the arguments);
    overlap_fraction_of_smaller is the intersection pixel count over the
    smaller mask's pixel count.
    """
    from . import raster  # deferred: raster depends on this module

    if a.kind == POLYLINE or b.kind == POLYLINE:
        raise ShapeError("pair_relation needs two area shapes")
    xa0, ya0, xa1, ya1 = raster.shape_bounds(a)
    xb0, yb0, xb1, yb1 = raster.shape_bounds(b)
    pad = guard_px + 2
    x0 = math.floor(min(xa0, xb0)) - pad
    y0 = math.floor(min(ya0, yb0)) - pad
    w = math.ceil(max(xa1, xb1)) - x0 + pad
    h = math.ceil(max(ya1, yb1)) - y0 + pad
    ma = raster.shape_mask(translate(a, -x0, -y0), w, h)
    mb = raster.shape_mask(translate(b, -x0, -y0), w, h)
    inter = int(np.sum(ma & mb))
    smaller = min(int(ma.sum()), int(mb.sum()))
    overlap = inter / smaller if smaller else 0.0
    if inter:
        disjoint = False
    else:
        disjoint = not np.any(raster.dilate_mask(ma, guard_px) & mb)
    dx = float(centroid(a)[0] - centroid(b)[0])
    return PairRelation(dx, disjoint, overlap)


def point_segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    d = b - a
    l2 = float(d @ d)
    if l2 == 0.0:
        return float(np.hypot(*(p - a)))
    t = min(1.0, max(0.0, float((p - a) @ d) / l2))
    return float(np.hypot(*(p - (a + t * d))))


def _points_in_polygon(points: np.ndarray, vertices: np.ndarray) -> np.ndarray:
    """Vectorized even-odd test for an (m, 2) batch of points."""
    x, y = points[:, 0], points[:, 1]
    inside = np.zeros(len(points), dtype=bool)
    n = len(vertices)
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        straddles = (y1 <= y) != (y2 <= y)
        if y1 != y2 and straddles.any():
            xc = x1 + (y[straddles] - y1) * (x2 - x1) / (y2 - y1)
            hit = np.zeros(len(points), dtype=bool)
            hit[straddles] = x[straddles] < xc
            inside ^= hit
    return inside


def _point_in_polygon(p: np.ndarray, vertices: np.ndarray) -> bool:
    """Even-odd test, strict enough for interiority checks during generation."""
    return bool(_points_in_polygon(np.asarray(p, dtype=float)[None], vertices)[0])


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def _regular_vertices(n: int, radius: float, rotation: float) -> np.ndarray:
    ang = rotation + np.arange(n) * (2 * math.pi / n)
    return np.column_stack([np.cos(ang), np.sin(ang)]) * radius


def _irregular_convex_vertices(
    n: int,
    radius: float,
    rotation: float,
    rng: Rng,
    max_angle: float = 178.0,
    min_angle: float = 5.0,
    budget: int = DEFAULT_BUDGET,
) -> np.ndarray:
    """Jitter a regular polygon's vertex angles and radii; reject non-convex."""
    step = 2 * math.pi / n
    for _ in range(budget):
        ang = np.sort(np.arange(n) * step + rng.uniform_vec(-ANGLE_JITTER, ANGLE_JITTER, n) * step)
        rad = radius * (1.0 + rng.uniform_vec(-RADIUS_JITTER, RADIUS_JITTER, n))
        v = np.column_stack([np.cos(ang + rotation), np.sin(ang + rotation)]) * rad[:, None]
        sh = Shape(IRREGULAR_CONVEX, v, radius)
        if not is_convex(sh):
            continue
        a = interior_angles(v)
        if a.max() <= max_angle and a.min() >= min_angle:
            return v
    raise GenerationBudgetError(
        f"irregular convex {n}-gon: no convex sample within {budget} tries "
        f"(radius={radius}, max_angle={max_angle})"
    )


def _non_convex_vertices(
    n: int,
    radius: float,
    rotation: float,
    rng: Rng,
    reflex_range: tuple = REFLEX_RANGE,
    budget: int = DEFAULT_BUDGET,
) -> np.ndarray:
    """Push one vertex of a convex base inward until it reaches a reflex target.

    Quality gates keep the reflex wedge well formed: the other interior
    angles stay in [22, 150] deg, both arms at the reflex vertex are at
    least max(9, 0.45*radius) long, and the vertex keeps a clearance of
    max(8, 0.35*radius) from every non-incident edge.  The gates guarantee
    the reflex feature survives rasterization at every generated size.
    """
    min_arm = min(max(9.0, 0.45 * radius), 0.6 * radius)
    min_clear = min(max(8.0, 0.35 * radius), 0.5 * radius)
    for _ in range(budget):
        v = _irregular_convex_vertices(n, radius, rotation, rng, max_angle=140.0, min_angle=25.0)
        i = rng.integers(0, n)
        target = rng.uniform(*reflex_range)
        chord_mid = (v[i - 1] + v[(i + 1) % n]) / 2.0
        d = chord_mid - v[i]
        norm = float(np.hypot(*d))
        if norm < 1e-9:
            continue
        d = d / norm
        rest = np.delete(v, i, axis=0)
        # farthest inward travel that stays strictly inside the reduced polygon
        ts = np.linspace(0.5, 2.5 * radius, 200)
        inside = _points_in_polygon(chord_mid[None] + ts[:, None] * d[None], rest)
        if not inside[0]:
            continue
        t_max = ts[int(np.argmin(inside)) - 1] if not inside.all() else ts[-1]
        lo, hi = 0.0, 0.95 * t_max
        w = v.copy()
        for _ in range(60):
            t = (lo + hi) / 2.0
            w[i] = chord_mid + t * d
            if interior_angles(w)[i] < target:
                lo = t
            else:
                hi = t
        w[i] = chord_mid + lo * d
        ang = interior_angles(w)
        others = np.delete(ang, i)
        if abs(ang[i] - target) > 1.5:
            continue
        if others.min() < 22.0 or others.max() > 150.0:
            continue
        arms = (np.hypot(*(w[i] - w[i - 1])), np.hypot(*(w[i] - w[(i + 1) % n])))
        if min(arms) < min_arm:
            continue
        clear = min(
            point_segment_distance(w[i], w[j], w[(j + 1) % n])
            for j in range(n)
            if j != i and (j + 1) % n != i
        )
        if clear < min_clear:
            continue
        return w
    raise GenerationBudgetError(
        f"non-convex {n}-gon: gates not met within {budget} tries (radius={radius})"
    )


def _polyline_waypoints(
    length: float,
    rotation: float,
    rng: Rng,
    straight: bool,
    turn_range: tuple,
) -> np.ndarray:
    """Waypoints around the origin.  Broken lines bend at a single vertex by a
    turning angle drawn from turn_range (degrees off straight)."""
    if straight:
        d = np.array([math.cos(rotation), math.sin(rotation)])
        return np.stack([-d * length / 2.0, d * length / 2.0])
    frac = rng.uniform(0.35, 0.65)
    turn = math.radians(rng.uniform(*turn_range)) * rng.sign()
    d1 = np.array([math.cos(rotation), math.sin(rotation)])
    t2 = rotation + math.pi - turn  # direction from vertex out along arm 2
    d2 = np.array([math.cos(t2), math.sin(t2)])
    vertex = np.zeros(2)
    p0 = vertex + d1 * (length * frac)
    p2 = vertex + d2 * (length * (1.0 - frac))
    return np.stack([p0, vertex, p2])


def gen_shape(
    kind: str,
    rng: Rng,
    size_param: float,
    n: int = 0,
    rotation: float = 0.0,
    center: Sequence[float] = (0.0, 0.0),
    stroke_width: float = 3.0,
    straight: bool = True,
    turn_range: tuple = (120.0, 140.0),
    reflex_range: tuple = REFLEX_RANGE,
    max_angle: float = 178.0,
    budget: int = DEFAULT_BUDGET,
) -> Shape:
    """Construct a Shape of the given kind centered at `center`.

    size_param is the circumscribed radius (polygons/circles) or the total
    arc length (polylines).  Raises GenerationBudgetError when rejection
    sampling cannot satisfy the kind's invariants.
    """
    if size_param <= 0:
        raise ShapeError("size_param must be positive")
    c = np.asarray(center, dtype=float)
    if kind == REGULAR_POLYGON:
        v = _regular_vertices(n, size_param, rotation) + c
        return Shape(kind, v, size_param)
    if kind == IRREGULAR_CONVEX:
        v = _irregular_convex_vertices(n, size_param, rotation, rng,
                                       max_angle=max_angle, budget=budget) + c
        return Shape(kind, v, size_param)
    if kind == NON_CONVEX:
        v = _non_convex_vertices(n, size_param, rotation, rng,
                                 reflex_range=reflex_range, budget=budget) + c
        return Shape(kind, v, size_param)
    if kind == CIRCLE:
        return Shape(kind, np.empty((0, 2)), size_param, center=c, radius=size_param)
    if kind == POLYLINE:
        w = _polyline_waypoints(size_param, rotation, rng, straight, turn_range) + c
        return Shape(kind, w, size_param, stroke_width=stroke_width)
    raise ShapeError(f"unknown shape kind: {kind}")
