"""Rasterization conventions: coverage rule, palette closure, painter's
algorithm, and area fidelity against the analytic oracle."""

import math

import numpy as np
import pytest

from spatialbench.errors import RenderError
from spatialbench.geometry import (CIRCLE, IRREGULAR_CONVEX, POLYLINE,
                                   REGULAR_POLYGON, Rng, Shape, area,
                                   gen_shape, translate)
from spatialbench.raster import (PALETTE, Scene, SceneObject, dilate_mask,
                                 fill_circle_mask, fill_polygon_mask,
                                 rasterize_scene, render_object_solo,
                                 shape_mask, stroke_polyline_mask)


def scene_of(shapes_colors, background=0, label=1, task="test"):
    objs = [SceneObject(s, c, z) for z, (s, c) in enumerate(shapes_colors)]
    return Scene(objs, background, label, task)


def centered_square(r, cx=112.0, cy=112.0):
    v = [[cx - r, cy - r], [cx + r, cy - r], [cx + r, cy + r], [cx - r, cy + r]]
    return Shape(REGULAR_POLYGON, v[::-1], r)  # CCW in image coords


def test_empty_scene_is_flat_background():
    img = rasterize_scene(Scene([], 0, 0, "test"), 32, 32)
    assert img.shape == (32, 32)
    assert np.all(img == 0)
    img = rasterize_scene(Scene([], 1, 0, "test"), 8, 8)
    assert np.all(img == 128)


def test_pixel_center_coverage_exact_square():
    # square [2, 6) x [2, 6) covers pixel centers 2.5..5.5 -> 4x4 pixels
    v = [[2.0, 2.0], [6.0, 2.0], [6.0, 6.0], [2.0, 6.0]]
    m = fill_polygon_mask(np.array(v), 10, 10)
    assert m.sum() == 16
    ys, xs = np.nonzero(m)
    assert ys.min() == 2 and ys.max() == 5 and xs.min() == 2 and xs.max() == 5


def test_half_open_rule_makes_adjacent_polygons_tile():
    left = np.array([[1.0, 1.0], [4.0, 1.0], [4.0, 7.0], [1.0, 7.0]])
    right = np.array([[4.0, 1.0], [9.0, 1.0], [9.0, 7.0], [4.0, 7.0]])
    ml = fill_polygon_mask(left, 12, 12)
    mr = fill_polygon_mask(right, 12, 12)
    assert not np.any(ml & mr)          # no double coverage
    both = fill_polygon_mask(np.array([[1.0, 1.0], [9.0, 1.0], [9.0, 7.0], [1.0, 7.0]]), 12, 12)
    assert np.array_equal(ml | mr, both)  # no seam


def test_circle_mask_includes_boundary():
    m = fill_circle_mask(np.array([5.5, 5.5]), 2.0, 11, 11)
    # pixel centers at exactly distance 2.0 are included
    assert m[5, 3] and m[5, 7] and m[3, 5] and m[7, 5]
    assert not m[3, 3]


def test_stroke_covers_capsule():
    # off-integer y avoids coverage ties at the stroke edges
    m = stroke_polyline_mask(np.array([[5.0, 10.2], [25.0, 10.2]]), 3.0, 32, 32)
    # a 20 px segment at width 3: about 60 px plus round caps
    expected = 20 * 3 + math.pi * 1.5 ** 2
    assert abs(int(m.sum()) - expected) < 10
    ys = np.nonzero(m)[0]
    assert set(ys) == {9, 10, 11}  # three rows for width 3 on a row-aligned line


def test_palette_closure_and_painter_order():
    a = centered_square(30, 100, 100)
    b = centered_square(30, 120, 120)
    scene = Scene([SceneObject(a, 1, 0), SceneObject(b, 2, 1)], 0, 1, "test")
    img = rasterize_scene(scene, 224, 224)
    assert set(np.unique(img)) <= set(PALETTE)
    # overlap belongs to the higher z object
    assert img[120, 120] == PALETTE[2]
    assert img[80, 80] == PALETTE[1]


def test_front_object_matches_its_solo_render():
    a = centered_square(30, 100, 100)
    b = centered_square(30, 120, 120)
    scene = Scene([SceneObject(a, 1, 0), SceneObject(b, 2, 1)], 0, 1, "test")
    img = rasterize_scene(scene, 224, 224)
    solo_front = render_object_solo(scene, 1, 224, 224)
    front_px = solo_front == PALETTE[2]
    assert np.array_equal(img[front_px], solo_front[front_px])
    # occluded object lost pixels
    solo_back = render_object_solo(scene, 0, 224, 224)
    assert (img == PALETTE[1]).sum() < (solo_back == PALETTE[1]).sum()


def test_out_of_bounds_raises_naming_object():
    s = centered_square(30, 10, 10)  # pokes past the margin
    with pytest.raises(RenderError, match="object 0"):
        rasterize_scene(scene_of([(s, 2)]), 224, 224)


def test_translation_equivariance_integer_shift():
    rng = Rng(11)
    s = gen_shape(IRREGULAR_CONVEX, rng, 25.0, n=5, rotation=0.7, center=(60, 60))
    base = rasterize_scene(scene_of([(s, 2)]), 224, 224)
    moved = rasterize_scene(scene_of([(translate(s, 40, 23), 2)]), 224, 224)
    assert np.array_equal(np.roll(np.roll(base, 23, axis=0), 40, axis=1), moved)


def test_determinism_bit_identical():
    rng = Rng(12)
    s = gen_shape(IRREGULAR_CONVEX, rng, 30.0, n=6, rotation=1.1, center=(112, 112))
    imgs = [rasterize_scene(scene_of([(s, 2)]), 224, 224) for _ in range(3)]
    assert np.array_equal(imgs[0], imgs[1]) and np.array_equal(imgs[1], imgs[2])


def test_raster_area_fidelity_sample():
    rng = Rng(13)
    for i in range(300):
        kind = (REGULAR_POLYGON, CIRCLE, IRREGULAR_CONVEX)[i % 3]
        size = rng.uniform(15, 60)
        s = gen_shape(kind, rng, size, n=3 + i % 4,
                      rotation=rng.uniform(0, 6.28), center=(112, 112))
        count = int(shape_mask(s, 224, 224).sum())
        assert abs(count - area(s)) / area(s) <= 0.02, (kind, size)


def test_dilate_mask_disk_growth():
    m = np.zeros((21, 21), dtype=bool)
    m[10, 10] = True
    d = dilate_mask(m, 3)
    ys, xs = np.mgrid[0:21, 0:21]
    expected = (ys - 10) ** 2 + (xs - 10) ** 2 <= 9
    assert np.array_equal(d, expected)
    assert dilate_mask(m, 0) is m
