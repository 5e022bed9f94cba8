"""Deterministic template-matching classifiers: bank audit, binarization,
straight/bent discrimination, disk-response continuum, calibration."""

import math

import numpy as np
import pytest

from spatialbench import kernelnet
from spatialbench.errors import (BinarizeTieError, DataError, NoObjectError,
                                 ShapeError)
from spatialbench.geometry import POLYLINE, Rng, Shape, gen_shape
from spatialbench.kernelnet import (KernelBank, TemplateKernel, binarize,
                                    boundary_mask, calibrate_threshold,
                                    classify_convexity, classify_straightness,
                                    corner_bank, disk_response_map, max_merge,
                                    parse_bank, serialize_bank,
                                    template_match_map)
from spatialbench.raster import PALETTE, Scene, SceneObject, rasterize_scene


def line_image(waypoints, fg=255, bg=0, size=96, width=3.0):
    shape = Shape(POLYLINE, waypoints, 1.0, stroke_width=width)
    scene = Scene([SceneObject(shape, PALETTE.index(fg), 0)],
                  PALETTE.index(bg), 1, "straightness")
    return rasterize_scene(scene, size, size)


# ---------------------------------------------------------------------------
# Bank structure
# ---------------------------------------------------------------------------

def test_parameter_audit_12_kernels_108_weights():
    bank = corner_bank()
    assert len(bank.kernels) == 12
    assert bank.parameter_count == 108
    assert bank.stacked().shape == (12, 3, 3)


def test_template_kernel_validation():
    with pytest.raises(ShapeError):
        TemplateKernel(np.ones((2, 3), dtype=np.uint8), "bad")
    with pytest.raises(ShapeError):
        TemplateKernel(np.ones((3, 3), dtype=np.uint8), "all-ones")
    with pytest.raises(ShapeError):
        TemplateKernel(np.zeros((3, 3), dtype=np.uint8), "all-zeros")


def test_bank_validation():
    k = corner_bank().kernels
    with pytest.raises(ShapeError):
        KernelBank(k[:5])
    with pytest.raises(ShapeError):
        KernelBank(k, decision_threshold=10)


def test_serialize_parse_round_trip():
    bank = corner_bank(decision_threshold=7)
    parsed = parse_bank(serialize_bank(bank))
    assert parsed.decision_threshold == 7
    assert np.array_equal(parsed.stacked(), bank.stacked())


def test_parse_bank_rejects_malformed():
    with pytest.raises(DataError):
        parse_bank("111\n101\n")
    with pytest.raises(DataError):
        parse_bank(serialize_bank(corner_bank()).replace("101", "1x1", 1))


# ---------------------------------------------------------------------------
# Binarization
# ---------------------------------------------------------------------------

def test_binarize_majority_border_vote():
    img = np.full((10, 10), 128, dtype=np.uint8)
    img[4:6, 4:6] = 255
    fg = binarize(img)
    assert fg.sum() == 4 and fg[4, 4] == 1


def test_binarize_foreground_may_touch_border():
    img = np.zeros((10, 10), dtype=np.uint8)
    img[0, 0:3] = 255  # minority of the ring
    assert binarize(img).sum() == 3


def test_binarize_tie_raises():
    img = np.zeros((4, 4), dtype=np.uint8)
    img[0, :] = 255
    img[1:3, 0] = 255  # exactly 6 of the 12 ring pixels are white
    ring = np.concatenate([img[0, :], img[-1, :], img[1:-1, 0], img[1:-1, -1]])
    assert (ring == 255).sum() == (ring == 0).sum()
    with pytest.raises(BinarizeTieError):
        binarize(img)


# ---------------------------------------------------------------------------
# Template matching stages
# ---------------------------------------------------------------------------

def test_template_match_map_exact_match_scores_nine():
    fg = np.zeros((8, 8), dtype=np.uint8)
    kernel = corner_bank().kernels[0]  # background notch at top-center
    fg[2:5, 2:5] = kernel.cells
    scores = template_match_map(fg, kernel)
    assert scores[3, 3] == 9
    assert scores.max() == 9


def test_max_merge_is_pixelwise_max():
    a = np.array([[1, 5], [3, 0]], dtype=np.uint8)
    b = np.array([[4, 2], [3, 9]], dtype=np.uint8)
    assert np.array_equal(max_merge([a, b]), np.array([[4, 5], [3, 9]]))
    with pytest.raises(ShapeError):
        max_merge([])
    with pytest.raises(ShapeError):
        max_merge([a, np.zeros((3, 3), dtype=np.uint8)])


def test_straight_lines_never_reach_threshold():
    # dense sweep of orientations and offsets: no corner template may fire
    bank = corner_bank()
    for i in range(72):
        ang = i * math.pi / 72 + 0.007
        d = np.array([math.cos(ang), math.sin(ang)])
        c = np.array([48.0 + (i % 5) * 0.13, 48.0 + (i % 7) * 0.11])
        img = line_image(np.stack([c - 40 * d, c + 40 * d]))
        fg = binarize(img)
        peak = max(int(template_match_map(fg, k).max()) for k in bank.kernels)
        assert peak <= 8, f"angle {math.degrees(ang):.1f}"
        assert classify_straightness(img, bank) == 1


def test_bent_lines_fire_a_template():
    rng = Rng(21)
    for _ in range(60):
        s = gen_shape(POLYLINE, rng, 70.0, rotation=rng.uniform(0, 6.28),
                      straight=False, center=(64, 64))
        img = line_image(s.vertices, size=128)
        assert classify_straightness(img) == 0


def test_straightness_palette_invariance():
    w = np.array([[10.0, 48.0], [86.0, 48.3]])
    for fg, bg in ((255, 0), (128, 0), (255, 128), (0, 255), (128, 255), (0, 128)):
        assert classify_straightness(line_image(w, fg=fg, bg=bg)) == 1


def test_classify_straightness_empty_foreground_raises():
    with pytest.raises(NoObjectError):
        classify_straightness(np.zeros((32, 32), dtype=np.uint8))


# ---------------------------------------------------------------------------
# Disk response / convexity
# ---------------------------------------------------------------------------

def wedge_mask(theta_deg, phi_deg, size=101, apex=None):
    """Binary sector of opening theta around direction phi, apex-centered."""
    apex = apex or (size // 2, size // 2)
    ys, xs = np.mgrid[0:size, 0:size]
    ang = np.arctan2(ys - apex[0], xs - apex[1])
    half = math.radians(theta_deg) / 2.0
    diff = np.angle(np.exp(1j * (ang - math.radians(phi_deg))))
    mask = (np.abs(diff) <= half).astype(np.uint8)
    mask[apex] = 1
    return mask


@pytest.mark.parametrize("theta", [60, 90, 150, 210, 270])
def test_disk_response_continuum_at_wedge_apex(theta):
    for phi in (0.0, 37.0, 118.0):
        mask = wedge_mask(theta, phi)
        resp = disk_response_map(mask, 15)
        apex = (mask.shape[0] // 2, mask.shape[1] // 2)
        assert abs(resp[apex] - theta / 360.0) <= 0.05, (theta, phi)


def test_disk_response_map_rejects_tiny_radius():
    with pytest.raises(ShapeError):
        disk_response_map(np.ones((10, 10), dtype=np.uint8), 2)


def test_boundary_mask_matches_brute_force():
    g = np.random.Generator(np.random.PCG64(5))
    fg = g.integers(0, 2, size=(20, 17), dtype=np.uint8)
    b = boundary_mask(fg)
    for y in range(20):
        for x in range(17):
            if not fg[y, x]:
                assert not b[y, x]
                continue
            nbrs = []
            for dy, dx in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                yy, xx = y + dy, x + dx
                nbrs.append(fg[yy, xx] if 0 <= yy < 20 and 0 <= xx < 17 else 0)
            assert b[y, x] == (min(nbrs) == 0)


def test_classify_convexity_on_synthetic_masks():
    # filled disk (convex): all boundary responses near 1/2
    ys, xs = np.mgrid[0:101, 0:101]
    disk = (((ys - 50) ** 2 + (xs - 50) ** 2) <= 35 ** 2).astype(np.uint8) * 255
    assert classify_convexity(disk) == 1
    # reflex sector of 250 deg truncated to radius 40 (keeps the border
    # ring all-background so binarization stays honest): apex response ~0.69
    sector = wedge_mask(250, 30)
    sector &= (((ys - 50) ** 2 + (xs - 50) ** 2) <= 40 ** 2).astype(np.uint8)
    assert classify_convexity(sector * 255) == 0


def test_classify_convexity_empty_raises():
    with pytest.raises(NoObjectError):
        classify_convexity(np.zeros((48, 48), dtype=np.uint8))


# ---------------------------------------------------------------------------
# Calibration
# ---------------------------------------------------------------------------

def test_calibrate_recovers_default_threshold():
    rng = Rng(31)
    images, labels = [], []
    for i in range(40):
        straight = i % 2 == 0
        s = gen_shape(POLYLINE, rng, 60.0, rotation=rng.uniform(0, 6.28),
                      straight=straight, center=(48, 48))
        images.append(line_image(s.vertices))
        labels.append(int(straight))
    tuned = calibrate_threshold(images, labels)
    assert tuned.decision_threshold == 9
    assert all(classify_straightness(img, tuned) == y
               for img, y in zip(images, labels))


def test_calibrate_midpoint_of_widest_perfect_run():
    # bent peaks all 9, straight peaks all <= 6: thresholds 7, 8, 9 are all
    # perfect and the midpoint 8 is chosen
    fg_bent = np.zeros((20, 20), dtype=np.uint8)
    fg_bent[5:8, 5:8] = corner_bank().kernels[0].cells
    bent = np.where(fg_bent, 255, 0).astype(np.uint8)
    straight = np.zeros((20, 20), dtype=np.uint8)
    straight[10, 10] = 255  # a lone dot scores well below 9 on every template
    peak = max(int(template_match_map(binarize(straight), k).max())
               for k in corner_bank().kernels)
    assert peak < 9
    tuned = calibrate_threshold([bent, straight] * 3, [0, 1] * 3)
    # perfect thresholds are peak+1 .. 9; the midpoint of that run wins
    run = list(range(peak + 1, 10))
    assert tuned.decision_threshold == run[len(run) // 2]
    assert classify_straightness(bent, tuned) == 0
    assert classify_straightness(straight, tuned) == 1
