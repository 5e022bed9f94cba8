"""Pure-numpy implementations of the hot per-pixel kernels.

Must stay bit-identical to the compiled backend: integer scores and counts,
out-of-bounds window cells treated as background.
"""

from __future__ import annotations

import numpy as np


def template_match(binary: np.ndarray, kernels: np.ndarray) -> np.ndarray:
    """Exact-match scores of 3x3 binary templates at every pixel.

    binary: (H, W) uint8 in {0, 1}; kernels: (K, 3, 3) uint8 in {0, 1}.
    Returns (K, H, W) uint8 with the number of matching window cells (0..9);
    cells outside the image count as background.
    """
    h, w = binary.shape
    k = kernels.shape[0]
    pad = np.zeros((h + 2, w + 2), dtype=np.uint8)
    pad[1:-1, 1:-1] = binary
    out = np.zeros((k, h, w), dtype=np.uint8)
    for dy in range(3):
        for dx in range(3):
            window = pad[dy:dy + h, dx:dx + w]
            cell = kernels[:, dy, dx][:, None, None]
            out += (window[None] == cell).astype(np.uint8)
    return out


def disk_count(binary: np.ndarray, radius: int) -> tuple:
    """Foreground count within a radius-r disk at every pixel.

    Returns (counts int32 (H, W), disk_area int).  Out-of-bounds cells
    count as background.
    """
    h, w = binary.shape
    dy, dx = np.mgrid[-radius:radius + 1, -radius:radius + 1]
    offsets = np.argwhere(dx * dx + dy * dy <= radius * radius) - radius
    pad = np.zeros((h + 2 * radius, w + 2 * radius), dtype=np.int32)
    pad[radius:radius + h, radius:radius + w] = binary
    counts = np.zeros((h, w), dtype=np.int32)
    for oy, ox in offsets:
        counts += pad[radius + oy:radius + oy + h, radius + ox:radius + ox + w]
    return counts, int(len(offsets))
