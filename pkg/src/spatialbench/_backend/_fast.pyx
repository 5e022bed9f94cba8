# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the per-pixel kernels (exact integer semantics,
identical outputs to the pure-numpy fallback).

template_match packs each 3x3 window into a 9-bit code while sliding along
the row and scores all kernels via a precomputed 512-entry table per kernel
(score = 9 - popcount(window XOR kernel)).  disk_count decomposes the disk
into per-row chords and sums them from row prefix sums.  Out-of-bounds
cells count as background in both, matching the fallback.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline int _popcount9(int v):
    cdef int c = 0
    while v:
        v &= v - 1
        c += 1
    return c


def template_match(cnp.uint8_t[:, :] binary, cnp.uint8_t[:, :, :] kernels):
    cdef Py_ssize_t h = binary.shape[0]
    cdef Py_ssize_t w = binary.shape[1]
    cdef Py_ssize_t nk = kernels.shape[0]
    out_arr = np.zeros((nk, h, w), dtype=np.uint8)
    cdef cnp.uint8_t[:, :, :] out = out_arr
    # score table: 9 - popcount(code ^ kernel_code) for every 9-bit code
    table_arr = np.empty((nk, 512), dtype=np.uint8)
    cdef cnp.uint8_t[:, :] table = table_arr
    cdef Py_ssize_t k, y, x, dy, dx
    cdef int kcode, code, col
    for k in range(nk):
        kcode = 0
        for dx in range(3):
            for dy in range(3):
                if kernels[k, dy, dx]:
                    kcode |= 1 << (3 * dx + dy)
        for code in range(512):
            table[k, code] = <cnp.uint8_t>(9 - _popcount9(code ^ kcode))
    # slide a 3-column window along each row; column x holds rows y-1..y+1
    for y in range(h):
        code = 0
        for x in range(-1, w):
            col = 0
            if x + 1 < w:
                if y > 0 and binary[y - 1, x + 1]:
                    col |= 1
                if binary[y, x + 1]:
                    col |= 2
                if y + 1 < h and binary[y + 1, x + 1]:
                    col |= 4
            code = (code >> 3) | (col << 6)
            if x >= 0:
                for k in range(nk):
                    out[k, y, x] = table[k, code]
    return out_arr


def disk_count(cnp.uint8_t[:, :] binary, int radius):
    cdef Py_ssize_t h = binary.shape[0]
    cdef Py_ssize_t w = binary.shape[1]
    # per-row chord half-widths of the disk, and its total area
    half_arr = np.floor(np.sqrt(
        radius * radius
        - np.arange(-radius, radius + 1, dtype=np.float64) ** 2)).astype(np.int64)
    cdef cnp.int64_t[:] half = half_arr
    cdef long long area = int(2 * half_arr.sum() + 2 * radius + 1)
    # prefix[y, x] = number of foreground cells in binary[y, :x]
    prefix_arr = np.zeros((h, w + 1), dtype=np.int32)
    np.cumsum(np.asarray(binary), axis=1, dtype=np.int32,
              out=prefix_arr[:, 1:])
    cdef cnp.int32_t[:, :] prefix = prefix_arr
    counts_arr = np.zeros((h, w), dtype=np.int32)
    cdef cnp.int32_t[:, :] counts = counts_arr
    cdef Py_ssize_t y, x, dy, yy
    cdef int c, lo, hi, hw
    for y in range(h):
        for x in range(w):
            c = 0
            for dy in range(-radius, radius + 1):
                yy = y + dy
                if yy < 0 or yy >= h:
                    continue
                hw = <int>half[dy + radius]
                lo = x - hw
                if lo < 0:
                    lo = 0
                hi = x + hw + 1
                if hi > w:
                    hi = w
                c += prefix[yy, hi] - prefix[yy, lo]
            counts[y, x] = c
    return counts_arr, int(area)
