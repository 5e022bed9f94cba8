"""Grayscale image files: binary PGM (P5) and minimal 8-bit grayscale PNG.

Writers are byte-deterministic: fixed headers, fixed zlib level, no
timestamps or ancillary chunks.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

from .errors import DataError

_PNG_SIG = bytes([137, 80, 78, 71, 13, 10, 26, 10])


def encode_pgm(img: np.ndarray) -> bytes:
    h, w = img.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + img.astype(np.uint8).tobytes()


def decode_pgm(data: bytes) -> np.ndarray:
    if not data.startswith(b"P5"):
        raise DataError("not a binary PGM (P5) file")
    # header: magic, width, height, maxval, separated by whitespace/comments
    fields = []
    pos = 2
    while len(fields) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        fields.append(int(data[start:pos]))
    pos += 1  # single whitespace after maxval
    w, h, maxval = fields
    if maxval != 255:
        raise DataError(f"unsupported PGM maxval {maxval}")
    pixels = np.frombuffer(data, dtype=np.uint8, count=w * h, offset=pos)
    return pixels.reshape(h, w).copy()


def _chunk(tag: bytes, payload: bytes) -> bytes:
    crc = zlib.crc32(payload, zlib.crc32(tag))
    return struct.pack(">I", len(payload)) + tag + payload + struct.pack(">I", crc)


def encode_png(img: np.ndarray) -> bytes:
    h, w = img.shape
    ihdr = struct.pack(">IIBBBBB", w, h, 8, 0, 0, 0, 0)  # 8-bit grayscale
    raw = bytearray()
    data = img.astype(np.uint8)
    for row in data:
        raw.append(0)  # filter type None
        raw.extend(row.tobytes())
    idat = zlib.compress(bytes(raw), 6)
    return _PNG_SIG + _chunk(b"IHDR", ihdr) + _chunk(b"IDAT", idat) + _chunk(b"IEND", b"")


def decode_png(data: bytes) -> np.ndarray:
    if not data.startswith(_PNG_SIG):
        raise DataError("not a PNG file")
    pos = 8
    w = h = None
    idat = bytearray()
    while pos < len(data):
        (length,) = struct.unpack(">I", data[pos:pos + 4])
        tag = data[pos + 4:pos + 8]
        payload = data[pos + 8:pos + 8 + length]
        pos += 12 + length
        if tag == b"IHDR":
            w, h, depth, ctype = struct.unpack(">IIBB", payload[:10])
            if depth != 8 or ctype != 0:
                raise DataError("only 8-bit grayscale PNG is supported")
        elif tag == b"IDAT":
            idat.extend(payload)
        elif tag == b"IEND":
            break
    if w is None:
        raise DataError("PNG missing IHDR")
    raw = zlib.decompress(bytes(idat))
    stride = w + 1
    out = np.empty((h, w), dtype=np.uint8)
    prev = np.zeros(w, dtype=np.uint8)
    for y in range(h):
        row = raw[y * stride:(y + 1) * stride]
        ftype, scan = row[0], np.frombuffer(row[1:], dtype=np.uint8)
        if ftype == 0:
            line = scan.copy()
        elif ftype == 2:  # Up
            line = (scan + prev).astype(np.uint8)
        else:  # Sub, Average, Paeth need the running left value (bpp = 1)
            line = np.empty(w, dtype=np.uint8)
            left = 0
            for x in range(w):
                up = int(prev[x])
                if ftype == 1:  # Sub
                    val = int(scan[x]) + left
                elif ftype == 3:  # Average
                    val = int(scan[x]) + (left + up) // 2
                elif ftype == 4:  # Paeth
                    ul = int(prev[x - 1]) if x else 0
                    p = left + up - ul
                    pa, pb, pc = abs(p - left), abs(p - up), abs(p - ul)
                    pred = left if pa <= pb and pa <= pc else (up if pb <= pc else ul)
                    val = int(scan[x]) + pred
                else:
                    raise DataError(f"unsupported PNG filter type {ftype}")
                left = val & 0xFF
                line[x] = left
        out[y] = line
        prev = line
    return out


def write_image(path, img: np.ndarray, fmt: str = "pgm"):
    if fmt == "pgm":
        payload = encode_pgm(img)
    elif fmt == "png":
        payload = encode_png(img)
    else:
        raise DataError(f"unknown image format {fmt!r}")
    with open(path, "wb") as f:
        f.write(payload)


def read_image(path) -> np.ndarray:
    with open(path, "rb") as f:
        data = f.read()
    if data.startswith(b"P5"):
        return decode_pgm(data)
    if data.startswith(_PNG_SIG):
        return decode_png(data)
    raise DataError(f"unrecognized image file: {path}")
