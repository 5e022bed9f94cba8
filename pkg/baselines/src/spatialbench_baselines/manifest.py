"""Reading spatialbench dataset directories.

A dataset directory holds `manifest.jsonl` (one JSON object per item with
at least id/path/label/split), `config.json`, and the image files the
manifest paths point at.  Images are flat grayscale with the background
level decidable by a border-ring majority vote.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import List, Tuple

import numpy as np
import torch
from PIL import Image
from torch.utils.data import Dataset

REQUIRED_FIELDS = ("id", "path", "label", "split")


class ManifestError(ValueError):
    """The dataset directory does not match the manifest schema."""


def load_manifest(data_dir) -> Tuple[List[dict], dict]:
    """Returns (entries, config) for a dataset directory."""
    data_dir = Path(data_dir)
    manifest = data_dir / "manifest.jsonl"
    if not manifest.is_file():
        raise ManifestError(f"no manifest.jsonl under {data_dir}")
    entries = []
    for n, line in enumerate(manifest.read_text().splitlines(), 1):
        if not line.strip():
            continue
        try:
            entry = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ManifestError(f"{manifest}:{n}: not JSON: {exc}") from exc
        missing = [f for f in REQUIRED_FIELDS if f not in entry]
        if missing:
            raise ManifestError(f"{manifest}:{n}: missing fields {missing}")
        if entry["label"] not in (0, 1):
            raise ManifestError(f"{manifest}:{n}: label must be 0 or 1")
        entries.append(entry)
    if not entries:
        raise ManifestError(f"{manifest} is empty")
    config_path = data_dir / "config.json"
    config = json.loads(config_path.read_text()) if config_path.is_file() else {}
    return entries, config


def load_image(data_dir, entry) -> np.ndarray:
    """Grayscale (H, W) uint8 image for one manifest entry."""
    with Image.open(Path(data_dir) / entry["path"]) as im:
        return np.asarray(im.convert("L"), dtype=np.uint8)


def binarize(img: np.ndarray) -> np.ndarray:
    """Foreground mask: background level = majority vote over the 1-px border."""
    ring = np.concatenate([img[0, :], img[-1, :], img[1:-1, 0], img[1:-1, -1]])
    levels, counts = np.unique(ring, return_counts=True)
    order = np.argsort(counts)
    if len(levels) > 1 and counts[order[-1]] == counts[order[-2]]:
        raise ManifestError("border ring has no majority background level")
    return (img != levels[order[-1]]).astype(np.uint8)


class ManifestDataset(Dataset):
    """Torch dataset over one split of a dataset directory.

    mode="rgb":   3-channel float in [0, 1] (standard architectures)
    mode="pm1":   1-channel float in {-1, +1} after binarization (tiny CNN)
    """

    def __init__(self, data_dir, split="train", mode="rgb"):
        if mode not in ("rgb", "pm1"):
            raise ValueError(f"unknown mode {mode!r}")
        self.data_dir = Path(data_dir)
        self.mode = mode
        entries, self.config = load_manifest(data_dir)
        self.entries = [e for e in entries if split == "all" or e["split"] == split]
        if not self.entries:
            raise ManifestError(f"no items in split {split!r}")

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        entry = self.entries[i]
        img = load_image(self.data_dir, entry)
        if self.mode == "pm1":
            x = torch.from_numpy(binarize(img).astype(np.float32))[None] * 2 - 1
        else:
            x = torch.from_numpy(img.astype(np.float32) / 255.0)[None].repeat(3, 1, 1)
        return x, entry["label"], entry["id"]
