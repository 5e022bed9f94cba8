"""CNN baselines for spatialbench dataset directories.

This package is independent of the generator's code: it talks to it only
through files — `manifest.jsonl` + images on the way in, `id,label`
prediction CSVs on the way out, and the plain-text kernel bank format.
"""

from .manifest import ManifestDataset, load_manifest
from .models import ARCHITECTURES, build_model
from .tinycnn import TinyCNN, load_bank
from .train import TrainSpec, train_and_predict

__all__ = [
    "ARCHITECTURES",
    "ManifestDataset",
    "TinyCNN",
    "TrainSpec",
    "build_model",
    "load_bank",
    "load_manifest",
    "train_and_predict",
]

__version__ = "0.1.0"
