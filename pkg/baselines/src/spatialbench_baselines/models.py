"""Model zoo: four standard architectures from torchvision (trained from
random initialization, two output classes) plus the tiny 12-kernel CNN."""

from __future__ import annotations

from torch import nn
from torchvision import models as tv

from .tinycnn import TinyCNN

ARCHITECTURES = ("alexnet", "vgg19", "resnet34", "densenet121", "tiny_cnn")

_FACTORIES = {
    "alexnet": lambda: tv.alexnet(num_classes=2),
    "vgg19": lambda: tv.vgg19(num_classes=2),
    "resnet34": lambda: tv.resnet34(num_classes=2),
    "densenet121": lambda: tv.densenet121(num_classes=2),
}


def build_model(architecture: str) -> nn.Module:
    """Untrained model for one architecture name.

    Standard architectures take (N, 3, 224, 224) in [0, 1] and emit
    two-class logits; tiny_cnn takes (N, 1, H, W) in {-1, +1} and emits a
    single class-1 logit.
    """
    if architecture == "tiny_cnn":
        return TinyCNN()
    try:
        return _FACTORIES[architecture]()
    except KeyError:
        raise ValueError(
            f"unknown architecture {architecture!r}; "
            f"expected one of {ARCHITECTURES}") from None


def input_mode(architecture: str) -> str:
    """Which ManifestDataset mode the architecture consumes."""
    return "pm1" if architecture == "tiny_cnn" else "rgb"
