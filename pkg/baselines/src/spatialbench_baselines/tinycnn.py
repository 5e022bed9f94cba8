"""The 12-kernel tiny CNN: one 3x3 convolution bank, global max, threshold.

On a +-1 input (foreground +1, background -1), a +-1 template kernel t
satisfies sum(t * x) = matches - mismatches = 2 * matches - 9, so
matches = (9 + sum(t * x)) / 2.  Padding with -1 makes out-of-image cells
count as background, and a global max over channels and positions followed
by the decision "peak >= threshold => bent" reproduces the integer
template-matching classifier exactly when the kernels are frozen to a bank
loaded from the plain-text format (12 blocks of 3 rows of 3 digits, then a
`threshold N` line).
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import torch
import torch.nn.functional as F
from torch import nn

DEFAULT_THRESHOLD = 9


def load_bank(path) -> tuple:
    """Parse the text bank format -> (kernels (12, 3, 3) float {0,1}, threshold)."""
    rows, threshold = [], DEFAULT_THRESHOLD
    for ln in Path(path).read_text().splitlines():
        ln = ln.strip()
        if not ln:
            continue
        if ln.startswith("threshold"):
            threshold = int(ln.split()[1])
        else:
            if len(ln) != 3 or any(ch not in "01" for ch in ln):
                raise ValueError(f"bad kernel row {ln!r} in {path}")
            rows.append([int(ch) for ch in ln])
    if len(rows) != 36:
        raise ValueError(f"{path}: expected 12 3x3 kernels, got {len(rows)} rows")
    kernels = np.asarray(rows, dtype=np.float32).reshape(12, 3, 3)
    return kernels, threshold


class TinyCNN(nn.Module):
    """12 trainable 3x3 kernels -> match-count maps -> global max -> logit.

    Outputs a single logit per image; positive means class 1 ("straight":
    no window reaches the decision threshold).  `sharpness` scales the
    margin so BCE-with-logits sees usable gradients.
    """

    def __init__(self, threshold: float = DEFAULT_THRESHOLD, sharpness: float = 4.0):
        super().__init__()
        self.conv = nn.Conv2d(1, 12, 3, bias=False)
        self.threshold = threshold
        self.sharpness = sharpness

    def match_scores(self, x: torch.Tensor) -> torch.Tensor:
        """(N, 12, H, W) match-count maps for a +-1 input (N, 1, H, W)."""
        padded = F.pad(x, (1, 1, 1, 1), value=-1.0)
        return (9.0 + self.conv(padded)) / 2.0

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        peak = self.match_scores(x).amax(dim=(1, 2, 3))
        return self.sharpness * (self.threshold - 0.5 - peak)

    @torch.no_grad()
    def predict(self, x: torch.Tensor) -> torch.Tensor:
        """Integer labels; with frozen bank weights this matches the exact
        integer classifier (peak >= threshold => 0)."""
        peaks = self.match_scores(x).amax(dim=(1, 2, 3))
        return (torch.round(peaks) < self.threshold).long()

    @classmethod
    def from_bank(cls, path) -> "TinyCNN":
        """Frozen model with +-1 weights from a text bank file."""
        kernels, threshold = load_bank(path)
        model = cls(threshold=threshold)
        with torch.no_grad():
            model.conv.weight.copy_(
                torch.from_numpy(kernels * 2.0 - 1.0).unsqueeze(1))
        for p in model.parameters():
            p.requires_grad_(False)
        return model

    def init_near(self, path, noise: float = 0.05, generator=None) -> "TinyCNN":
        """Re-initialize trainable weights near the bank solution."""
        kernels, _ = load_bank(path)
        with torch.no_grad():
            target = torch.from_numpy(kernels * 2.0 - 1.0).unsqueeze(1)
            jitter = torch.randn(target.shape, generator=generator) * noise
            self.conv.weight.copy_(target + jitter)
        return self
