"""Training loop: fit one architecture on a dataset directory's train
split and emit predictions for the test split plus a per-epoch loss log.

Outputs, written to the spec's out_dir:
  predictions_<architecture>_<split_policy>.csv   (header `id,label`)
  train_log.jsonl                                 (meta record, then one
                                                   record per epoch)
A non-converging run is not an error; the log is the record of it.
"""

from __future__ import annotations

import dataclasses
import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import torch
from torch import nn
from torch.utils.data import DataLoader

from .manifest import ManifestDataset
from .models import build_model, input_mode
from .tinycnn import TinyCNN


@dataclass
class TrainSpec:
    architecture: str
    data_dir: str
    out_dir: str
    epochs: int = 30
    batch_size: int = 64
    lr: float = 1e-4
    weight_decay: float = 0.0
    schedule: str = "cosine"          # "cosine" | "constant"
    seed: int = 0
    device: str = "cpu"
    bank: Optional[str] = None        # text bank file for tiny_cnn
    freeze_kernels: bool = False      # tiny_cnn only: no training at all
    num_workers: int = 0

    def __post_init__(self):
        if self.schedule not in ("cosine", "constant"):
            raise ValueError(f"unknown schedule {self.schedule!r}")
        if self.freeze_kernels and self.architecture != "tiny_cnn":
            raise ValueError("freeze_kernels applies only to tiny_cnn")
        if self.freeze_kernels and not self.bank:
            raise ValueError("freeze_kernels requires a bank file")

    @classmethod
    def from_config(cls, path, **overrides) -> "TrainSpec":
        merged = {**json.loads(Path(path).read_text()), **overrides}
        return cls(**merged)


def _build(spec: TrainSpec) -> nn.Module:
    if spec.architecture == "tiny_cnn" and spec.freeze_kernels:
        return TinyCNN.from_bank(spec.bank)
    model = build_model(spec.architecture)
    if spec.architecture == "tiny_cnn" and spec.bank:
        model.init_near(spec.bank)
    return model


def _predict_split(model, dataset, spec, frozen):
    loader = DataLoader(dataset, batch_size=spec.batch_size,
                        num_workers=spec.num_workers)
    model.eval()
    preds = {}
    with torch.no_grad():
        for x, _, ids in loader:
            x = x.to(spec.device)
            if isinstance(model, TinyCNN):
                labels = model.predict(x) if frozen else (model(x) > 0).long()
            else:
                labels = model(x).argmax(dim=1)
            preds.update(zip(ids, labels.cpu().tolist()))
    return preds


def train_and_predict(spec: TrainSpec):
    """Returns (predictions_csv_path, log_path, summary dict)."""
    torch.manual_seed(spec.seed)
    out_dir = Path(spec.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    mode = input_mode(spec.architecture)
    test_set = ManifestDataset(spec.data_dir, split="test", mode=mode)
    policy = test_set.config.get("split_policy", "iid")
    model = _build(spec).to(spec.device)
    frozen = spec.architecture == "tiny_cnn" and spec.freeze_kernels

    log_path = out_dir / "train_log.jsonl"
    records = [{"record": "meta", **dataclasses.asdict(spec),
                "split_policy": policy}]

    if not frozen:
        train_set = ManifestDataset(spec.data_dir, split="train", mode=mode)
        gen = torch.Generator().manual_seed(spec.seed)
        loader = DataLoader(train_set, batch_size=spec.batch_size, shuffle=True,
                            generator=gen, num_workers=spec.num_workers)
        criterion = (nn.BCEWithLogitsLoss() if isinstance(model, TinyCNN)
                     else nn.CrossEntropyLoss())
        optimizer = torch.optim.Adam(model.parameters(), lr=spec.lr,
                                     weight_decay=spec.weight_decay)
        scheduler = (torch.optim.lr_scheduler.CosineAnnealingLR(
            optimizer, T_max=max(1, spec.epochs))
            if spec.schedule == "cosine" else None)
        for epoch in range(spec.epochs):
            model.train()
            t0 = time.time()
            total_loss = correct = seen = 0
            for x, y, _ in loader:
                x, y = x.to(spec.device), y.to(spec.device)
                optimizer.zero_grad()
                out = model(x)
                if isinstance(model, TinyCNN):
                    loss = criterion(out, y.float())
                    pred = (out > 0).long()
                else:
                    loss = criterion(out, y)
                    pred = out.argmax(dim=1)
                loss.backward()
                optimizer.step()
                total_loss += float(loss.detach()) * len(y)
                correct += int((pred == y).sum())
                seen += len(y)
            if scheduler is not None:
                scheduler.step()
            records.append({"record": "epoch", "epoch": epoch,
                            "loss": total_loss / seen,
                            "train_acc": correct / seen,
                            "lr": optimizer.param_groups[0]["lr"],
                            "seconds": round(time.time() - t0, 3)})

    preds = _predict_split(model, test_set, spec, frozen)
    csv_path = out_dir / f"predictions_{spec.architecture}_{policy}.csv"
    lines = ["id,label"] + [f"{i},{preds[i]}" for i in sorted(preds)]
    csv_path.write_text("\n".join(lines) + "\n")
    log_path.write_text(
        "\n".join(json.dumps(r, sort_keys=True) for r in records) + "\n")
    test_truth = {e["id"]: e["label"] for e in test_set.entries}
    test_acc = sum(preds[i] == test_truth[i] for i in preds) / len(preds)
    summary = {"architecture": spec.architecture, "split_policy": policy,
               "test_accuracy": test_acc, "epochs_run": 0 if frozen else spec.epochs}
    return csv_path, log_path, summary
