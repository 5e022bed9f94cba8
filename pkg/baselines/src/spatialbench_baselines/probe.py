"""Learnability probe: can the 12 3x3 kernels be learned by gradient
descent?  Trains the tiny CNN from a random initialization and from a
near-solution initialization, and reports how the loss behaved.

The outcome is a finding, not an assertion: a non-decreasing, oscillating
loss is an expected and informative result for this architecture (the
max-over-everything readout gives sparse, discontinuous gradients).
"""

from __future__ import annotations

import json
from pathlib import Path

from .train import TrainSpec, train_and_predict


def analyze_losses(losses):
    """Oscillation statistics for a per-epoch loss sequence."""
    if len(losses) < 2:
        return {"epochs": len(losses), "rises": 0, "rise_fraction": 0.0,
                "net_change": 0.0, "downward_trend": False}
    rises = sum(b > a for a, b in zip(losses, losses[1:]))
    half = len(losses) // 2
    first = sum(losses[:half]) / half
    second = sum(losses[half:]) / (len(losses) - half)
    return {
        "epochs": len(losses),
        "rises": rises,
        "rise_fraction": rises / (len(losses) - 1),
        "net_change": losses[-1] - losses[0],
        # mean of the second half clearly below the first half's
        "downward_trend": second < 0.95 * first,
    }


def run_probe(data_dir, out_dir, bank=None, epochs=40, lr=0.05, seed=0,
              batch_size=32, device="cpu"):
    """Runs both initializations; returns {init_name: analysis} and writes
    probe_summary.json next to the per-run train logs."""
    out_dir = Path(out_dir)
    inits = {"random": None}
    if bank is not None:
        inits["near_solution"] = str(bank)
    results = {}
    for name, bank_path in inits.items():
        run_dir = out_dir / name
        spec = TrainSpec(architecture="tiny_cnn", data_dir=str(data_dir),
                         out_dir=str(run_dir), epochs=epochs, lr=lr,
                         batch_size=batch_size, seed=seed, device=device,
                         schedule="constant", bank=bank_path)
        _, log_path, summary = train_and_predict(spec)
        losses = [r["loss"] for r in map(json.loads, log_path.read_text().splitlines())
                  if r.get("record") == "epoch"]
        results[name] = {**analyze_losses(losses), "losses": losses,
                         "test_accuracy": summary["test_accuracy"]}
    (out_dir / "probe_summary.json").write_text(
        json.dumps(results, indent=2, sort_keys=True) + "\n")
    return results


def describe(results) -> str:
    lines = []
    for name, r in sorted(results.items()):
        trend = "downward trend" if r["downward_trend"] else "no downward trend"
        lines.append(
            f"{name}: {r['epochs']} epochs, loss rose on "
            f"{r['rises']}/{r['epochs'] - 1} steps "
            f"(net change {r['net_change']:+.4f}), {trend}; "
            f"test accuracy {100 * r['test_accuracy']:.1f}%")
    return "\n".join(lines)
