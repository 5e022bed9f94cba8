#!/usr/bin/env python3
"""Benchmark the compiled backend against the pure-numpy fallback.

Runs the two hot kernels (3x3 template matching, disk counting) on
realistic 224x224 binary inputs with both implementations, verifies the
outputs are bit-identical, and prints per-call timings plus the end-to-end
classification rate for each backend.

Usage:  python3 benchmarks/bench_backends.py [--repeats N]
"""

import argparse
import importlib
import time

import numpy as np

from spatialbench._backend import _py
from spatialbench.kernelnet import corner_bank

try:
    from spatialbench._backend import _fast
except ImportError:
    _fast = None


def make_inputs(seed=0, n=20):
    """n binary 224x224 images with line/blob content (what classify sees)."""
    rng = np.random.default_rng(seed)
    images = []
    for _ in range(n):
        img = np.zeros((224, 224), dtype=np.uint8)
        for _ in range(3):
            y, x = rng.integers(20, 200, 2)
            ln, th = rng.integers(30, 120), rng.integers(2, 5)
            img[y:y + th, x:max(0, x - ln):-1] = 1
        cy, cx, r = rng.integers(60, 160, 2).tolist() + [int(rng.integers(15, 45))]
        ys, xs = np.mgrid[0:224, 0:224]
        img[(ys - cy) ** 2 + (xs - cx) ** 2 <= r * r] = 1
        images.append(img)
    return images


def bench(fn, args_list, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = [fn(*a) for a in args_list]
        best = min(best, (time.perf_counter() - t0) / len(args_list))
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    images = make_inputs()
    kernels = np.stack([k.cells for k in corner_bank().kernels])
    impls = [("python", _py)] + ([("c", _fast)] if _fast else [])
    if not _fast:
        print("compiled backend not built; benchmarking the fallback only")

    print(f"{'kernel':<16}{'backend':<10}{'ms/image':>10}{'rate':>12}")
    results = {}
    for name, argpack in [
        ("template_match", [(img, kernels) for img in images]),
        ("disk_count", [(img, 9) for img in images]),
    ]:
        outs = {}
        for impl_name, impl in impls:
            per_call, out = bench(getattr(impl, name), argpack, args.repeats)
            outs[impl_name] = out
            print(f"{name:<16}{impl_name:<10}{1e3 * per_call:>10.2f}"
                  f"{1 / per_call:>10.0f}/s")
        if len(outs) == 2:
            for a, b in zip(outs["python"], outs["c"]):
                if name == "disk_count":
                    assert a[1] == b[1] and np.array_equal(a[0], b[0])
                else:
                    assert np.array_equal(a, b)
            print(f"{'':<16}outputs bit-identical across backends")
        results[name] = outs


if __name__ == "__main__":
    main()
