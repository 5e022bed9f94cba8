"""Shared fixtures: datasets generated by invoking the `spatialbench` CLI
as a subprocess — the only way this package talks to the generator."""

import shutil
import subprocess

import pytest

HAVE_CLI = shutil.which("spatialbench") is not None

requires_cli = pytest.mark.skipif(
    not HAVE_CLI, reason="spatialbench CLI not on PATH")


def generate(out, task, train_per_class, test_per_class, seed, *extra):
    subprocess.run(
        ["spatialbench", "generate", "--task", task,
         "--count-per-class", str(train_per_class),
         "--test-count-per-class", str(test_per_class),
         "--seed", str(seed), "--out", str(out), *map(str, extra)],
        check=True, capture_output=True)
    return out


@pytest.fixture(scope="session")
def straightness_small(tmp_path_factory):
    """40 train + 20 test straightness items."""
    if not HAVE_CLI:
        pytest.skip("spatialbench CLI not on PATH")
    return generate(tmp_path_factory.mktemp("data") / "straightness",
                    "straightness", 20, 10, 11)


@pytest.fixture(scope="session")
def left_right_small(tmp_path_factory):
    """24 train + 16 test left/right items."""
    if not HAVE_CLI:
        pytest.skip("spatialbench CLI not on PATH")
    return generate(tmp_path_factory.mktemp("data") / "left_right",
                    "left_right", 12, 8, 12)
