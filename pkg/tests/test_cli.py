"""End-to-end command-line behavior: exit codes, subcommand flows, and
byte-determinism of generated trees."""

import json

import numpy as np
import pytest

from spatialbench.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


GEN = ["generate", "--task", "straightness", "--count-per-class", "6",
       "--test-count-per-class", "6", "--seed", "7"]


@pytest.fixture()
def dataset(tmp_path):
    assert main(GEN + ["--out", str(tmp_path / "ds")]) == 0
    return tmp_path / "ds"


# ---------------------------------------------------------------------------
# Exit codes
# ---------------------------------------------------------------------------

def test_usage_errors_exit_1(capsys):
    assert run([], capsys)[0] == 1                       # no subcommand
    code, _, err = run(["generate", "--task", "straightness", "--out", "x"], capsys)
    assert code == 1 and "--seed" in err                 # seed required
    assert run(["generate", "--bogus"], capsys)[0] == 1  # unknown flag
    assert run(["frobnicate"], capsys)[0] == 1           # unknown subcommand


def test_data_errors_exit_2(tmp_path, capsys):
    code, _, err = run(["classify", "--data", str(tmp_path / "nope")], capsys)
    assert code == 2 and "error:" in err
    # bad config values are data errors, not crashes
    code, _, err = run(GEN + ["--out", str(tmp_path / "d"),
                              "--size-range", "30", "20"], capsys)
    assert code == 2


def test_refuses_overwrite_without_force(dataset, capsys):
    code, _, err = run(GEN + ["--out", str(dataset)], capsys)
    assert code == 2 and "not empty" in err
    assert main(GEN + ["--out", str(dataset), "--force"]) == 0


# ---------------------------------------------------------------------------
# Flows
# ---------------------------------------------------------------------------

def test_generate_tree_layout(dataset):
    assert (dataset / "manifest.jsonl").is_file()
    assert (dataset / "config.json").is_file()
    images = list((dataset / "images").iterdir())
    assert len(images) == 24
    lines = (dataset / "manifest.jsonl").read_text().splitlines()
    assert len(lines) == 24
    entry = json.loads(lines[0])
    assert entry["task"] == "straightness" and entry["split"] == "train"


def test_classify_then_evaluate_round_trip(dataset, tmp_path, capsys):
    preds = tmp_path / "preds.csv"
    assert main(["classify", "--data", str(dataset), "--split", "test",
                 "--out", str(preds)]) == 0
    capsys.readouterr()
    code, out, _ = run(["evaluate", "--data", str(dataset),
                        "--predictions", str(preds)], capsys)
    assert code == 0
    assert "100.0%" in out
    # csv format round-trips through the report parser
    code, out, _ = run(["evaluate", "--data", str(dataset),
                        "--predictions", str(preds), "--format", "csv",
                        "--reference", "alexnet"], capsys)
    assert code == 0
    from spatialbench.evalreport import parse_report_csv
    assert parse_report_csv(out).rows[0].accuracy == 1.0


def test_classify_to_stdout(dataset, capsys):
    code, out, _ = run(["classify", "--data", str(dataset), "--split", "test"],
                       capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "id,label"
    assert len(lines) == 13


def test_calibrate_writes_parseable_bank(dataset, tmp_path, capsys):
    bank_path = tmp_path / "bank.txt"
    assert main(["calibrate", "--data", str(dataset),
                 "--out", str(bank_path)]) == 0
    from spatialbench.kernelnet import parse_bank
    bank = parse_bank(bank_path.read_text())
    assert bank.decision_threshold == 9
    capsys.readouterr()
    # the calibrated bank feeds back into classify
    assert main(["classify", "--data", str(dataset), "--bank", str(bank_path),
                 "--out", str(tmp_path / "p.csv")]) == 0


def test_inspect_dumps_geometry(dataset, capsys):
    item = json.loads((dataset / "manifest.jsonl").read_text().splitlines()[0])
    code, out, _ = run(["inspect", "--data", str(dataset),
                        "--id", item["id"]], capsys)
    assert code == 0
    assert item["id"] in out and "oracle label" in out and "polyline" in out
    assert run(["inspect", "--data", str(dataset), "--id", "missing"],
               capsys)[0] == 1


def test_same_argv_same_bytes(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(GEN + ["--out", str(a)]) == 0
    assert main(GEN + ["--out", str(b)]) == 0
    for fa in sorted(a.rglob("*")):
        if fa.is_file():
            assert fa.read_bytes() == (b / fa.relative_to(a)).read_bytes()


def test_convexity_classify_flow(tmp_path, capsys):
    ds = tmp_path / "conv"
    assert main(["generate", "--task", "convexity", "--count-per-class", "4",
                 "--test-count-per-class", "4", "--seed", "3",
                 "--out", str(ds)]) == 0
    preds = tmp_path / "p.csv"
    assert main(["classify", "--data", str(ds), "--net", "convexity",
                 "--split", "test", "--out", str(preds)]) == 0
    capsys.readouterr()
    code, out, _ = run(["evaluate", "--data", str(ds),
                        "--predictions", str(preds)], capsys)
    assert code == 0 and "convexity" in out
