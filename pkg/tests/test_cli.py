import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from occtrack import cli
from occtrack.formats import read_sequence
from occtrack.simworld import clear_scenario
from occtrack.supervision import Status


def run(*argv):
    return cli.main([str(a) for a in argv])


def diag(capsys):
    err = capsys.readouterr().err.strip().splitlines()
    return json.loads(err[-1])


def tree(root: Path) -> dict:
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


@pytest.fixture(scope="module")
def occ_data(tmp_path_factory):
    out = tmp_path_factory.mktemp("occ")
    assert run("simulate", "--benchmark", "occlusion", "--count", 3, "--frames", 40, "--seed", 5, "--out", out) == 0
    return out


@pytest.fixture(scope="module")
def clear_data(tmp_path_factory):
    out = tmp_path_factory.mktemp("clear")
    assert run("simulate", "--benchmark", "clear", "--count", 2, "--frames", 15, "--out", out) == 0
    return out


# -- simulate ----------------------------------------------------------------


def test_simulate_deterministic(tmp_path, occ_data):
    assert run("simulate", "--benchmark", "occlusion", "--count", 3, "--frames", 40, "--seed", 5, "--out", tmp_path) == 0
    assert tree(tmp_path) == tree(occ_data)
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["version"] == 1 and len(manifest["sequences"]) == 3


def test_simulate_missing_file(tmp_path, capsys):
    missing = tmp_path / "nope.json"
    assert run("simulate", "--scenarios", missing, "--out", tmp_path / "o") == 2
    d = diag(capsys)
    assert d["kind"] == "data" and str(missing) in d["message"] + d.get("path", "")


def test_simulate_manifest_of_50(tmp_path):
    files = []
    for i in range(50):
        p = tmp_path / f"s{i:02d}.json"
        p.write_text(json.dumps(clear_scenario(3, i, 4).to_json()))
        files.append(p.name)
    (tmp_path / "all.json").write_text(json.dumps({"scenarios": files}))
    out = tmp_path / "out"
    assert run("simulate", "--scenarios", tmp_path / "all.json", "--out", out) == 0
    assert len(list(out.glob("*.jsonl"))) == 50


def test_simulate_invalid_scenario(tmp_path, capsys):
    doc = clear_scenario(0, 0, 4).to_json()
    doc["agents"][0]["category"] = "Tram"
    (tmp_path / "bad.json").write_text(json.dumps(doc))
    assert run("simulate", "--scenarios", tmp_path / "bad.json", "--out", tmp_path / "o") == 2
    assert "Tram" in diag(capsys)["message"]


def test_usage_errors(tmp_path, capsys):
    assert run("simulate", "--benchmark", "occlusion", "--frames", 1, "--out", tmp_path) == 1
    assert diag(capsys)["kind"] == "usage"
    assert run("frobnicate") == 1
    assert run("simulate", "--out", tmp_path) == 1


def test_help_lists_subcommands():
    out = subprocess.run([sys.executable, "-m", "occtrack.cli", "--help"], capture_output=True, text=True, check=True)
    for cmd in ("simulate", "stats", "label", "track", "eval", "ablate"):
        assert cmd in out.stdout


# -- stats -------------------------------------------------------------------


def test_stats_outputs(tmp_path, occ_data):
    assert run("stats", occ_data, "--out", tmp_path) == 0
    stats = json.loads((tmp_path / "stats.json").read_text())
    hist = (tmp_path / "occlusion_histogram.csv").read_text().strip().splitlines()
    n_tracks = sum(len(read_sequence(p).sequence.ids()) for p in occ_data.glob("*.jsonl"))
    counts = [int(v) for line in hist[1:] for v in line.split(",")[2:]]
    assert sum(counts) == n_tracks
    assert (tmp_path / "stats.txt").read_text().endswith("\n")
    assert stats


def test_stats_empty_dataset(tmp_path, capsys):
    (tmp_path / "empty").mkdir()
    assert run("stats", tmp_path / "empty") == 2
    assert diag(capsys)["kind"] == "data"


def test_stats_does_not_touch_inputs(tmp_path, occ_data):
    before = tree(occ_data)
    run("stats", occ_data, "--out", tmp_path)
    assert tree(occ_data) == before


def test_stats_corrupt_document(tmp_path, capsys):
    (tmp_path / "x.jsonl").write_text('{"format": "occtrack-sequence", "version": 7}\n')
    assert run("stats", tmp_path) == 2
    assert "x.jsonl" in diag(capsys)["message"]


# -- label -------------------------------------------------------------------


def test_label_unknown_mode(tmp_path, occ_data):
    assert run("label", occ_data, "--out", tmp_path, "--mode", "Magic") == 1


def test_label_bad_thresholds(tmp_path, occ_data, capsys):
    assert run("label", occ_data, "--out", tmp_path, "--t-vis", "0.5", "--t-occl", "0.2") == 1
    assert "t_vis" in diag(capsys)["message"]


def test_label_modes_differ_only_on_occluded(tmp_path, occ_data):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("label", occ_data, "--out", a, "--mode", "FilteredGT") == 0
    assert run("label", occ_data, "--out", b, "--mode", "ConstV3D") == 0
    occluded = 0
    for pa in sorted(a.glob("*.jsonl")):
        la = read_sequence(pa).labels
        lb = read_sequence(b / pa.name).labels
        for fa, fb in zip(la.frames, lb.frames):
            for ea, eb in zip(fa, fb):
                if ea.status == Status.OCCLUDED:
                    occluded += 1
                else:
                    assert ea == eb or (ea.center == eb.center and ea.status == eb.status)
    assert occluded > 0


def test_label_idempotent(tmp_path, occ_data):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("label", occ_data, "--out", a) == 0
    assert run("label", occ_data, "--out", b) == 0
    assert tree(a) == tree(b)
    # relabelling labelled documents reproduces them
    c = tmp_path / "c"
    assert run("label", a, "--out", c) == 0
    assert tree(c) == tree(a)
    summary = json.loads((a / "labels_summary.json").read_text())
    assert set(summary) == {p.stem for p in occ_data.glob("*.jsonl")}


def test_label_config_file_and_flag_override(tmp_path, occ_data):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"supervision": {"mode": "ConstV2D", "invisible_loss_weight": 5}}))
    assert run("label", occ_data, "--out", tmp_path / "o", "--config", cfg, "--invisible-weight", 7) == 0
    manifest = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert manifest["supervision"]["mode"] == "ConstV2D"
    assert manifest["supervision"]["invisible_loss_weight"] == 7


# -- track -------------------------------------------------------------------


def test_track_deterministic(tmp_path, occ_data):
    assert run("track", occ_data, "--out", tmp_path / "a") == 0
    assert run("track", occ_data, "--out", tmp_path / "b") == 0
    assert tree(tmp_path / "a") == tree(tmp_path / "b")


def test_track_modes_differ(tmp_path, occ_data):
    assert run("track", occ_data, "--out", tmp_path / "n", "--occlusion-mode", "None") == 0
    assert run("track", occ_data, "--out", tmp_path / "v", "--occlusion-mode", "ConstV3D") == 0
    a = {k: v for k, v in tree(tmp_path / "n").items() if k.endswith(".txt")}
    b = {k: v for k, v in tree(tmp_path / "v").items() if k.endswith(".txt")}
    assert a.keys() == b.keys() and a != b


def test_track_malformed_config(tmp_path, occ_data, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{not json")
    assert run("track", occ_data, "--out", tmp_path / "o", "--config", cfg) in (1, 2)
    cfg.write_text(json.dumps({"tracker": {"warp_speed": 9}}))
    assert run("track", occ_data, "--out", tmp_path / "o", "--config", cfg) == 1
    assert "warp_speed" in diag(capsys)["message"]


def test_track_mot_format(tmp_path, occ_data):
    assert run("track", occ_data, "--out", tmp_path, "--format", "mot") == 0
    run_doc = json.loads((tmp_path / "run.json").read_text())
    assert run_doc["format"] == "mot"
    for name in run_doc["sequences"]:
        first = (tmp_path / f"{name}.txt").read_text().splitlines()[:1]
        assert not first or len(first[0].split(",")) == 10


def test_jobs_parity(tmp_path, occ_data, monkeypatch):
    assert run("track", occ_data, "--out", tmp_path / "one", "--jobs", 1) == 0
    assert run("track", occ_data, "--out", tmp_path / "two", "--jobs", 2) == 0
    assert tree(tmp_path / "one") == tree(tmp_path / "two")
    monkeypatch.setenv("OCCTRACK_JOBS", "2")
    assert run("label", occ_data, "--out", tmp_path / "l2") == 0
    monkeypatch.setenv("OCCTRACK_JOBS", "1")
    assert run("label", occ_data, "--out", tmp_path / "l1") == 0
    assert tree(tmp_path / "l1") == tree(tmp_path / "l2")
    monkeypatch.setenv("OCCTRACK_JOBS", "zero")
    assert run("label", occ_data, "--out", tmp_path / "l3") == 1


# -- eval --------------------------------------------------------------------


def schema():
    return json.loads((Path(cli.__file__).parent / "schemas" / "metrics_report.schema.json").read_text())


def test_eval_perfect_predictions(tmp_path, clear_data):
    pred = tmp_path / "pred"
    assert run("track", clear_data, "--out", pred, "--exact-detections") == 0
    assert run("eval", "--pred", pred, "--gt", clear_data, "--out", tmp_path / "m") == 0
    doc = json.loads((tmp_path / "m" / "metrics.json").read_text())
    jsonschema.validate(doc, schema())
    assert doc["mAP"] == 1.0
    assert doc["overall"]["MOTA"] == 1.0 and doc["overall"]["IDSW"] == 0


def test_eval_against_text_ground_truth(tmp_path, clear_data):
    pred = tmp_path / "pred"
    assert run("track", clear_data, "--out", pred, "--exact-detections") == 0
    gt = tmp_path / "gt"
    gt.mkdir()
    for p in pred.glob("*.txt"):
        (gt / p.name).write_bytes(p.read_bytes())
    assert run("eval", "--pred", pred, "--gt", gt, "--out", tmp_path / "m") == 0
    assert json.loads((tmp_path / "m" / "metrics.json").read_text())["mAP"] == 1.0


def test_eval_mismatched_names(tmp_path, clear_data, capsys):
    pred = tmp_path / "pred"
    pred.mkdir()
    (pred / "unrelated.txt").write_text("")
    assert run("eval", "--pred", pred, "--gt", clear_data) == 2
    assert "unrelated" in diag(capsys)["message"]


def test_eval_malformed_prediction(tmp_path, clear_data, capsys):
    pred = tmp_path / "pred"
    assert run("track", clear_data, "--out", pred, "--exact-detections") == 0
    victim = sorted(pred.glob("*.txt"))[0]
    victim.write_text(victim.read_text() + "0 1 Car\n")
    assert run("eval", "--pred", pred, "--gt", clear_data) == 2
    d = diag(capsys)
    assert victim.name in d["message"] and "line" in d["message"]


# -- ablate ------------------------------------------------------------------


def test_ablate_outputs(tmp_path, occ_data):
    assert run("ablate", occ_data, "--out", tmp_path, "--bootstrap", 3, "--modes", "None", "ConstV3D") == 0
    doc = json.loads((tmp_path / "ablation.json").read_text())
    assert [(r["occlusion_mode"], r["rebirth"]) for r in doc["rows"]] == [
        ("None", False), ("None", True), ("ConstV3D", False), ("ConstV3D", True)
    ]
    assert len(doc["bootstrap"]["mAP"]) == 3 and len(doc["bootstrap"]["mAP"][0]) == 4
    text = (tmp_path / "ablation.txt").read_text()
    assert "Car AP" in text and "mAP" in text
