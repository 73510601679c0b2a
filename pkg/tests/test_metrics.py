import json
import math
from importlib import resources

import jsonschema
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from occtrack.metrics import (
    EvalTrack,
    MetricConfig,
    average_precision,
    clear_mot,
    evaluate,
    idf1,
    pooled_ap,
    sequence_ap_terms,
    tp_flags,
    track_ap,
    track_iou,
)


def T(tid, boxes, conf=1.0, cat="Car"):
    return EvalTrack(tid, cat, dict(boxes), conf)


def sq(x, y=0.0, s=10.0):
    return (x, y, x + s, y + s)


def schema():
    text = resources.files("occtrack").joinpath("schemas/metrics_report.schema.json").read_text()
    return json.loads(text)


# -- CLEAR MOT -------------------------------------------------------------


def test_perfect_tracking():
    gts = [T(1, {f: sq(10 * f) for f in range(5)}), T(2, {f: sq(10 * f, 50) for f in range(5)})]
    c = clear_mot(gts, gts)
    assert (c.tp, c.fp, c.fn, c.idsw, c.frag) == (10, 0, 0, 0, 0)
    assert c.mota == 1.0 and c.motp == 1.0 and c.mt == 2


def test_id_switch_counted_once():
    gt = [T(1, {f: sq(0) for f in range(4)})]
    pr = [T(7, {0: sq(0), 1: sq(0)}), T(8, {2: sq(0), 3: sq(0)})]
    c = clear_mot(pr, gt)
    assert (c.tp, c.idsw, c.frag) == (4, 1, 0)
    assert c.mota == pytest.approx(1 - 1 / 4)


def test_persistence_beats_better_iou():
    # pred 2 fits GT better at frame 1 but pred 1 was matched before and is still above threshold
    gt = [T(1, {0: sq(0), 1: sq(0)})]
    pr = [T(1, {0: sq(0), 1: sq(1)}), T(2, {1: sq(0)})]
    c = clear_mot(pr, gt)
    assert (c.tp, c.fp, c.idsw) == (2, 1, 0)


def test_fragmentation_and_mt_ml():
    gt = [T(1, {f: sq(0) for f in range(10)})]
    pr = [T(1, {f: sq(0) for f in (0, 1, 2, 5, 6, 9)})]
    c = clear_mot(pr, gt)
    assert c.frag == 2 and c.tp == 6 and c.pt == 1
    c = clear_mot([], gt)
    assert c.ml == 1 and c.fn == 10 and c.mota == 0.0


def test_threshold_equality_matches():
    # IoU exactly 0.5: boxes 0..10 and 0..20 along x (same height)
    gt = [T(1, {0: (0, 0, 20, 10)})]
    pr = [T(1, {0: (0, 0, 10, 10)})]
    assert clear_mot(pr, gt).tp == 1


@pytest.mark.parametrize("seed", range(4))
def test_clear_mot_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    for _ in range(40):
        preds, gts = oracles.random_instance(rng, EvalTrack)
        got = clear_mot(preds, gts)
        ref = oracles.clear_mot(preds, gts)
        assert (got.tp, got.fp, got.fn, got.idsw, got.frag) == (ref["tp"], ref["fp"], ref["fn"], ref["idsw"], ref["frag"])
        assert (got.mt, got.pt, got.ml) == (ref["mt"], ref["pt"], ref["ml"])
        assert got.iou_sum == ref["iou_sum"]


# -- identity ----------------------------------------------------------------


def test_idf1_hand_case():
    gt = [T(1, {f: sq(0) for f in range(4)})]
    pr = [T(7, {0: sq(0), 1: sq(0)}), T(8, {2: sq(0), 3: sq(0)})]
    c = idf1(pr, gt)
    assert (c.idtp, c.idfp, c.idfn) == (2, 2, 2)
    assert c.idf1 == pytest.approx(0.5)


@pytest.mark.parametrize("seed", range(4))
def test_idf1_matches_oracle(seed):
    rng = np.random.default_rng(100 + seed)
    for _ in range(40):
        preds, gts = oracles.random_instance(rng, EvalTrack)
        got = idf1(preds, gts)
        ref = oracles.idf1(preds, gts)
        assert (got.idtp, got.idfp, got.idfn) == (ref["idtp"], ref["idfp"], ref["idfn"])


# -- Track AP ----------------------------------------------------------------


def test_track_iou_hand_value():
    p = T(1, {0: sq(0), 1: sq(0)})
    g = T(2, {0: sq(0), 2: sq(0)})
    assert track_iou(p, g) == pytest.approx(100 / 300)


def test_track_ap_hand_case():
    g1 = T(1, {f: sq(0) for f in range(3)})
    g2 = T(2, {f: sq(100) for f in range(3)})
    p_hit = T(1, dict(g1.boxes), 0.9)
    p_miss = T(2, {f: sq(300) for f in range(3)}, 0.8)
    p_late = T(3, dict(g2.boxes), 0.7)
    assert tp_flags([p_hit, p_miss, p_late], [g1, g2]) == [True, False, True]
    # PR points (0.5, 1), (0.5, 0.5), (1, 2/3) -> 0.5 * 1 + 0.5 * 2/3
    ap, m = track_ap([p_hit, p_miss, p_late], [g1, g2])
    assert ap["Car"] == pytest.approx(0.5 + 1 / 3)
    assert m == ap["Car"]


def test_greedy_vs_optimal():
    g1 = T(1, {0: sq(0)})
    g2 = T(2, {0: sq(3)})
    a = T(1, {0: sq(1)}, 0.9)  # overlaps both, slightly more with g1
    b = T(2, {0: sq(-1)}, 0.8)  # overlaps only g1 above threshold
    assert track_iou(a, g1) > track_iou(a, g2) >= 0.5 > track_iou(b, g2)
    assert tp_flags([a, b], [g1, g2]) == [True, True]
    greedy = MetricConfig(track_ap_assignment="greedy")
    assert tp_flags([a, b], [g1, g2], greedy) == [True, False]


def test_ap_edge_cases():
    assert math.isnan(average_precision([], [], 0))
    assert average_precision([], [], 3) == 0.0
    assert average_precision([0.5], [True], 1) == 1.0
    ap, m = track_ap([], [T(1, {0: sq(0)}, cat="Pedestrian")], categories=["Car", "Pedestrian"])
    assert math.isnan(ap["Car"]) and ap["Pedestrian"] == 0.0 and m == 0.0


@pytest.mark.parametrize("seed", range(4))
def test_track_ap_matches_oracle(seed):
    rng = np.random.default_rng(200 + seed)
    for _ in range(40):
        preds, gts = oracles.random_instance(rng, EvalTrack)
        flags = tp_flags(preds, gts)
        assert flags == oracles.track_ap_flags(preds, gts)
        ap, _ = track_ap(preds, gts, categories=["Car"])
        ref = oracles.track_ap(preds, gts)
        assert oracles.isclose(ap["Car"], ref)


def test_pooling_equals_disjoint_merge():
    rng = np.random.default_rng(9)
    seqs = [oracles.random_instance(rng, EvalTrack) for _ in range(5)]
    terms = [sequence_ap_terms(p, g, ["Car"]) for p, g in seqs]
    pooled = pooled_ap(terms, ["Car"])["Car"]
    # shift each sequence to its own frame range so tracks never interact
    merged_p, merged_g = [], []
    for k, (p, g) in enumerate(seqs):
        off = 100 * k
        merged_p += [EvalTrack(1000 * k + t.id, t.category, {f + off: b for f, b in t.boxes.items()}, t.confidence) for t in p]
        merged_g += [EvalTrack(1000 * k + t.id, t.category, {f + off: b for f, b in t.boxes.items()}) for t in g]
    single, _ = track_ap(merged_p, merged_g, categories=["Car"])
    assert oracles.isclose(pooled, single["Car"], 1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_metric_ranges(seed):
    preds, gts = oracles.random_instance(np.random.default_rng(seed), EvalTrack)
    c = clear_mot(preds, gts)
    assert c.mota <= 1.0 and 0.0 <= c.motp <= 1.0
    assert c.tp + c.fn == c.num_gt and c.tp + c.fp == c.num_pred
    i = idf1(preds, gts)
    assert 0.0 <= i.idf1 <= 1.0 and i.idtp <= min(c.num_gt, c.num_pred)
    ap, _ = track_ap(preds, gts, categories=["Car"])
    assert math.isnan(ap["Car"]) or 0.0 <= ap["Car"] <= 1.0


def test_config_validation():
    with pytest.raises(ValueError):
        MetricConfig(track_iou_threshold=1.0)
    with pytest.raises(ValueError):
        MetricConfig(track_ap_assignment="random")
    with pytest.raises(ValueError):
        MetricConfig.from_json({"iou": 0.5})
    with pytest.raises(ValueError):
        EvalTrack(1, "Car", {0: (10, 0, 0, 10)})


# -- report ------------------------------------------------------------------


def _report():
    rng = np.random.default_rng(4)
    seqs = []
    for k in range(3):
        p, g = oracles.random_instance(rng, EvalTrack)
        p2, g2 = oracles.random_instance(rng, EvalTrack, category="Pedestrian")
        seqs.append((f"s{k}", p + [EvalTrack(t.id + 10, t.category, t.boxes, t.confidence) for t in p2],
                     g + [EvalTrack(t.id + 10, t.category, t.boxes) for t in g2]))
    return seqs, evaluate(seqs, ["Car", "Pedestrian"])


def test_report_sums_counts():
    seqs, rep = _report()
    tp = sum(clear_mot([t for t in p if t.category == "Car"], [t for t in g if t.category == "Car"]).tp for _, p, g in seqs)
    assert rep.clear["Car"].tp == tp
    overall = rep.overall()
    assert overall["TP"] == rep.clear["Car"].tp + rep.clear["Pedestrian"].tp
    assert rep.sequences == ["s0", "s1", "s2"]


def test_report_json_validates():
    _, rep = _report()
    doc = rep.to_json()
    jsonschema.validate(doc, schema())
    text = json.dumps(doc, allow_nan=False)
    assert json.loads(text)["schema_version"] == 1


def test_report_json_nan_becomes_null():
    rep = evaluate([("a", [], [])], ["Car"])
    doc = rep.to_json()
    assert doc["mAP"] is None and doc["per_class"]["Car"]["TrackAP"] is None
    jsonschema.validate(doc, schema())


def test_report_table_layout():
    _, rep = _report()
    text = rep.table()
    for title in ("Track AP", "CLEAR MOT", "MT/PT/ML", "Identity"):
        assert title in text
    assert "Car AP" in text and "Pedestrian AP" in text and "mAP" in text
    assert text.endswith("\n")
