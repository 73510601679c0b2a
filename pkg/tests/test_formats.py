import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from occtrack.formats import (
    CorruptDocument,
    KittiTrackRecord,
    MalformedLine,
    MotRecord,
    SchemaVersionMismatch,
    dumps_sequence,
    format_float,
    kitti_to_tracks,
    loads_sequence,
    mot_to_tracks,
    parse_kitti,
    parse_mot,
    read_sequence,
    results_to_kitti,
    results_to_tracks,
    sequence_gt_tracks,
    tracks_to_kitti,
    tracks_to_mot,
    write_kitti,
    write_mot,
    write_sequence,
)
from occtrack.metrics import EvalTrack
from occtrack.simworld import clear_scenario, constant_velocity_occlusion_scenario, dataset_stats, simulate
from occtrack.simworld.simulate import Sequence
from occtrack.supervision import label_sequence
from occtrack.tracker import EmittedBox, FrameResult

DATA = Path(__file__).parent / "data"

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)
coord = st.floats(-1e6, 1e6, allow_nan=False)


# -- canonical floats --------------------------------------------------------


@pytest.mark.parametrize("x, text", [(3.0, "3"), (-1000.0, "-1000"), (0.1, "0.1"), (1e22, "1e+22"), (-0.0, "-0"), (5e-05, "5e-05")])
def test_format_float(x, text):
    assert format_float(x) == text


@given(finite)
def test_format_float_roundtrips(x):
    assert float(format_float(x)) == x


def test_format_float_rejects_nonfinite():
    with pytest.raises(ValueError):
        format_float(math.inf)


# -- KITTI -------------------------------------------------------------------


def test_kitti_golden_byte_identical():
    text = (DATA / "kitti_golden.txt").read_text()
    assert write_kitti(parse_kitti(text)) == text


def test_kitti_sample_line_fields():
    r = parse_kitti((DATA / "kitti_golden.txt").read_text())[1]
    assert (r.frame, r.track_id, r.type, r.truncated, r.occluded) == (0, 0, "Van", 0.0, 0)
    assert r.alpha == -1.793451
    assert r.bbox == (296.744956, 161.752147, 455.226042, 292.372804)
    assert r.dimensions == (2.0, 1.823255, 4.433886)
    assert r.location == (-4.552284, 1.858523, 13.410495)
    assert r.rotation_y == -2.115488 and r.score is None


def test_kitti_score_column():
    recs = parse_kitti((DATA / "kitti_golden.txt").read_text())
    assert recs[-1].score == 1.0 and recs[-2].score == 0.875


def test_kitti_empty():
    assert parse_kitti("") == []
    assert write_kitti([]) == ""


@pytest.mark.parametrize(
    "line, where",
    [
        ("0 1 Car", "17 or 18"),
        ("x 1 Car 0 0 0 1 1 2 2 1 1 1 0 0 5 0", "frame"),
        ("0 1 Car 0 0 0 1 1 2 zz 1 1 1 0 0 5 0", "not a number"),
        ("0 1 Car 0 0 0 5 1 2 2 1 1 1 0 0 5 0", "bbox"),
        ("0 1 Car 0 0 0 1 1 2 2 1 1 1 0 0 nan 0", "non-finite"),
    ],
)
def test_kitti_malformed(line, where):
    good = "0 2 Car 0 0 0 1 1 2 2 1 1 1 0 0 5 0\n"
    with pytest.raises(MalformedLine) as exc:
        parse_kitti(good + line + "\n")
    assert exc.value.line_no == 2 and where in str(exc.value)


def test_kitti_blank_line_rejected():
    with pytest.raises(MalformedLine) as exc:
        parse_kitti("0 2 Car 0 0 0 1 1 2 2 1 1 1 0 0 5 0\n\n0 2 Car 0 0 0 1 1 2 2 1 1 1 0 0 5 0\n")
    assert exc.value.line_no == 2


kitti_records = st.builds(
    lambda frame, tid, typ, trunc, occ, alpha, l, t, w, h, dims, loc, ry, score: KittiTrackRecord(
        frame, tid, typ, trunc, occ, alpha, (l, t, l + w, t + h), dims, loc, ry, score
    ),
    st.integers(0, 10**6),
    st.integers(-1, 10**6),
    st.sampled_from(["Car", "Pedestrian", "Van", "Cyclist", "DontCare"]),
    st.floats(0, 1),
    st.integers(-1, 3),
    coord,
    st.floats(-1e4, 1e4),
    st.floats(-1e4, 1e4),
    st.floats(0, 1e3),
    st.floats(0, 1e3),
    st.tuples(coord, coord, coord),
    st.tuples(coord, coord, coord),
    coord,
    st.none() | st.floats(0, 1),
)


@settings(max_examples=200, deadline=None)
@given(st.lists(kitti_records, max_size=20))
def test_kitti_write_parse_roundtrip(records):
    assert parse_kitti(write_kitti(records)) == records


# -- MOT ---------------------------------------------------------------------


@pytest.mark.parametrize("name", ["mot_golden.txt", "mot_golden10.txt"])
def test_mot_golden_byte_identical(name):
    text = (DATA / name).read_text()
    assert write_mot(parse_mot(text)) == text


def test_mot_example_line():
    (r,) = parse_mot("1,1,10,20,30,40,1,-1,-1,-1")
    assert (r.frame, r.id, r.bb_left, r.bb_top, r.bb_width, r.bb_height, r.conf) == (1, 1, 10, 20, 30, 40, 1)
    assert r.box == (10, 20, 40, 60)
    assert r.num_fields == 10


def test_mot_nine_fields_preserved():
    (r,) = parse_mot("3,2,1.5,2,3,4,0.5,7,8\n")
    assert r.num_fields == 9 and r.z == -1.0
    assert write_mot([r]) == "3,2,1.5,2,3,4,0.5,7,8\n"


@pytest.mark.parametrize(
    "line, where",
    [
        ("1,1,10", "9 or 10"),
        ("1,1,10,20,-30,40,1,-1,-1,-1", "negative"),
        ("0,1,10,20,30,40,1,-1,-1,-1", ">= 1"),
        ("1,a,10,20,30,40,1,-1,-1,-1", "id"),
    ],
)
def test_mot_malformed(line, where):
    with pytest.raises(MalformedLine) as exc:
        parse_mot("1,1,10,20,30,40,1,-1,-1,-1\n" + line)
    assert exc.value.line_no == 2 and where in str(exc.value)


def test_mot_10k_lines_roundtrip():
    rng = np.random.default_rng(0)
    lines = []
    for i in range(10_000):
        l, t = rng.uniform(0, 1920, 2).round(2)
        w, h = rng.uniform(1, 400, 2).round(2)
        lines.append(f"{i // 20 + 1},{i % 20 + 1},{format_float(l)},{format_float(t)},{format_float(w)},{format_float(h)},1,-1,-1,-1")
    text = "\n".join(lines) + "\n"
    recs = parse_mot(text)
    assert len(recs) == 10_000
    assert write_mot(recs) == text


mot_records = st.builds(
    lambda frame, tid, l, t, w, h, conf, x, y, z, nine: MotRecord(
        frame, tid, l, t, w, h, conf, x, y, -1.0 if nine else z, 9 if nine else 10
    ),
    st.integers(1, 10**6),
    st.integers(-1, 10**6),
    coord,
    coord,
    st.floats(0, 1e4),
    st.floats(0, 1e4),
    finite,
    coord,
    coord,
    coord,
    st.booleans(),
)


@settings(max_examples=200, deadline=None)
@given(st.lists(mot_records, max_size=20))
def test_mot_write_parse_roundtrip(records):
    assert parse_mot(write_mot(records)) == records


def test_record_validation():
    with pytest.raises(ValueError):
        MotRecord(0, 1, 0, 0, 1, 1)
    with pytest.raises(ValueError):
        MotRecord(1, 1, 0, 0, 1, 1, z=3.0, num_fields=9)
    with pytest.raises(ValueError):
        KittiTrackRecord(0, 1, "Car", 0, 0, 0, (5, 0, 1, 1), (1, 1, 1), (0, 0, 0), 0)


# -- conversions -------------------------------------------------------------


def test_tracks_kitti_roundtrip():
    tracks = [EvalTrack(1, "Car", {0: (1.0, 2.0, 3.0, 4.0), 2: (1.5, 2.5, 3.5, 4.5)}, 0.75),
              EvalTrack(2, "Pedestrian", {1: (0.0, 0.0, 1.0, 2.0)}, 0.5)]
    back = kitti_to_tracks(parse_kitti(write_kitti(tracks_to_kitti(tracks, with_score=True))))
    assert back == tracks


def test_kitti_to_tracks_filters():
    recs = parse_kitti((DATA / "kitti_golden.txt").read_text())
    tracks = kitti_to_tracks(recs, categories=["Car", "Pedestrian"])
    assert sorted((t.id, t.category) for t in tracks) == [(2, "Pedestrian"), (3, "Car"), (4, "Pedestrian")]
    assert all(t.id >= 0 for t in kitti_to_tracks(recs))


def test_tracks_mot_roundtrip_shifts_frames():
    tracks = [EvalTrack(3, "Pedestrian", {0: (1.0, 2.0, 4.0, 8.0)}, 0.5)]
    recs = tracks_to_mot(tracks)
    assert recs[0].frame == 1 and recs[0].bb_width == 3.0
    assert mot_to_tracks(parse_mot(write_mot(recs))) == tracks


def test_results_conversions():
    res = [
        FrameResult(0, (EmittedBox(1, "Car", (10.0, 10.0), (4.0, 2.0), 0.5),), ()),
        FrameResult(1, (EmittedBox(1, "Car", (11.0, 10.0), (4.0, 2.0), 0.7),), ()),
    ]
    (t,) = results_to_tracks(res)
    assert t.boxes == {0: (8.0, 9.0, 12.0, 11.0), 1: (9.0, 9.0, 13.0, 11.0)}
    assert t.confidence == pytest.approx(0.6)
    recs = results_to_kitti(res)
    assert [r.score for r in recs] == [0.5, 0.7]
    assert parse_kitti(write_kitti(recs)) == recs


def test_sequence_gt_tracks_visibility_gate():
    seq = simulate(constant_velocity_occlusion_scenario(0, 0))
    tracks = sequence_gt_tracks(seq)
    vis = {f.index: f.get(1) for f in seq.frames}
    assert set(tracks[0].boxes) == {f for f, o in vis.items() if o is not None and o.in_frame and o.vis >= 0.15}


# -- sequence documents ------------------------------------------------------


def test_sequence_roundtrip_exact(tmp_path):
    seq = simulate(constant_velocity_occlusion_scenario(1, 3))
    labels = label_sequence(seq)
    write_sequence(tmp_path / "a.jsonl", seq, labels)
    doc = read_sequence(tmp_path / "a.jsonl")
    assert doc.labels == labels
    assert dumps_sequence(doc.sequence, doc.labels) == dumps_sequence(seq, labels)
    for a, b in zip(doc.sequence.frames, seq.frames):
        assert a.objects == b.objects


def test_sequence_roundtrip_preserves_stats():
    seqs = [simulate(clear_scenario(2, i, 20)) for i in range(2)]
    seqs.append(simulate(constant_velocity_occlusion_scenario(2, 0)))
    back = [loads_sequence(dumps_sequence(s)).sequence for s in seqs]
    assert dataset_stats(back).to_json() == dataset_stats(seqs).to_json()


def test_empty_sequence_roundtrip():
    seq = simulate(clear_scenario(0, 0, 5))
    empty = Sequence(seq.name, seq.seed, seq.fps, seq.image_size, tuple(f.__class__(f.index, f.intrinsics, f.pose, ()) for f in seq.frames))
    doc = loads_sequence(dumps_sequence(empty))
    assert len(doc.sequence.frames) == 5 and doc.sequence.ids() == [] and doc.labels is None


def _doc_lines():
    return dumps_sequence(simulate(clear_scenario(0, 0, 3))).splitlines()


def test_unknown_version():
    lines = _doc_lines()
    header = json.loads(lines[0])
    header["version"] = 99
    with pytest.raises(SchemaVersionMismatch):
        loads_sequence("\n".join([json.dumps(header)] + lines[1:]))


@pytest.mark.parametrize(
    "mutate",
    [
        lambda lines: [],
        lambda lines: ["not json"] + lines[1:],
        lambda lines: ['{"format": "other"}'] + lines[1:],
        lambda lines: lines[:-1],
        lambda lines: lines[:2] + ['{"frame": 1}'] + lines[3:],
        lambda lines: [json.dumps({k: v for k, v in json.loads(lines[0]).items() if k != "num_frames"})] + lines[1:],
    ],
)
def test_corrupt_documents(mutate):
    with pytest.raises(CorruptDocument):
        loads_sequence("\n".join(mutate(_doc_lines())))
