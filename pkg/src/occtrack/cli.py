"""Command-line entry point: simulate, stats, label, track, eval, ablate.

Exit codes: 0 success, 1 usage error, 2 data error.  Errors are reported
on stderr as one JSON object per line.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .formats import (
    CorruptDocument,
    MalformedLine,
    SchemaVersionMismatch,
    kitti_to_tracks,
    mot_to_tracks,
    parse_kitti,
    parse_mot,
    read_sequence,
    results_to_kitti,
    results_to_tracks,
    sequence_gt_tracks,
    tracks_to_mot,
    write_kitti,
    write_mot,
    write_sequence,
)
from .formats.convert import GT_MIN_VISIBILITY
from .metrics import MetricConfig, evaluate, mean_ap, pooled_ap, sequence_ap_terms
from .simworld import (
    BENCHMARK_NOISE,
    CATEGORIES,
    PROFILES,
    DetectorNoiseConfig,
    EmptyDataset,
    InvalidScenario,
    ScenarioConfig,
    benchmark,
    dataset_stats,
    oracle_detector,
    simulate,
)
from .simworld.stats import OCCLUSION_VIS
from .supervision import Mode, Status, SupervisionConfig, label_sequence
from .tracker import OcclusionMode, TrackerConfig, run_tracker, track_rebirth

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
JOBS_ENV = "OCCTRACK_JOBS"
MANIFEST = "manifest.json"
MANIFEST_VERSION = 1
DEFAULT_REBIRTH_WINDOW = 20


class UsageError(Exception):
    pass


class DataError(Exception):
    def __init__(self, message: str, path=None):
        super().__init__(message)
        self.path = None if path is None else str(path)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _diag(kind: str, message: str, **extra) -> None:
    print(json.dumps({"level": "error", "kind": kind, "message": message, **extra}), file=sys.stderr)


def _dump_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n", encoding="utf-8")


def _load_json(path) -> object:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"file not found: {path}", path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise DataError(f"{path}: invalid JSON: {e}", path) from None


def _jobs(args) -> int:
    if args.jobs is not None:
        return args.jobs
    env = os.environ.get(JOBS_ENV)
    if env is None:
        return 1
    try:
        n = int(env)
    except ValueError:
        raise UsageError(f"{JOBS_ENV} must be a positive integer, got {env!r}") from None
    if n < 1:
        raise UsageError(f"{JOBS_ENV} must be a positive integer, got {env!r}")
    return n


def _pmap(fn, items, jobs: int):
    """Order-preserving map, in worker processes when ``jobs > 1``."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def _seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _int_at_least(low: int):
    def parse(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        if v < low:
            raise argparse.ArgumentTypeError(f"must be >= {low}")
        return v

    return parse


_positive_int = _int_at_least(1)
_nonneg_int = _int_at_least(0)


# -- dataset I/O ---------------------------------------------------------


def _dataset_files(dataset) -> list[Path]:
    root = Path(dataset)
    if not root.is_dir():
        raise DataError(f"dataset directory not found: {root}", root)
    manifest = root / MANIFEST
    if manifest.is_file():
        doc = _load_json(manifest)
        names = doc.get("sequences", []) if isinstance(doc, dict) else None
        if names is None:
            raise DataError(f"{manifest}: malformed manifest", manifest)
        files = [root / f"{n}.jsonl" for n in names]
        for f in files:
            if not f.is_file():
                raise DataError(f"sequence listed in manifest is missing: {f}", f)
    else:
        files = sorted(root.glob("*.jsonl"))
    return sorted(files, key=lambda p: p.stem)


def _read_doc(path: Path):
    try:
        return read_sequence(path)
    except (SchemaVersionMismatch, CorruptDocument) as e:
        raise DataError(f"{path}: {e}", path) from None


def _load_dataset(dataset, jobs: int = 1):
    files = _dataset_files(dataset)
    return _pmap(_read_doc, files, jobs)


def _write_manifest(out: Path, names, **extra) -> None:
    _dump_json(out / MANIFEST, {"version": MANIFEST_VERSION, "sequences": sorted(names), **extra})


# -- config handling -----------------------------------------------------


def _config_section(args, key: str) -> dict:
    if not getattr(args, "config", None):
        return {}
    doc = _load_json(args.config)
    if not isinstance(doc, dict):
        raise UsageError(f"{args.config}: config must be a JSON object")
    unknown = set(doc) - {"supervision", "tracker", "metrics", "detector"}
    if unknown:
        raise UsageError(f"{args.config}: unknown config sections {sorted(unknown)}")
    section = doc.get(key, {})
    if not isinstance(section, dict):
        raise UsageError(f"{args.config}: section {key!r} must be an object")
    return dict(section)


def _build(cls, base: dict, overrides: dict, what: str):
    merged = dict(base)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return cls.from_json(merged) if hasattr(cls, "from_json") else cls(**merged)
    except (TypeError, ValueError) as e:
        raise UsageError(f"invalid {what} configuration: {e}") from None


def _supervision_config(args) -> SupervisionConfig:
    return _build(
        SupervisionConfig,
        _config_section(args, "supervision"),
        {
            "mode": args.mode,
            "t_vis": args.t_vis,
            "t_occl": args.t_occl,
            "invisible_loss_weight": args.invisible_weight,
            "lambda_off": args.lambda_off,
            "lambda_s": args.lambda_s,
            "lambda_d": args.lambda_d,
        },
        "supervision",
    )


def _tracker_config(args) -> TrackerConfig:
    return _build(
        TrackerConfig,
        _config_section(args, "tracker"),
        {
            "occlusion_mode": args.occlusion_mode,
            "score_threshold": args.score_threshold,
            "visibility_threshold": args.visibility_threshold,
            "max_occlusion_age": args.max_occlusion_age,
            "rebirth_window": args.rebirth_window,
            "radius_scale": args.radius_scale,
        },
        "tracker",
    )


def _detector_config(args) -> DetectorNoiseConfig:
    base = {} if args.exact_detections else {
        k: getattr(BENCHMARK_NOISE, k)
        for k in ("center_sigma", "size_sigma", "displacement_sigma", "score_eps", "min_visibility",
                  "full_visibility", "min_detect_prob", "with_3d")
    }
    base.update(_config_section(args, "detector"))
    return _build(
        DetectorNoiseConfig,
        base,
        {"center_sigma": args.center_sigma, "displacement_sigma": args.displacement_sigma},
        "detector",
    )


def _metric_config(args) -> MetricConfig:
    return _build(
        MetricConfig,
        _config_section(args, "metrics"),
        {"track_iou_threshold": args.iou, "box_match_iou": args.box_iou, "track_ap_assignment": args.assignment},
        "metrics",
    )


# -- commands ------------------------------------------------------------


def _scenario_entries(path: Path):
    doc = _load_json(path)
    if isinstance(doc, dict) and "scenarios" in doc:
        entries = doc["scenarios"]
    elif isinstance(doc, list):
        entries = doc
    else:
        entries = [doc]
    out = []
    for e in entries:
        if isinstance(e, str):
            sub = (path.parent / e) if not Path(e).is_absolute() else Path(e)
            out.append((sub, _load_json(sub)))
        else:
            out.append((path, e))
    return out


def _derived_seed(seed: int, index: int) -> int:
    ss = np.random.SeedSequence(seed, spawn_key=(index,))
    return int(ss.generate_state(1, np.uint64)[0])


def _simulate_one(cfg: ScenarioConfig):
    return simulate(cfg)


def cmd_simulate(args) -> int:
    jobs = _jobs(args)
    if args.benchmark:
        seed = 0 if args.seed is None else args.seed
        configs = benchmark(seed, args.count, args.benchmark, args.frames)
    else:
        configs = []
        for path in args.scenarios:
            for src, doc in _scenario_entries(Path(path)):
                override = None if args.seed is None else _derived_seed(args.seed, len(configs))
                try:
                    configs.append(ScenarioConfig.from_json(doc, override))
                except InvalidScenario as e:
                    raise DataError(f"{src}: {e}", src) from None
    names = [c.name for c in configs]
    if len(set(names)) != len(names):
        raise DataError("scenario names must be unique")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for cfg, seq in zip(configs, _pmap(_simulate_one, configs, jobs)):
        write_sequence(out / f"{cfg.name}.jsonl", seq)
    _write_manifest(out, names)
    print(f"wrote {len(configs)} sequences to {out}")
    return EXIT_OK


def cmd_stats(args) -> int:
    docs = _load_dataset(args.dataset, _jobs(args))
    try:
        report = dataset_stats([d.sequence for d in docs], args.occlusion_vis)
    except EmptyDataset:
        raise DataError(f"dataset has no sequences: {args.dataset}", args.dataset) from None
    print(report.table(), end="")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _dump_json(out / "stats.json", report.to_json())
        (out / "stats.txt").write_text(report.table(), encoding="utf-8")
        (out / "occlusion_histogram.csv").write_text(report.histogram_csv(), encoding="utf-8")
    return EXIT_OK


def _label_one(item):
    path, cfg, out = item
    doc = _read_doc(path)
    labels = label_sequence(doc.sequence, cfg)
    write_sequence(Path(out) / path.name, doc.sequence, labels)
    return {s.value: labels.count(s) for s in Status}


def cmd_label(args) -> int:
    cfg = _supervision_config(args)
    files = _dataset_files(args.dataset)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    counts = _pmap(_label_one, [(f, cfg, out) for f in files], _jobs(args))
    _write_manifest(out, [f.stem for f in files], supervision=cfg.to_json())
    _dump_json(out / "labels_summary.json", {f.stem: c for f, c in zip(files, counts)})
    print(f"labelled {len(files)} sequences ({cfg.mode.value}) into {out}")
    return EXIT_OK


def _track_sequence(seq, tracker_cfg: TrackerConfig, noise: DetectorNoiseConfig, det_seed=None):
    dets = oracle_detector(seq, noise, det_seed)
    cams = [(f.intrinsics, f.pose) for f in seq.frames]
    results = run_tracker(dets, tracker_cfg, cams, seq.image_size)
    if tracker_cfg.rebirth_window > 0:
        results = track_rebirth(results, tracker_cfg.rebirth_window, tracker_cfg.radius_scale)
    return results


def _track_one(item):
    path, tracker_cfg, noise, out, fmt = item
    doc = _read_doc(path)
    results = _track_sequence(doc.sequence, tracker_cfg, noise)
    name = doc.sequence.name
    if fmt == "kitti":
        (Path(out) / f"{name}.txt").write_text(write_kitti(results_to_kitti(results)), encoding="utf-8")
    else:
        (Path(out) / f"{name}.txt").write_text(write_mot(tracks_to_mot(results_to_tracks(results))), encoding="utf-8")
    return name


def cmd_track(args) -> int:
    tracker_cfg = _tracker_config(args)
    noise = _detector_config(args)
    files = _dataset_files(args.dataset)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    names = _pmap(_track_one, [(f, tracker_cfg, noise, out, args.format) for f in files], _jobs(args))
    _dump_json(
        out / "run.json",
        {"format": args.format, "sequences": sorted(names), "tracker": tracker_cfg.to_json(),
         "detector": {k: getattr(noise, k) for k in noise.__dataclass_fields__}},
    )
    print(f"tracked {len(names)} sequences ({tracker_cfg.occlusion_mode.value}) into {out}")
    return EXIT_OK


def _read_tracks(path: Path, fmt: str, categories):
    text = path.read_text(encoding="utf-8")
    try:
        if fmt == "kitti":
            return kitti_to_tracks(parse_kitti(text), categories)
        return mot_to_tracks(parse_mot(text))
    except MalformedLine as e:
        raise DataError(f"{path}: {e}", path) from None
    except ValueError as e:
        raise DataError(f"{path}: {e}", path) from None


def _gt_tracks(gt_dir: Path, fmt: str, categories, min_vis: float) -> dict:
    if not gt_dir.is_dir():
        raise DataError(f"ground-truth directory not found: {gt_dir}", gt_dir)
    docs = sorted(gt_dir.glob("*.jsonl"))
    if docs:
        return {p.stem: sequence_gt_tracks(_read_doc(p).sequence, min_vis) for p in docs}
    return {p.stem: _read_tracks(p, fmt, categories) for p in sorted(gt_dir.glob("*.txt"))}


def cmd_eval(args) -> int:
    cfg = _metric_config(args)
    categories = list(args.categories)
    pred_dir = Path(args.pred)
    if not pred_dir.is_dir():
        raise DataError(f"prediction directory not found: {pred_dir}", pred_dir)
    gts = _gt_tracks(Path(args.gt), args.format, categories, args.gt_min_visibility)
    preds = {p.stem: p for p in sorted(pred_dir.glob("*.txt"))}
    if not gts:
        raise DataError(f"no ground-truth sequences in {args.gt}", args.gt)
    if set(preds) != set(gts):
        missing, extra = sorted(set(gts) - set(preds)), sorted(set(preds) - set(gts))
        raise DataError(f"sequence names differ: missing predictions {missing}, unexpected predictions {extra}")
    items = [(n, _read_tracks(preds[n], args.format, categories), gts[n]) for n in sorted(gts)]
    report = evaluate(items, categories, cfg)
    print(report.table(), end="")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _dump_json(out / "metrics.json", report.to_json())
        (out / "metrics.txt").write_text(report.table(), encoding="utf-8")
    return EXIT_OK


def _ablate_one(item):
    path, configs, noise, min_vis, metric_cfg = item
    seq = _read_doc(path).sequence
    gts = sequence_gt_tracks(seq, min_vis)
    out = []
    for cfg in configs:
        preds = results_to_tracks(_track_sequence(seq, cfg, noise))
        out.append(sequence_ap_terms(preds, gts, CATEGORIES, metric_cfg))
    return out


def ablation_table(rows, categories=CATEGORIES) -> str:
    lines = [f"{'Occlusion':<12}{'Rebirth':>9}" + "".join(f"{c + ' AP':>16}" for c in categories) + f"{'mAP':>8}"]
    for r in rows:
        cells = "".join(f"{_pct(r['ap'][c]):>16}" for c in categories)
        lines.append(f"{r['occlusion_mode']:<12}{('on' if r['rebirth'] else 'off'):>9}{cells}{_pct(r['mAP']):>8}")
    return "\n".join(lines) + "\n"


def _pct(v) -> str:
    return "-" if v is None or np.isnan(v) else f"{100 * v:.1f}"


def run_ablation(sequence_files, modes, rebirth_window, noise, metric_cfg, min_vis=GT_MIN_VISIBILITY,
                 bootstrap=0, bootstrap_seed=0, jobs=1):
    """Track AP for each (occlusion mode, rebirth on/off) setting.

    With ``bootstrap > 0`` the sequences are resampled with replacement and
    the pooled mAP of every setting is recomputed per resample.
    """
    settings = [(m, rb) for m in modes for rb in (False, True)]
    configs = [TrackerConfig(occlusion_mode=m, rebirth_window=rebirth_window if rb else 0) for m, rb in settings]
    per_seq = _pmap(_ablate_one, [(f, configs, noise, min_vis, metric_cfg) for f in sequence_files], jobs)
    rows = []
    for k, (m, rb) in enumerate(settings):
        terms = [s[k] for s in per_seq]
        ap = pooled_ap(terms, CATEGORIES)
        rows.append({"occlusion_mode": OcclusionMode(m).value, "rebirth": rb, "ap": ap, "mAP": mean_ap(ap)})
    result = {"rows": rows, "rebirth_window": rebirth_window, "sequences": [Path(f).stem for f in sequence_files]}
    if bootstrap:
        rng = np.random.default_rng(bootstrap_seed)
        n = len(per_seq)
        samples = np.empty((bootstrap, len(settings)))
        for b in range(bootstrap):
            idx = rng.integers(0, n, n)
            for k in range(len(settings)):
                samples[b, k] = mean_ap(pooled_ap([per_seq[i][k] for i in idx], CATEGORIES))
        result["bootstrap"] = {"seed": bootstrap_seed, "mAP": samples.tolist()}
    return result


def cmd_ablate(args) -> int:
    files = _dataset_files(args.dataset)
    if not files:
        raise DataError(f"dataset has no sequences: {args.dataset}", args.dataset)
    res = run_ablation(
        files, args.modes, args.rebirth_window, _detector_config(args), _metric_config(args),
        args.gt_min_visibility, args.bootstrap, args.bootstrap_seed, _jobs(args),
    )
    table = ablation_table(res["rows"])
    print(table, end="")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        doc = {
            **res,
            "rows": [
                {**r, "ap": {c: (None if np.isnan(v) else v) for c, v in r["ap"].items()},
                 "mAP": None if np.isnan(r["mAP"]) else r["mAP"]}
                for r in res["rows"]
            ],
        }
        _dump_json(out / "ablation.json", doc)
        (out / "ablation.txt").write_text(table, encoding="utf-8")
    return EXIT_OK


# -- parser --------------------------------------------------------------


def _add_jobs(p):
    p.add_argument("--jobs", type=_positive_int, default=None,
                   help=f"worker processes for per-sequence work (default: ${JOBS_ENV} or 1)")


def _add_config(p):
    p.add_argument("--config", help="JSON config with optional supervision/tracker/metrics/detector sections")


def _add_tracker_flags(p, with_mode=True):
    if with_mode:
        p.add_argument("--occlusion-mode", choices=[m.value for m in OcclusionMode])
    p.add_argument("--score-threshold", type=float)
    p.add_argument("--visibility-threshold", type=float)
    p.add_argument("--max-occlusion-age", type=_nonneg_int)
    p.add_argument("--rebirth-window", type=_nonneg_int, help="frames; 0 disables track rebirth")
    p.add_argument("--radius-scale", type=float, help="matching radius = scale * sqrt(w*h)")


def _add_detector_flags(p):
    p.add_argument("--exact-detections", action="store_true", help="noise-free oracle detections")
    p.add_argument("--center-sigma", type=float)
    p.add_argument("--displacement-sigma", type=float)


def _add_metric_flags(p):
    p.add_argument("--iou", type=float, help="track IoU threshold for Track AP (default 0.5)")
    p.add_argument("--box-iou", type=float, help="per-frame IoU threshold for CLEAR/IDF1 (default 0.5)")
    p.add_argument("--assignment", choices=["optimal", "greedy"], help="Track AP matching rule")
    p.add_argument("--gt-min-visibility", type=float, default=GT_MIN_VISIBILITY,
                   help="GT boxes from sequence documents need vis >= this (default %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="occtrack", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="render scenarios into sequence documents")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--scenarios", nargs="+", help="scenario or manifest JSON files")
    src.add_argument("--benchmark", choices=PROFILES, help="generate a seeded benchmark instead")
    p.add_argument("--count", type=_positive_int, default=50, help="benchmark size (default %(default)s)")
    p.add_argument("--frames", type=_int_at_least(2), default=60, help="benchmark sequence length")
    p.add_argument("--seed", type=_seed, help="64-bit seed (benchmark layout or per-scenario override)")
    p.add_argument("--out", required=True)
    _add_jobs(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("stats", help="per-category track statistics and occlusion histogram")
    p.add_argument("dataset")
    p.add_argument("--out")
    p.add_argument("--occlusion-vis", type=float, default=OCCLUSION_VIS,
                   help="a frame counts as fully occluded below this visibility (default %(default)s)")
    _add_jobs(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("label", help="generate supervision labels")
    p.add_argument("dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--mode", choices=[m.value for m in Mode])
    p.add_argument("--t-vis", type=float, help="default 0.05")
    p.add_argument("--t-occl", type=float, help="default 0.15")
    p.add_argument("--invisible-weight", type=float, help="loss weight of occluded positives (default 20)")
    p.add_argument("--lambda-off", type=float)
    p.add_argument("--lambda-s", type=float, help="default 0.1")
    p.add_argument("--lambda-d", type=float)
    _add_config(p)
    _add_jobs(p)
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("track", help="run the oracle detector and tracker")
    p.add_argument("dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["kitti", "mot"], default="kitti")
    _add_tracker_flags(p)
    _add_detector_flags(p)
    _add_config(p)
    _add_jobs(p)
    p.set_defaults(func=cmd_track)

    p = sub.add_parser("eval", help="score predictions against ground truth")
    p.add_argument("--pred", required=True, help="directory of prediction files")
    p.add_argument("--gt", required=True, help="directory of sequence documents or label files")
    p.add_argument("--format", choices=["kitti", "mot"], default="kitti")
    p.add_argument("--categories", nargs="+", default=list(CATEGORIES))
    p.add_argument("--out")
    _add_metric_flags(p)
    _add_config(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ablate", help="compare occlusion modes with and without track rebirth")
    p.add_argument("dataset")
    p.add_argument("--out")
    p.add_argument("--modes", nargs="+", choices=[m.value for m in OcclusionMode],
                   default=[m.value for m in OcclusionMode])
    p.add_argument("--rebirth-window", type=_nonneg_int, default=DEFAULT_REBIRTH_WINDOW)
    p.add_argument("--bootstrap", type=_nonneg_int, default=0, help="number of sequence resamples")
    p.add_argument("--bootstrap-seed", type=_seed, default=0)
    _add_detector_flags(p)
    _add_metric_flags(p)
    _add_config(p)
    _add_jobs(p)
    p.set_defaults(func=cmd_ablate)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as e:
        _diag("usage", str(e))
        return EXIT_USAGE
    except DataError as e:
        _diag("data", str(e), **({"path": e.path} if e.path else {}))
        return EXIT_DATA
    except OSError as e:
        _diag("data", str(e), **({"path": e.filename} if e.filename else {}))
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
