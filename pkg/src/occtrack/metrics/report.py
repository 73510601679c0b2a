"""Aggregate evaluation over sequences and report rendering."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .clearmot import ClearCounts, clear_mot
from .common import MetricConfig, by_category
from .identity import IdentityCounts, idf1
from .trackap import mean_ap, pooled_ap, sequence_ap_terms

SCHEMA_VERSION = 1

CLEAR_COLUMNS = ("MOTA", "MOTP", "MODA", "IDSW", "sMOTA")
MT_COLUMNS = ("MT", "PT", "ML", "FRAG")
ID_COLUMNS = ("IDF1", "IDP", "IDR", "MOTA", "MOTP", "MT", "PT", "ML", "IDSW", "FRAG")


@dataclass
class MetricsReport:
    categories: list[str]
    track_ap: dict[str, float]
    mAP: float
    clear: dict[str, ClearCounts]
    identity: dict[str, IdentityCounts]
    config: MetricConfig = field(default_factory=MetricConfig)
    sequences: list[str] = field(default_factory=list)

    def class_summary(self, cat: str) -> dict:
        out = {"TrackAP": self.track_ap[cat]}
        out.update(self.clear[cat].summary())
        out.update(self.identity[cat].summary())
        return out

    def overall(self) -> dict:
        clear, ident = ClearCounts(), IdentityCounts()
        for cat in self.categories:
            clear += self.clear[cat]
            ident += self.identity[cat]
        out = {"mAP": self.mAP}
        out.update(clear.summary())
        out.update(ident.summary())
        return out

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "config": self.config.to_json(),
            "sequences": list(self.sequences),
            "mAP": _finite(self.mAP),
            "per_class": {c: {k: _finite(v) for k, v in self.class_summary(c).items()} for c in self.categories},
            "overall": {k: _finite(v) for k, v in self.overall().items()},
        }

    def table(self) -> str:
        """Plain-text tables: Track AP, CLEAR MOT, MT/PT/ML, identity."""
        cats = self.categories
        lines = ["Track AP"]
        lines.append("".join(f"{c + ' AP':>16}" for c in cats) + f"{'mAP':>10}")
        lines.append("".join(f"{_pct(self.track_ap[c]):>16}" for c in cats) + f"{_pct(self.mAP):>10}")
        for title, cols in (("CLEAR MOT", CLEAR_COLUMNS), ("MT/PT/ML", MT_COLUMNS), ("Identity", ID_COLUMNS)):
            lines.append("")
            lines.append(title)
            lines.append(f"{'Category':<12}" + "".join(f"{c:>9}" for c in cols))
            for cat in cats:
                s = self.class_summary(cat)
                lines.append(f"{cat:<12}" + "".join(f"{_fmt(c, s[c]):>9}" for c in cols))
        return "\n".join(lines) + "\n"


def _finite(v):
    if isinstance(v, float) and math.isnan(v):
        return None
    return v


def _pct(v: float) -> str:
    return "-" if math.isnan(v) else f"{100 * v:.1f}"


def _fmt(col: str, v) -> str:
    if col in ("IDSW", "FRAG", "FP", "FN"):
        return str(int(v))
    if col in ("MT", "PT", "ML"):
        return f"{v:.1f}"
    return f"{100 * v:.1f}"


def evaluate(sequences, categories, config: MetricConfig = MetricConfig()) -> MetricsReport:
    """Evaluate ``[(name, preds, gts), ...]`` and pool over sequences.

    Track AP pools predictions of all sequences into one ranking; CLEAR
    and identity counts are summed before the ratios are formed.
    """
    categories = list(categories)
    terms, names = [], []
    clear = {c: ClearCounts() for c in categories}
    ident = {c: IdentityCounts() for c in categories}
    for name, preds, gts in sequences:
        names.append(name)
        terms.append(sequence_ap_terms(preds, gts, categories, config))
        for cat in categories:
            p, g = by_category(preds, cat), by_category(gts, cat)
            clear[cat] += clear_mot(p, g, config)
            ident[cat] += idf1(p, g, config)
    ap = pooled_ap(terms, categories)
    return MetricsReport(categories, ap, mean_ap(ap), clear, ident, config, names)
