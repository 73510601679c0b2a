"""Per-category track statistics and occlusion-ratio histograms."""
from __future__ import annotations

from dataclasses import dataclass, field

from .scenario import CATEGORIES
from .simulate import Sequence

OCCLUSION_VIS = 0.05
HIST_BINS = 10


class EmptyDataset(ValueError):
    pass


@dataclass
class CategoryStats:
    num_tracks: int = 0
    avg_length: float = 0.0
    max_length: int = 0
    histogram: list[int] = field(default_factory=lambda: [0] * HIST_BINS)
    occluded_10pct: int = 0  # tracks fully occluded for >= 10% of their length

    @property
    def occluded_10pct_fraction(self) -> float:
        return self.occluded_10pct / self.num_tracks if self.num_tracks else 0.0

    def to_json(self) -> dict:
        return {
            "num_tracks": self.num_tracks,
            "avg_length": self.avg_length,
            "max_length": self.max_length,
            "histogram": list(self.histogram),
            "occluded_10pct": self.occluded_10pct,
            "occluded_10pct_fraction": self.occluded_10pct_fraction,
        }


@dataclass
class StatsReport:
    per_category: dict[str, CategoryStats]
    num_sequences: int
    occlusion_vis: float = OCCLUSION_VIS

    @property
    def total_tracks(self) -> int:
        return sum(c.num_tracks for c in self.per_category.values())

    @property
    def occluded_10pct_fraction(self) -> float:
        n = self.total_tracks
        return sum(c.occluded_10pct for c in self.per_category.values()) / n if n else 0.0

    def to_json(self) -> dict:
        return {
            "num_sequences": self.num_sequences,
            "occlusion_vis": self.occlusion_vis,
            "hist_bins": HIST_BINS,
            "total_tracks": self.total_tracks,
            "occluded_10pct_fraction": self.occluded_10pct_fraction,
            "per_category": {k: v.to_json() for k, v in self.per_category.items()},
        }

    def table(self) -> str:
        lines = [f"{'Class':<12}{'# Tracks':>10}{'Avg. Length':>13}{'Max Length':>12}{'Occl>=10%':>11}"]
        for name, c in self.per_category.items():
            lines.append(
                f"{name:<12}{c.num_tracks:>10d}{c.avg_length:>13.1f}{c.max_length:>12d}{100 * c.occluded_10pct_fraction:>10.1f}%"
            )
        return "\n".join(lines) + "\n"

    def histogram_csv(self) -> str:
        cats = list(self.per_category)
        rows = ["bin_low,bin_high," + ",".join(cats)]
        for i in range(HIST_BINS):
            counts = ",".join(str(self.per_category[c].histogram[i]) for c in cats)
            rows.append(f"{i / HIST_BINS:g},{(i + 1) / HIST_BINS:g},{counts}")
        return "\n".join(rows) + "\n"


def occlusion_bin(occluded: int, length: int) -> int:
    """Histogram bin of ``occluded / length``; bins are ``[i/10, (i+1)/10)``
    with the last one closed.  Integer arithmetic avoids float edge cases."""
    return min(HIST_BINS * occluded // length, HIST_BINS - 1)


def dataset_stats(sequences, occlusion_vis: float = OCCLUSION_VIS) -> StatsReport:
    """Track counts, lengths and occlusion ratios per category.

    A track's length counts the frames in which its box overlaps the image;
    its occlusion ratio is the fraction of those with ``vis < occlusion_vis``.
    """
    sequences = list(sequences)
    if not sequences:
        raise EmptyDataset("no sequences")
    lengths: dict[str, list[int]] = {c: [] for c in CATEGORIES}
    report = StatsReport({c: CategoryStats() for c in CATEGORIES}, len(sequences), occlusion_vis)
    for seq in sequences:
        seq: Sequence
        for track in seq.tracks().values():
            in_view = [o for o in track.values() if o.in_frame]
            if not in_view:
                continue
            cat = in_view[0].category
            n = len(in_view)
            occluded = sum(1 for o in in_view if o.vis < occlusion_vis)
            stats = report.per_category.setdefault(cat, CategoryStats())
            lengths.setdefault(cat, []).append(n)
            stats.histogram[occlusion_bin(occluded, n)] += 1
            if 10 * occluded >= n:
                stats.occluded_10pct += 1
    for cat, ls in lengths.items():
        stats = report.per_category[cat]
        stats.num_tracks = len(ls)
        stats.avg_length = sum(ls) / len(ls) if ls else 0.0
        stats.max_length = max(ls) if ls else 0
    return report
