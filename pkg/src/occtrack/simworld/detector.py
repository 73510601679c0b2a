"""Oracle detector: degrade ground truth into noisy per-frame detections."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import STREAM_DETECTOR, make_rng
from .simulate import Sequence


@dataclass(frozen=True)
class DetectorNoiseConfig:
    """Noise model.

    Objects below ``min_visibility`` (or with zero visibility) are never
    detected.  Above it the detection probability ramps linearly from
    ``min_detect_prob`` up to 1 at ``full_visibility``.
    """

    center_sigma: float = 0.0
    size_sigma: float = 0.0  # relative
    displacement_sigma: float = 0.0
    score_eps: float = 0.0
    min_visibility: float = 0.0
    full_visibility: float = 0.0
    min_detect_prob: float = 1.0
    with_3d: bool = True

    def __post_init__(self):
        if min(self.center_sigma, self.size_sigma, self.displacement_sigma) < 0:
            raise ValueError("noise sigmas must be >= 0")
        if not 0 <= self.score_eps <= 1:
            raise ValueError("score_eps must be in [0, 1]")
        if not 0 <= self.min_detect_prob <= 1:
            raise ValueError("min_detect_prob must be in [0, 1]")
        if self.full_visibility < self.min_visibility:
            raise ValueError("full_visibility must be >= min_visibility")

    def detect_prob(self, vis: float) -> float:
        if vis <= 0 or vis < self.min_visibility:
            return 0.0
        if vis >= self.full_visibility:
            return 1.0
        frac = (vis - self.min_visibility) / (self.full_visibility - self.min_visibility)
        return self.min_detect_prob + (1.0 - self.min_detect_prob) * frac


@dataclass(frozen=True)
class Detection:
    """A detector output.  ``p - d`` estimates the previous-frame center."""

    p: tuple[float, float]
    s: tuple[float, float]
    score: float
    d: tuple[float, float]
    vis_flag: float
    category: str = "Car"
    P: tuple[float, float, float] | None = None

    @property
    def box(self) -> tuple[float, float, float, float]:
        (u, v), (w, h) = self.p, self.s
        return (u - w / 2, v - h / 2, u + w / 2, v + h / 2)


def oracle_detector(sequence: Sequence, noise: DetectorNoiseConfig, seed: int | None = None) -> list[list[Detection]]:
    """Per-frame detections for ``sequence``.

    Randomness comes from the detector stream of ``seed`` (defaults to the
    sequence seed), drawn in annotation order so the output is a pure
    function of the inputs.
    """
    rng = make_rng(sequence.seed if seed is None else seed, STREAM_DETECTOR)
    out = []
    prev: dict[int, tuple[float, float]] = {}
    for frame in sequence.frames:
        dets = []
        for o in frame.objects:
            # fixed number of draws per object keeps streams aligned
            u_detect, u_score = rng.random(2)
            n_center = rng.standard_normal(2)
            n_size = rng.standard_normal(2)
            n_disp = rng.standard_normal(2)
            if u_detect >= noise.detect_prob(o.vis):
                continue
            p = (o.p[0] + noise.center_sigma * n_center[0], o.p[1] + noise.center_sigma * n_center[1])
            s = (
                max(o.s[0] * (1 + noise.size_sigma * n_size[0]), 0.0),
                max(o.s[1] * (1 + noise.size_sigma * n_size[1]), 0.0),
            )
            if o.id in prev:
                q = prev[o.id]
                d = (o.p[0] - q[0] + noise.displacement_sigma * n_disp[0], o.p[1] - q[1] + noise.displacement_sigma * n_disp[1])
            else:
                d = (0.0, 0.0)
            score = o.vis * (1 - noise.score_eps) + noise.score_eps * u_score
            dets.append(
                Detection(
                    p=(float(p[0]), float(p[1])),
                    s=(float(s[0]), float(s[1])),
                    score=float(min(max(score, 0.0), 1.0)),
                    d=(float(d[0]), float(d[1])),
                    vis_flag=float(o.vis),
                    category=o.category,
                    P=o.P if noise.with_3d else None,
                )
            )
        prev = {o.id: o.p for o in frame.objects}
        out.append(dets)
    return out


# Noise used by the synthetic benchmark and as the command-line default.
BENCHMARK_NOISE = DetectorNoiseConfig(
    center_sigma=1.0,
    size_sigma=0.03,
    displacement_sigma=1.0,
    score_eps=0.1,
    min_visibility=0.15,
    full_visibility=0.5,
    min_detect_prob=0.8,
)
EXACT = DetectorNoiseConfig()
