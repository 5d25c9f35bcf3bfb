"""Crack morphology statistics: half-thickness, saturation, continuity,
severity scoring and stage partitioning."""

from __future__ import annotations

import math
import statistics
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .distance import squared_edt
from .mask_core import as_mask, saturation

# Tertile cut levels; see partition_stages.
STAGE_LEVELS = (Fraction(1, 3), Fraction(2, 3))


class UndefinedThickness(ValueError):
    """Thickness is undefined (no foreground, or no background to measure to)."""


@dataclass(frozen=True)
class StageStats:
    stage_id: int
    n: int
    sat_mean: float
    sat_std: float
    thick_mean: float
    thick_std: float
    split: str = "FULL"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("StageStats needs n >= 1")
        if self.sat_std < 0 or self.thick_std < 0:
            raise ValueError("standard deviations must be >= 0")

    @property
    def degenerate(self) -> bool:
        """True when n == 1 and the reported deviations are placeholders."""
        return self.n == 1

    def to_record(self) -> dict:
        rec = asdict(self)
        rec["stage"] = rec.pop("stage_id")
        return {k: rec[k] for k in ("stage", "split", "n", "sat_mean", "sat_std", "thick_mean", "thick_std")}


def half_thickness(mask) -> np.ndarray:
    """Distance from each foreground pixel to the nearest background pixel.

    Background pixels hold 0, so an isolated 1-px line has value 1 throughout.
    Pixels outside the raster do not count as background.
    """
    mask = as_mask(mask)
    if not mask.any():
        return np.zeros(mask.shape)
    if mask.all():
        raise UndefinedThickness("mask has no background pixel to measure thickness against")
    d2, _, _ = squared_edt(~mask)
    out = np.sqrt(d2)
    out[~mask] = 0.0
    return out


def mean_thickness(mask) -> float:
    mask = as_mask(mask)
    if not mask.any():
        raise UndefinedThickness("mean thickness of an empty mask is undefined")
    return float(half_thickness(mask)[mask].mean())


def thickness_loss(mask, mu_t: float) -> float:
    return abs(mean_thickness(mask) - mu_t)


def saturation_loss(mask, mu_s: float) -> float:
    return abs(saturation(mask) - mu_s)


def laplacian(mask) -> np.ndarray:
    """4-neighbour Laplacian response with zero padding."""
    x = as_mask(mask).astype(np.float64)
    p = np.pad(x, 1)
    return p[:-2, 1:-1] + p[2:, 1:-1] + p[1:-1, :-2] + p[1:-1, 2:] - 4.0 * x


def continuity_loss(mask) -> float:
    """Mean absolute Laplacian response over the whole raster."""
    return float(np.abs(laplacian(mask)).mean())


def severity_score(mask, norm: tuple[float, float],
                   weights: tuple[float, float] = (0.5, 0.5)) -> float:
    """Weighted sum of saturation and mean thickness, each clamped to [0, 1]
    after dividing by the dataset maxima in ``norm = (s_max, t_max)``."""
    s_max, t_max = norm
    if s_max <= 0 or t_max <= 0:
        raise ValueError("normalisation bounds must be > 0")
    return score_from_stats(saturation(mask), mean_thickness(mask), norm, weights)


def score_from_stats(s: float, t: float, norm: tuple[float, float],
                     weights: tuple[float, float] = (0.5, 0.5)) -> float:
    s_max, t_max = norm
    ws, wt = weights
    return ws * min(max(s / s_max, 0.0), 1.0) + wt * min(max(t / t_max, 0.0), 1.0)


def percentile(values: Sequence[float], level: Fraction) -> float:
    """Linear-interpolation percentile at ``level`` in [0, 1].

    The rank ``level * (n - 1)`` is kept exact so integral ranks pick an order
    statistic without float drift.
    """
    xs = sorted(values)
    rank = Fraction(level) * (len(xs) - 1)
    lo = math.floor(rank)
    frac = rank - lo
    if frac == 0:
        return float(xs[lo])
    return float(xs[lo] + float(frac) * (xs[lo + 1] - xs[lo]))


def partition_stages(scores: Sequence[float], levels=STAGE_LEVELS) -> list[int]:
    """Label each score 0/1/2 by its position relative to the two cut percentiles
    (``score <= low`` -> 0, ``low < score <= high`` -> 1, else 2)."""
    if len(scores) < 3:
        raise ValueError(f"need at least 3 samples to partition, got {len(scores)}")
    lo = percentile(scores, levels[0])
    hi = percentile(scores, levels[1])
    return [0 if v <= lo else 1 if v <= hi else 2 for v in scores]


def stats_from_values(sats: Sequence[float], thicks: Sequence[float],
                      stage_id: int = 0, split: str = "FULL") -> StageStats:
    if not sats:
        raise ValueError("cannot summarise an empty list")
    n = len(sats)
    return StageStats(
        stage_id=stage_id,
        n=n,
        sat_mean=statistics.fmean(sats),
        sat_std=statistics.stdev(sats) if n > 1 else 0.0,
        thick_mean=statistics.fmean(thicks),
        thick_std=statistics.stdev(thicks) if n > 1 else 0.0,
        split=split,
    )


def stage_statistics(masks: Sequence[np.ndarray], stage_id: int = 0, split: str = "FULL") -> StageStats:
    """Sample mean and (n-1) standard deviation of saturation and mean thickness."""
    if len(masks) == 0:
        raise ValueError("cannot summarise an empty list of masks")
    sats = [saturation(m) for m in masks]
    thicks = [mean_thickness(m) for m in masks]
    return stats_from_values(sats, thicks, stage_id, split)
