"""Mask-to-mask quality metrics and real-vs-generated stage comparisons."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .mask_core import MaskError, as_mask
from .morphometry import StageStats, stage_statistics

PSNR_CAP_DB = 100.0
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03

# Metrics run on hard 0/1 masks; generator outputs scored on soft gray levels
# will not match these numbers.
REPORT_NOTE = "metrics computed on binarised masks (0/1), not on grayscale generator outputs"


@dataclass(frozen=True)
class QualityReport:
    l1: float
    ssim: float
    psnr_db: float

    def to_record(self) -> dict:
        return {"l1": self.l1, "ssim": self.ssim, "psnr_db": self.psnr_db}


@dataclass(frozen=True)
class StageDeltaReport:
    stage: int
    real: StageStats
    generated: StageStats

    @property
    def delta_s(self) -> float:
        return abs(self.real.sat_mean - self.generated.sat_mean)

    @property
    def delta_t(self) -> float:
        return abs(self.real.thick_mean - self.generated.thick_mean)

    def to_records(self) -> list[dict]:
        real = {"stage": self.stage, "case": "Real", **_summary(self.real), "delta_s": None, "delta_t": None}
        fake = {"stage": self.stage, "case": "Fake", **_summary(self.generated),
                "delta_s": self.delta_s, "delta_t": self.delta_t}
        return [real, fake]


def _summary(st: StageStats) -> dict:
    return {"n": st.n, "sat_mean": st.sat_mean, "sat_std": st.sat_std,
            "thick_mean": st.thick_mean, "thick_std": st.thick_std}


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a, b = as_mask(a), as_mask(b)
    if a.shape != b.shape:
        raise MaskError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a.astype(np.float64), b.astype(np.float64)


def l1_distance(a, b) -> float:
    x, y = _pair(a, b)
    return float(np.abs(x - y).mean())


def psnr(a, b) -> float:
    x, y = _pair(a, b)
    mse = float(((x - y) ** 2).mean())
    if mse == 0.0:
        return PSNR_CAP_DB
    return min(10.0 * math.log10(1.0 / mse), PSNR_CAP_DB)


def gaussian_window(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    r = np.arange(size) - (size - 1) / 2
    g = np.exp(-(r * r) / (2 * sigma * sigma))
    return g / g.sum()


def _filter_valid(img: np.ndarray, g: np.ndarray) -> np.ndarray:
    # separable weighted window, valid positions only
    rows = sliding_window_view(img, len(g), axis=1) @ g
    return sliding_window_view(rows, len(g), axis=0) @ g


def ssim(a, b) -> float:
    """Single-scale SSIM with an 11x11 Gaussian window (sigma 1.5), L = 1,
    averaged over window positions that lie fully inside the image."""
    x, y = _pair(a, b)
    if min(x.shape) < SSIM_WINDOW:
        raise MaskError(f"image {x.shape} smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} SSIM window")
    g = gaussian_window()
    c1, c2 = SSIM_K1 ** 2, SSIM_K2 ** 2
    mx, my = _filter_valid(x, g), _filter_valid(y, g)
    vx = _filter_valid(x * x, g) - mx * mx
    vy = _filter_valid(y * y, g) - my * my
    cxy = _filter_valid(x * y, g) - mx * my
    num = (2 * mx * my + c1) * (2 * cxy + c2)
    den = (mx * mx + my * my + c1) * (vx + vy + c2)
    return float((num / den).mean())


def quality_report(a, b) -> QualityReport:
    return QualityReport(l1=l1_distance(a, b), ssim=ssim(a, b), psnr_db=psnr(a, b))


def stage_delta_report(real: Sequence[np.ndarray], generated: Sequence[np.ndarray],
                       stage: int) -> StageDeltaReport:
    if len(real) == 0 or len(generated) == 0:
        raise ValueError("both real and generated lists must be nonempty")
    return StageDeltaReport(
        stage=stage,
        real=stage_statistics(real, stage),
        generated=stage_statistics(generated, stage),
    )
