"""Endpoint thinning-out and local orientation from window covariance."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .mask_core import PixelCoord, as_mask

SIGN_CONVENTIONS = ("outward", "inward")


class OrientationUndefined(ValueError):
    """The window around an endpoint holds too few pixels for a covariance."""


@dataclass(frozen=True)
class LeeParams:
    window: int = 15
    d_min: float = 4.0
    sign_convention: str = "outward"

    def __post_init__(self):
        if self.window < 3 or self.window % 2 == 0:
            raise ValueError(f"window must be odd and >= 3, got {self.window}")
        if self.d_min < 0:
            raise ValueError(f"d_min must be >= 0, got {self.d_min}")
        if self.sign_convention not in SIGN_CONVENTIONS:
            raise ValueError(f"sign_convention must be one of {SIGN_CONVENTIONS}")


@dataclass(frozen=True)
class Endpoint:
    position: PixelCoord
    theta: float
    dominant_axis: tuple[float, float]
    # Diagnostics kept for eigen-residual checks.
    covariance: tuple[tuple[float, float], tuple[float, float]] = ((0.0, 0.0), (0.0, 0.0))
    eigenvalues: tuple[float, float] = (0.0, 0.0)
    centroid: tuple[float, float] = (0.0, 0.0)


def filter_endpoints(candidates: Sequence[PixelCoord], d_min: float) -> list[PixelCoord]:
    """Greedy pass keeping a candidate only if it is farther than ``d_min`` from all kept ones."""
    kept: list[PixelCoord] = []
    d2 = float(d_min) ** 2
    for c in candidates:
        if all((c[0] - k[0]) ** 2 + (c[1] - k[1]) ** 2 > d2 for k in kept):
            kept.append(PixelCoord(int(c[0]), int(c[1])))
    return kept


def principal_axis(cov) -> tuple[tuple[float, float], tuple[float, float]]:
    """Closed-form eigen-decomposition of a symmetric 2x2 matrix.

    Returns ``((lam1, lam2), v1)`` with ``lam1 >= lam2`` and ``v1`` the unit
    eigenvector of ``lam1``. An isotropic matrix yields ``v1 = (1, 0)``.
    """
    (a, b), (_, c) = cov
    half_tr = 0.5 * (a + c)
    root = math.hypot(0.5 * (a - c), b)
    lam1, lam2 = half_tr + root, half_tr - root
    if b == 0.0:
        v = (1.0, 0.0) if a >= c else (0.0, 1.0)
    else:
        # two algebraically equivalent candidates; take the better conditioned one
        u = (lam1 - c, b)
        w = (b, lam1 - a)
        v = u if math.hypot(*u) >= math.hypot(*w) else w
        n = math.hypot(*v)
        v = (v[0] / n, v[1] / n)
    return (lam1, lam2), v


def window_pixels(skeleton: np.ndarray, center: PixelCoord, window: int) -> np.ndarray:
    """(n, 2) array of (x, y) foreground coordinates inside the clipped window."""
    half = window // 2
    h, w = skeleton.shape
    x0, x1 = max(center[0] - half, 0), min(center[0] + half + 1, w)
    y0, y1 = max(center[1] - half, 0), min(center[1] + half + 1, h)
    ys, xs = np.nonzero(skeleton[y0:y1, x0:x1])
    return np.column_stack([xs + x0, ys + y0]).astype(float)


def estimate_orientation(skeleton, endpoint: PixelCoord, params: LeeParams = LeeParams()) -> Endpoint:
    skel = as_mask(skeleton)
    pts = window_pixels(skel, endpoint, params.window)
    n = len(pts)
    if n < 2:
        raise OrientationUndefined(f"window at {tuple(endpoint)} holds {n} pixel(s)")
    mu = pts.mean(axis=0)
    d = pts - mu
    cxx = float(d[:, 0] @ d[:, 0]) / (n - 1)
    cxy = float(d[:, 0] @ d[:, 1]) / (n - 1)
    cyy = float(d[:, 1] @ d[:, 1]) / (n - 1)
    cov = ((cxx, cxy), (cxy, cyy))
    (lam1, lam2), v = principal_axis(cov)

    to_mass = (mu[0] - endpoint[0], mu[1] - endpoint[1])
    if v[0] * to_mass[0] + v[1] * to_mass[1] < 0:
        v = (-v[0], -v[1])
    if params.sign_convention == "outward":
        v = (-v[0], -v[1])
    # +0.0 folds negative zeros so atan2 stays in (-pi, pi]
    v = (v[0] + 0.0, v[1] + 0.0)
    theta = math.atan2(v[1], v[0])
    if theta == -math.pi:
        theta = math.pi
    return Endpoint(
        position=PixelCoord(int(endpoint[0]), int(endpoint[1])),
        theta=theta,
        dominant_axis=v,
        covariance=cov,
        eigenvalues=(lam1, lam2),
        centroid=(float(mu[0]), float(mu[1])),
    )
