"""Synthetic crack masks for fixtures and demos."""

from __future__ import annotations

import math

import numpy as np

from .mask_core import saturation
from .morphometry import mean_thickness

STAGE0_LIKE = (0.011, 1.2)


def _stamp(mask: np.ndarray, x: float, y: float, width: int) -> None:
    h, w = mask.shape
    x0 = math.floor(x + 0.5) - (width - 1) // 2
    y0 = math.floor(y + 0.5) - (width - 1) // 2
    mask[max(y0, 0):min(y0 + width, h), max(x0, 0):min(x0 + width, w)] = True


def crack_path_mask(rng: np.random.Generator, shape=(256, 256), n_pixels: int = 720,
                    thick_fraction: float = 0.3, margin: float = 0.15,
                    widths=(2, 4)) -> np.ndarray:
    """Draw a meandering crack by stamping squares along a persistent random walk.

    The walk turns back into the central box ``[margin, 1 - margin]`` when it
    reaches the edge, and switches between the two stamp ``widths`` in runs of
    15-40 steps. Drawing stops once ``n_pixels`` foreground pixels exist.
    """
    h, w = shape
    lo_x, hi_x = margin * w, (1 - margin) * w
    lo_y, hi_y = margin * h, (1 - margin) * h
    x = rng.uniform(lo_x, hi_x)
    y = rng.uniform(lo_y, hi_y)
    heading = rng.uniform(-math.pi, math.pi)
    mask = np.zeros(shape, dtype=bool)
    run, width = 0, widths[0]
    for _ in range(20 * (h + w)):
        if run <= 0:
            run = int(rng.integers(15, 41))
            width = widths[1] if rng.random() < thick_fraction else widths[0]
        _stamp(mask, x, y, width)
        if np.count_nonzero(mask) >= n_pixels:
            break
        heading += rng.normal(0.0, 0.12)
        nx, ny = x + math.cos(heading), y + math.sin(heading)
        if not (lo_x <= nx <= hi_x and lo_y <= ny <= hi_y):
            heading = math.atan2((h / 2 - y), (w / 2 - x)) + rng.uniform(-0.6, 0.6)
            nx, ny = x + math.cos(heading), y + math.sin(heading)
        x, y = nx, ny
        run -= 1
    return mask


def stage0_like_seed(rng: np.random.Generator, shape=(256, 256),
                     target=STAGE0_LIKE, tol_rel: float = 0.05, attempts: int = 40) -> np.ndarray:
    """Hairline crack with saturation and mean thickness near ``target``.

    The share of thick runs is nudged between attempts until both statistics
    land within ``tol_rel``; the closest attempt is returned otherwise.
    """
    s_goal, t_goal = target
    n_pixels = round(s_goal * shape[0] * shape[1])
    frac = 0.3
    best, best_err = None, math.inf
    for _ in range(attempts):
        m = crack_path_mask(rng, shape, n_pixels, frac)
        s, t = saturation(m), mean_thickness(m)
        err = max(abs(s - s_goal) / s_goal, abs(t - t_goal) / t_goal)
        if err < best_err:
            best, best_err = m, err
        if err <= tol_rel:
            break
        frac = min(max(frac + (0.25 if t < t_goal else -0.25) * abs(t - t_goal) / t_goal * 4, 0.0), 1.0)
    return best
