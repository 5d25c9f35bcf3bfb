"""Thinning to 1-px skeletons and endpoint detection."""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .mask_core import PixelCoord, as_mask

THINNING_METHODS = ("zhang-suen", "guo-hall")

_EIGHT = np.ones((3, 3), dtype=bool)


def _neighbours(img: np.ndarray):
    """P2..P9 (N, NE, E, SE, S, SW, W, NW) of every pixel, zero padded."""
    p = np.pad(img, 1)
    h, w = img.shape
    return (
        p[0:h, 1:w + 1],      # P2 north
        p[0:h, 2:w + 2],      # P3 north-east
        p[1:h + 1, 2:w + 2],  # P4 east
        p[2:h + 2, 2:w + 2],  # P5 south-east
        p[2:h + 2, 1:w + 1],  # P6 south
        p[2:h + 2, 0:w],      # P7 south-west
        p[1:h + 1, 0:w],      # P8 west
        p[0:h, 0:w],          # P9 north-west
    )


def _zhang_suen_marks(img: np.ndarray, step: int) -> np.ndarray:
    P2, P3, P4, P5, P6, P7, P8, P9 = nb = _neighbours(img)
    count = sum(n.astype(np.uint8) for n in nb)
    ring = nb + (P2,)
    transitions = sum((~a & b).astype(np.uint8) for a, b in zip(ring[:-1], ring[1:]))
    if step == 0:
        c3 = ~(P2 & P4 & P6)
        c4 = ~(P4 & P6 & P8)
    else:
        c3 = ~(P2 & P4 & P8)
        c4 = ~(P2 & P6 & P8)
    return img & (count >= 2) & (count <= 6) & (transitions == 1) & c3 & c4


def _guo_hall_marks(img: np.ndarray, step: int) -> np.ndarray:
    P2, P3, P4, P5, P6, P7, P8, P9 = _neighbours(img)
    u8 = np.uint8
    C = ((~P2 & (P3 | P4)).astype(u8) + (~P4 & (P5 | P6)).astype(u8)
         + (~P6 & (P7 | P8)).astype(u8) + (~P8 & (P9 | P2)).astype(u8))
    N1 = ((P9 | P2).astype(u8) + (P3 | P4).astype(u8)
          + (P5 | P6).astype(u8) + (P7 | P8).astype(u8))
    N2 = ((P2 | P3).astype(u8) + (P4 | P5).astype(u8)
          + (P6 | P7).astype(u8) + (P8 | P9).astype(u8))
    N = np.minimum(N1, N2)
    if step == 0:
        m = (P6 | P7 | ~P9) & P8
    else:
        m = (P2 | P3 | ~P5) & P4
    return img & (C == 1) & (N >= 2) & (N <= 3) & ~m


def _spare_vanishing(img: np.ndarray, marks: np.ndarray) -> np.ndarray:
    # Parallel deletion can erase a whole component (e.g. a 2x2 block).
    # Keep the first pixel, in row-major order, of any such component.
    survivors = img & ~marks
    labels, n = ndimage.label(img, structure=_EIGHT)
    if n == 0:
        return marks
    alive = np.zeros(n + 1, dtype=bool)
    alive[labels[survivors]] = True
    dead = np.flatnonzero(~alive[1:]) + 1
    if dead.size == 0:
        return marks
    marks = marks.copy()
    flat = labels.ravel()
    for lab in dead:
        first = np.argmax(flat == lab)
        marks.flat[first] = False
    return marks


def skeletonize(mask, method: str = "zhang-suen") -> np.ndarray:
    """Thin ``mask`` with two-subiteration parallel thinning until stable.

    The output is a subset of the input and keeps its 8-connected
    component count.
    """
    if method == "zhang-suen":
        marker = _zhang_suen_marks
    elif method == "guo-hall":
        marker = _guo_hall_marks
    else:
        raise ValueError(f"unknown thinning method {method!r}; expected one of {THINNING_METHODS}")
    img = as_mask(mask).copy()
    changed = True
    while changed:
        changed = False
        for step in (0, 1):
            marks = marker(img, step)
            if marks.any():
                marks = _spare_vanishing(img, marks)
                if marks.any():
                    img &= ~marks
                    changed = True
    return img


def neighbor_counts(skeleton) -> np.ndarray:
    """Number of foreground 8-neighbours of each pixel (ones kernel, zero centre)."""
    skel = as_mask(skeleton)
    return sum(n.astype(np.uint8) for n in _neighbours(skel))


def detect_endpoints(skeleton) -> list[PixelCoord]:
    """Foreground pixels with exactly one foreground neighbour, row-major order."""
    skel = as_mask(skeleton)
    ys, xs = np.nonzero(skel & (neighbor_counts(skel) == 1))
    return [PixelCoord(int(x), int(y)) for y, x in zip(ys, xs)]
