"""Binary mask representation, raster I/O and line rasterization.

Masks are plain 2-D ``numpy`` boolean arrays indexed ``mask[y, x]``: ``x`` is
the column (rightward) and ``y`` the row (downward). Angles everywhere in the
package are ``atan2(dy, dx)`` in this frame.
"""

from __future__ import annotations

import os
from typing import NamedTuple

import numpy as np
from PIL import Image

DEFAULT_THRESHOLD = 127

# Pillow modes holding 8 bits per channel.
_EIGHT_BIT_MODES = {"L", "LA", "RGB", "RGBA", "P"}


class MaskError(ValueError):
    """Raised for malformed masks or unreadable mask files."""


class PixelCoord(NamedTuple):
    x: int
    y: int


def as_mask(array) -> np.ndarray:
    """Coerce ``array`` to a validated 2-D boolean mask (no copy if already bool)."""
    mask = np.asarray(array)
    if mask.ndim != 2:
        raise MaskError(f"mask must be 2-D, got shape {mask.shape}")
    if mask.shape[0] < 1 or mask.shape[1] < 1:
        raise MaskError(f"mask must be at least 1x1, got shape {mask.shape}")
    if mask.dtype != bool:
        mask = mask != 0
    return mask


def empty_mask(height: int, width: int) -> np.ndarray:
    return as_mask(np.zeros((height, width), dtype=bool))


def load_mask(path: str | os.PathLike, threshold: int = DEFAULT_THRESHOLD) -> np.ndarray:
    """Read an 8-bit PNG/PGM raster; foreground is gray (or luma) ``> threshold``."""
    if not 0 <= threshold <= 255:
        raise MaskError(f"threshold must be in [0, 255], got {threshold}")
    if not os.path.isfile(path):
        raise FileNotFoundError(f"mask file not found: {path}")
    try:
        with Image.open(path) as img:
            img.load()
            if img.mode not in _EIGHT_BIT_MODES:
                raise MaskError(f"unsupported bit depth / mode {img.mode!r} in {path}")
            if img.width == 0 or img.height == 0:
                raise MaskError(f"zero-dimension image: {path}")
            if img.mode == "P":
                img = img.convert("RGB")
            gray = np.asarray(img.convert("L"), dtype=np.uint8)
    except OSError as exc:
        raise MaskError(f"cannot decode {path}: {exc}") from exc
    return as_mask(gray > threshold)


def save_mask(mask, path: str | os.PathLike) -> None:
    """Write ``mask`` as an 8-bit grayscale raster (255 foreground, 0 background).

    The format follows the extension; ``.pgm`` gives binary P5, anything else PNG.
    """
    mask = as_mask(mask)
    img = Image.fromarray(np.where(mask, 255, 0).astype(np.uint8), mode="L")
    ext = os.path.splitext(os.fspath(path))[1].lower()
    img.save(path, format="PPM" if ext in (".pgm", ".pnm") else "PNG")


def in_bounds(mask: np.ndarray, p: PixelCoord) -> bool:
    h, w = mask.shape
    return 0 <= p[0] < w and 0 <= p[1] < h


def line_pixels(a: PixelCoord, b: PixelCoord) -> list[PixelCoord]:
    """Integer Bresenham line from ``a`` to ``b`` (inclusive, 8-connected).

    Traversal always runs from the lexicographically smaller endpoint, so the
    pixel set does not depend on argument order.
    """
    (x0, y0), (x1, y1) = (a, b) if tuple(a) <= tuple(b) else (b, a)
    x0, y0, x1, y1 = int(x0), int(y0), int(x1), int(y1)
    dx, dy = abs(x1 - x0), -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    out = []
    while True:
        out.append(PixelCoord(x0, y0))
        if x0 == x1 and y0 == y1:
            return out
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy


def draw_line(mask, a: PixelCoord, b: PixelCoord) -> np.ndarray:
    """Return a copy of ``mask`` with the digital line ``a``-``b`` set to foreground."""
    mask = as_mask(mask)
    for p in (a, b):
        if not in_bounds(mask, p):
            raise MaskError(f"line endpoint {tuple(p)} outside {mask.shape[1]}x{mask.shape[0]} mask")
    out = mask.copy()
    for x, y in line_pixels(a, b):
        out[y, x] = True
    return out


def saturation(mask) -> float:
    """Foreground fraction; also the walk's density measure."""
    mask = as_mask(mask)
    return float(np.count_nonzero(mask)) / mask.size


def resize_nearest(mask, height: int, width: int) -> np.ndarray:
    """Nearest-neighbour resampling (pixel-centre mapping), which keeps masks binary."""
    mask = as_mask(mask)
    h, w = mask.shape
    rows = np.minimum(((np.arange(height) + 0.5) * h / height).astype(int), h - 1)
    cols = np.minimum(((np.arange(width) + 0.5) * w / width).astype(int), w - 1)
    return mask[np.ix_(rows, cols)]
