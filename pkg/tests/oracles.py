"""Brute-force reference implementations used only by the tests.

Nothing here imports from the package under test.
"""

import math

import numpy as np


def neighbour_count_bf(img):
    h, w = img.shape
    out = np.zeros((h, w), dtype=int)
    for y in range(h):
        for x in range(w):
            c = 0
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    if dx == dy == 0:
                        continue
                    yy, xx = y + dy, x + dx
                    if 0 <= yy < h and 0 <= xx < w and img[yy, xx]:
                        c += 1
            out[y, x] = c
    return out


def endpoints_bf(img):
    counts = neighbour_count_bf(img)
    h, w = img.shape
    return [(x, y) for y in range(h) for x in range(w) if img[y, x] and counts[y, x] == 1]


def zhang_suen_reference(img):
    """Literal per-pixel transcription of the two-subiteration rules.

    The image is embedded in a one-pixel background frame so border pixels
    are treated like any other.
    """
    a = np.pad(np.asarray(img, dtype=int), 1)
    H, W = a.shape

    def nbrs(y, x):
        return [a[y - 1, x], a[y - 1, x + 1], a[y, x + 1], a[y + 1, x + 1],
                a[y + 1, x], a[y + 1, x - 1], a[y, x - 1], a[y - 1, x - 1]]

    changed = True
    while changed:
        changed = False
        for step in (0, 1):
            marked = []
            for y in range(1, H - 1):
                for x in range(1, W - 1):
                    if a[y, x] != 1:
                        continue
                    n = nbrs(y, x)
                    P2, P3, P4, P5, P6, P7, P8, P9 = n
                    B = sum(n)
                    seq = n + [n[0]]
                    A = sum(1 for i in range(8) if seq[i] == 0 and seq[i + 1] == 1)
                    if not (2 <= B <= 6 and A == 1):
                        continue
                    if step == 0 and P2 * P4 * P6 == 0 and P4 * P6 * P8 == 0:
                        marked.append((y, x))
                    if step == 1 and P2 * P4 * P8 == 0 and P2 * P6 * P8 == 0:
                        marked.append((y, x))
            for y, x in marked:
                a[y, x] = 0
            changed = changed or bool(marked)
    return a[1:-1, 1:-1].astype(bool)


def dda_line(a, b, supersample=100):
    """Supersampled DDA: walk the major axis in 1/supersample steps and keep the
    samples lying on integer major coordinates, rounding the minor coordinate."""
    (x0, y0), (x1, y1) = a, b
    dx, dy = x1 - x0, y1 - y0
    n = max(abs(dx), abs(dy))
    if n == 0:
        return {(x0, y0)}
    pts = set()
    for i in range(n * supersample + 1):
        t = i / (n * supersample)
        x, y = x0 + t * dx, y0 + t * dy
        major = x if abs(dx) >= abs(dy) else y
        if abs(major - round(major)) < 0.5 / supersample:
            pts.add((int(math.floor(x + 0.5)), int(math.floor(y + 0.5))))
    return pts


def edt_bf(mask):
    """All-pairs Euclidean distance from foreground pixels to the nearest background pixel."""
    h, w = mask.shape
    bg = [(y, x) for y in range(h) for x in range(w) if not mask[y, x]]
    out = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            if mask[y, x]:
                out[y, x] = min(math.sqrt((y - by) ** 2 + (x - bx) ** 2) for by, bx in bg)
    return out


def laplacian_abs_mean_bf(mask):
    h, w = mask.shape
    K = [[0, 1, 0], [1, -4, 1], [0, 1, 0]]
    total = 0.0
    for y in range(h):
        for x in range(w):
            acc = 0
            for i in range(3):
                for j in range(3):
                    yy, xx = y + i - 1, x + j - 1
                    if 0 <= yy < h and 0 <= xx < w:
                        acc += K[i][j] * int(mask[yy, xx])
            total += abs(acc)
    return total / (h * w)


def covariance_bf(points):
    """Sample covariance and numpy's symmetric eigen-decomposition (ascending)."""
    P = np.asarray(points, dtype=float)
    C = np.cov(P.T, ddof=1)
    vals, vecs = np.linalg.eigh(C)
    return C, vals, vecs


def percentile_sorted(values, q):
    """Linear interpolation between order statistics at fractional rank q*(n-1)."""
    xs = sorted(values)
    r = q * (len(xs) - 1)
    lo = int(math.floor(r + 1e-12))
    hi = min(lo + 1, len(xs) - 1)
    return xs[lo] + (r - lo) * (xs[hi] - xs[lo])


def disk_dilate_bf(points, radius, radius_sq=None):
    """Set of pixels within Euclidean distance radius of any point."""
    out = set()
    r2 = radius * radius if radius_sq is None else radius_sq
    r = int(math.ceil(radius))
    for (x, y) in points:
        for dy in range(-r, r + 1):
            for dx in range(-r, r + 1):
                if dx * dx + dy * dy <= r2:
                    out.add((x + dx, y + dy))
    return out
