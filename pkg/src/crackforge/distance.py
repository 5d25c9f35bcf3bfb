"""Exact squared Euclidean distance transforms via lower envelopes of parabolas.

``sampled_transform(cost)`` computes, for every pixel q,

    D(q) = min_p |q - p|^2 + cost(p)

over the sites p with finite cost, together with the minimizing site. A cost
of 0 on a site set gives the classic squared EDT; negative costs give a
power-distance field used for variable-radius disk dilation.
"""

from __future__ import annotations

import numpy as np
from numba import njit

INF = np.inf


@njit(cache=True)
def _envelope_1d(f, d, arg, v, z):
    n = f.shape[0]
    k = -1
    for q in range(n):
        fq = f[q]
        if fq == INF:
            continue
        if k < 0:
            k = 0
            v[0] = q
            z[0] = -INF
            z[1] = INF
            continue
        while True:
            p = v[k]
            s = ((fq + q * q) - (f[p] + p * p)) / (2.0 * q - 2.0 * p)
            if s <= z[k]:
                k -= 1
            else:
                break
        k += 1
        v[k] = q
        z[k] = s
        z[k + 1] = INF
    if k < 0:
        for q in range(n):
            d[q] = INF
            arg[q] = -1
        return
    j = 0
    for q in range(n):
        while z[j + 1] < q:
            j += 1
        p = v[j]
        d[q] = (q - p) * (q - p) + f[p]
        arg[q] = p


@njit(cache=True)
def _transform_2d(cost, out, iy, ix):
    h, w = cost.shape
    n = max(h, w)
    f = np.empty(n)
    d = np.empty(n)
    arg = np.empty(n, dtype=np.int64)
    v = np.empty(n, dtype=np.int64)
    z = np.empty(n + 1)
    colbest = np.empty((h, w))
    colarg = np.empty((h, w), dtype=np.int64)
    for x in range(w):
        for y in range(h):
            f[y] = cost[y, x]
        _envelope_1d(f[:h], d[:h], arg[:h], v, z)
        for y in range(h):
            colbest[y, x] = d[y]
            colarg[y, x] = arg[y]
    for y in range(h):
        for x in range(w):
            f[x] = colbest[y, x]
        _envelope_1d(f[:w], d[:w], arg[:w], v, z)
        for x in range(w):
            out[y, x] = d[x]
            a = arg[x]
            ix[y, x] = a
            iy[y, x] = colarg[y, a] if a >= 0 else -1


def sampled_transform(cost: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(D, iy, ix)``; ``(iy, ix)`` is the nearest site (-1 when there are none)."""
    cost = np.ascontiguousarray(cost, dtype=np.float64)
    out = np.empty(cost.shape)
    iy = np.empty(cost.shape, dtype=np.int64)
    ix = np.empty(cost.shape, dtype=np.int64)
    _transform_2d(cost, out, iy, ix)
    return out, iy, ix


def squared_edt(sites: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Squared distance from every pixel to the nearest ``True`` pixel of ``sites``."""
    cost = np.where(sites, 0.0, INF)
    return sampled_transform(cost)
