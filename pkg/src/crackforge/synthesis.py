"""Procedural stage translation: elongate a crack skeleton, then re-grow its
width with spatially varying disks until the morphology statistics match a
target stage."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .distance import sampled_transform, squared_edt
from .mask_core import as_mask, saturation
from .morphometry import (
    StageStats,
    UndefinedThickness,
    continuity_loss,
    half_thickness,
    mean_thickness,
    saturation_loss,
    thickness_loss,
)
from .orientation import LeeParams, OrientationUndefined, estimate_orientation
from .propagation import ElongationReport, PropagationParams, _Canvas, _walk, elongate_to_target, walk_rng
from .skeleton import neighbor_counts, skeletonize

ALPHA_BRACKET = (0.25, 8.0)
DEFAULT_WEIGHTS = (2.0, 2.0, 4.0)  # thickness, saturation, continuity

# stream tag for branch-seed RNGs, kept apart from walk pass indices
_BRANCH_STREAM = 0xB1


@dataclass
class Thickening:
    mask: np.ndarray
    alpha: float
    mean_thickness: float
    converged: bool
    iterations: int


@dataclass
class TranslationRequest:
    source: np.ndarray
    target: StageStats
    prop: PropagationParams = field(default_factory=PropagationParams)
    lee: LeeParams = field(default_factory=LeeParams)
    tol_rel: float = 0.10
    max_iters: int = 24
    branching: bool = False
    weights: tuple[float, float, float] = DEFAULT_WEIGHTS

    def __post_init__(self):
        if self.tol_rel <= 0:
            raise ValueError("tol_rel must be > 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be nonnegative")


@dataclass
class TranslationResult:
    mask: np.ndarray
    skeleton: np.ndarray
    achieved: tuple[float, float]
    iterations: int
    converged: bool
    morphology_score: float
    alpha: float = 1.0

    def sidecar(self) -> dict:
        return {
            "achieved_s": self.achieved[0],
            "achieved_t": self.achieved[1],
            "iterations": self.iterations,
            "converged": self.converged,
            "morphology_score": self.morphology_score,
        }


def morphology_score(mask, target: StageStats, weights=DEFAULT_WEIGHTS) -> float:
    w_th, w_sat, w_cont = weights
    return (w_th * thickness_loss(mask, target.thick_mean)
            + w_sat * saturation_loss(mask, target.sat_mean)
            + w_cont * continuity_loss(mask))


def base_radius_sq(skeleton: np.ndarray, base_thickness: np.ndarray) -> np.ndarray:
    """Squared source thickness (floored at 1) seen from each skeleton pixel.

    Each skeleton pixel takes the value at its nearest original-crack pixel,
    so walk-grown tips inherit the thickness of the endpoint they left from.
    """
    original = base_thickness > 0
    ys, xs = np.nonzero(skeleton)
    if not original.any():
        return np.ones(len(ys))
    _, iy, ix = squared_edt(original)
    b = base_thickness[iy[ys, xs], ix[ys, xs]]
    return np.maximum(np.round(b * b, 9), 1.0)


def dilate_disks(skeleton: np.ndarray, radius_sq: np.ndarray) -> np.ndarray:
    """Union of Euclidean disks ``|q - p|^2 <= r_p^2`` centred on skeleton pixels."""
    cost = np.full(skeleton.shape, np.inf)
    ys, xs = np.nonzero(skeleton)
    cost[ys, xs] = -np.floor(radius_sq)
    d, _, _ = sampled_transform(cost)
    return d <= 0


def thicken(skeleton, base_thickness: np.ndarray, target_mu_t: float,
            tol_rel: float = 0.10, max_iters: int = 24) -> Thickening:
    """Scale per-pixel disk radii ``alpha * max(base, 1)`` by bisection on alpha
    until the mean half-thickness is within ``tol_rel`` of ``target_mu_t``."""
    skel = as_mask(skeleton)
    if not skel.any():
        raise ValueError("cannot thicken an empty skeleton")
    if target_mu_t < 1:
        raise ValueError(f"target_mu_t must be >= 1, got {target_mu_t}")
    b2 = base_radius_sq(skel, np.asarray(base_thickness, dtype=float))
    cache: dict[float, tuple[np.ndarray, float]] = {}

    def response(alpha: float) -> tuple[np.ndarray, float]:
        if alpha not in cache:
            m = dilate_disks(skel, alpha * alpha * b2)
            try:
                t = mean_thickness(m)
            except UndefinedThickness:
                t = math.inf
            cache[alpha] = (m, t)
        return cache[alpha]

    def err(t: float) -> float:
        return abs(t - target_mu_t) / target_mu_t

    lo, hi = ALPHA_BRACKET
    best = min((lo, hi), key=lambda a: err(response(a)[1]))
    iters = 2
    if response(lo)[1] < target_mu_t < response(hi)[1]:
        while iters < max_iters:
            mid = 0.5 * (lo + hi)
            t = response(mid)[1]
            iters += 1
            if err(t) < err(response(best)[1]):
                best = mid
            if err(t) <= 0.25 * tol_rel or hi - lo < 1e-4:
                break
            if t < target_mu_t:
                lo = mid
            else:
                hi = mid
    mask, t = response(best)
    return Thickening(mask=mask, alpha=best, mean_thickness=t,
                      converged=err(t) <= tol_rel, iterations=iters)


def band_width(mu_t: float) -> float:
    """Width of a straight band whose mean half-thickness is ``mu_t``.

    A band of odd width 2k+1 has mean half-thickness (k+1)^2 / (2k+1); this
    inverts that relation for real k.
    """
    t = max(mu_t, 1.0)
    k = (t - 1.0) + math.sqrt(t * t - t)
    return 2.0 * k + 1.0


def seed_branches(skeleton: np.ndarray, count: int, budget: float,
                  prop: PropagationParams, lee: LeeParams, stream: int) -> np.ndarray:
    """Grow ``count`` extra walks from interior skeleton pixels, sideways to the local axis."""
    interior = skeleton & (neighbor_counts(skeleton) == 2)
    ys, xs = np.nonzero(interior)
    if count <= 0 or len(ys) == 0:
        return skeleton
    rng = walk_rng(prop.seed, _BRANCH_STREAM, stream)
    picks = rng.choice(len(ys), size=min(count, len(ys)), replace=False)
    canvas = _Canvas(skeleton)
    walk_params = replace(prop, target_density=min(max(budget, 0.0), 1.0))
    for k, i in enumerate(sorted(picks)):
        start = (int(xs[i]), int(ys[i]))
        try:
            origin = estimate_orientation(canvas.img, start, lee)
        except OrientationUndefined:
            continue
        vx, vy = origin.dominant_axis
        side = 1.0 if rng.random() < 0.5 else -1.0
        theta0 = math.atan2(side * vx, -side * vy)
        _walk(canvas, origin, theta0, walk_params, walk_rng(prop.seed, _BRANCH_STREAM, stream, k + 1))
    return canvas.img


def _rel(a: float, b: float) -> float:
    return abs(a - b) / b if b else abs(a)


def translate_stage(request: TranslationRequest) -> TranslationResult:
    """Move a source mask toward the target stage statistics.

    Each outer iteration elongates the source skeleton to a skeleton-saturation
    budget, optionally adds branches, thickens to the target mean thickness and
    rescales the budget by the saturation error.
    """
    src = as_mask(request.source)
    if not src.any():
        raise ValueError("source mask has no foreground")
    target = request.target
    mu_s, mu_t, tol = target.sat_mean, target.thick_mean, request.tol_rel
    base = half_thickness(src)
    s_src, t_src = saturation(src), mean_thickness(src)
    skel0 = skeletonize(src, request.prop.thinning)

    def finish(mask, skel, iterations, alpha):
        s, t = saturation(mask), mean_thickness(mask)
        return TranslationResult(
            mask=mask, skeleton=skel, achieved=(s, t), iterations=iterations,
            converged=_rel(s, mu_s) <= tol and _rel(t, mu_t) <= tol,
            morphology_score=morphology_score(mask, target, request.weights),
            alpha=alpha,
        )

    if _rel(s_src, mu_s) <= tol and _rel(t_src, mu_t) <= tol:
        return finish(src, skel0, 1, 1.0)

    s_skel0 = saturation(skel0)
    budget = mu_s / band_width(mu_t)
    n_branches = max(1, round(mu_t / t_src)) if request.branching else 0
    best = None
    for it in range(1, request.max_iters + 1):
        if budget > s_skel0:
            skel, report = elongate_to_target(skel0, budget, request.prop, request.lee, thin=False)
        else:
            skel, report = skel0, ElongationReport(reached=True)
        if n_branches:
            skel = seed_branches(skel, n_branches, budget, request.prop, request.lee, it)
        th = thicken(skel, base, mu_t, tol, request.max_iters)
        s = saturation(th.mask)
        err = max(_rel(s, mu_s), _rel(th.mean_thickness, mu_t))
        if best is None or err < best[0]:
            best = (err, th, skel, it)
        if err <= tol:
            break
        s_skel = saturation(skel)
        if s > mu_s and s_skel <= s_skel0:
            break  # already too dense without any elongation
        if s < mu_s and report.stalled:
            break  # cannot grow further
        budget = s_skel * (mu_s / s) if s > 0 else 2.0 * budget
    _, th, skel, _ = best
    return finish(th.mask, skel, it, th.alpha)
