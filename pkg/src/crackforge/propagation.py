"""Directional random-walk elongation from skeleton endpoints."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .mask_core import PixelCoord, as_mask, line_pixels
from .orientation import Endpoint, LeeParams, OrientationUndefined, estimate_orientation, filter_endpoints
from .skeleton import detect_endpoints, skeletonize


@dataclass(frozen=True)
class PropagationParams:
    delta: float = math.pi / 2
    step_length: float = 2.0
    s_min: int = 3
    s_max: int = 50
    target_density: float = 1.0
    seed: int = 0
    thinning: str = "zhang-suen"

    def __post_init__(self):
        if not 0 <= self.delta <= math.pi:
            raise ValueError(f"delta must lie in [0, pi], got {self.delta}")
        if self.step_length < 1:
            raise ValueError(f"step_length must be >= 1, got {self.step_length}")
        if not 1 <= self.s_min <= self.s_max:
            raise ValueError(f"need 1 <= s_min <= s_max, got [{self.s_min}, {self.s_max}]")
        if not 0 <= self.target_density <= 1:
            raise ValueError(f"target_density must lie in [0, 1], got {self.target_density}")


@dataclass
class WalkTrace:
    origin: Endpoint
    budget: int
    segments: list[tuple[PixelCoord, PixelCoord]] = field(default_factory=list)
    steps_taken: int = 0
    stop_reason: str = ""  # "budget", "density", "boundary" or "skipped"

    def to_dict(self) -> dict:
        theta = self.origin.theta
        return {
            "origin": list(self.origin.position),
            "theta": None if math.isnan(theta) else theta,
            "budget": self.budget,
            "steps_taken": self.steps_taken,
            "stop_reason": self.stop_reason,
            "segments": [[list(a), list(b)] for a, b in self.segments],
        }


@dataclass
class ElongationReport:
    passes: int = 0
    stalled: bool = False
    reached: bool = False
    traces: list[WalkTrace] = field(default_factory=list)


def walk_rng(seed: int, *stream: int) -> np.random.Generator:
    """Counter-based Philox stream keyed by ``seed`` and a stream path."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed) & (2**64 - 1), *stream])))


class _Canvas:
    """Skeleton image plus a running foreground count."""

    def __init__(self, mask: np.ndarray):
        self.img = mask.copy()
        self.count = int(np.count_nonzero(mask))
        self.size = mask.size

    @property
    def density(self) -> float:
        return self.count / self.size

    def line(self, a: PixelCoord, b: PixelCoord) -> None:
        for x, y in line_pixels(a, b):
            if not self.img[y, x]:
                self.img[y, x] = True
                self.count += 1


def _round(v: float) -> int:
    return math.floor(v + 0.5)


def _walk(canvas: _Canvas, origin: Endpoint, theta0: float, params: PropagationParams,
          rng: np.random.Generator) -> WalkTrace:
    h, w = canvas.img.shape
    s = int(rng.integers(params.s_min, params.s_max + 1))
    trace = WalkTrace(origin=origin, budget=s)
    x, y = float(origin.position.x), float(origin.position.y)
    ell = params.step_length
    while True:
        if s <= 0:
            trace.stop_reason = "budget"
            break
        if canvas.density >= params.target_density:
            trace.stop_reason = "density"
            break
        theta = theta0 + rng.uniform(-params.delta, params.delta)
        nx = x + ell * math.cos(theta)
        ny = y + ell * math.sin(theta)
        a = PixelCoord(_round(x), _round(y))
        b = PixelCoord(_round(nx), _round(ny))
        if not (0 <= nx < w and 0 <= ny < h and b.x < w and b.y < h):
            trace.stop_reason = "boundary"
            break
        canvas.line(a, b)
        trace.segments.append((a, b))
        x, y = nx, ny
        s -= 1
        trace.steps_taken += 1
    return trace


def _pass(canvas: _Canvas, params: PropagationParams, lee: LeeParams, pass_index: int,
          report: ElongationReport) -> None:
    # Endpoints come from the skeleton at pass start; each orientation is read
    # from the live image, which already holds earlier walks of this pass.
    endpoints = filter_endpoints(detect_endpoints(canvas.img), lee.d_min)
    for k, e in enumerate(endpoints):
        try:
            origin = estimate_orientation(canvas.img, e, lee)
        except OrientationUndefined:
            nan = float("nan")
            undefined = Endpoint(position=e, theta=nan, dominant_axis=(nan, nan))
            report.traces.append(WalkTrace(origin=undefined, budget=0, stop_reason="skipped"))
            continue
        rng = walk_rng(params.seed, pass_index, k)
        report.traces.append(_walk(canvas, origin, origin.theta, params, rng))


def propagate(mask, params: PropagationParams = PropagationParams(),
              lee: LeeParams = LeeParams(), *, thin: bool = True,
              pass_index: int = 0) -> tuple[np.ndarray, list[WalkTrace]]:
    """One pass of the directional random walk over every retained endpoint.

    Returns the grown skeleton and one trace per walked endpoint. ``thin=False``
    skips the initial thinning for inputs that are already skeletons.
    """
    mask = as_mask(mask)
    skel = skeletonize(mask, params.thinning) if thin else mask
    canvas = _Canvas(skel)
    report = ElongationReport()
    _pass(canvas, params, lee, pass_index, report)
    return canvas.img, report.traces


def elongate_to_target(mask, target_saturation: float,
                       params: PropagationParams = PropagationParams(),
                       lee: LeeParams = LeeParams(), *, thin: bool = True,
                       max_passes: int = 1000) -> tuple[np.ndarray, ElongationReport]:
    """Repeat walk passes, re-detecting endpoints, until the skeleton saturation
    reaches ``target_saturation`` or a pass adds nothing.

    The input is thinned once; later passes grow the walk output as is, so the
    foreground never shrinks.
    """
    mask = as_mask(mask)
    skel = skeletonize(mask, params.thinning) if thin else mask.copy()
    canvas = _Canvas(skel)
    report = ElongationReport()
    target = float(target_saturation)
    pass_params = replace(params, target_density=min(max(target, 0.0), 1.0))
    while canvas.density < target and report.passes < max_passes:
        before = canvas.count
        _pass(canvas, pass_params, lee, report.passes, report)
        report.passes += 1
        if canvas.count == before:
            break
    report.reached = canvas.density >= target
    report.stalled = not report.reached
    return canvas.img, report
