"""Run configuration: flat ``key=value`` files with command-line overrides.

Keys are dotted (``prop.delta_deg``); the dataclass field is the key with its
first dot replaced by an underscore.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, fields

from .morphometry import StageStats
from .orientation import LeeParams
from .propagation import PropagationParams

SEED_ENV = "CRACKFORGE_SEED"


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    # endpoint orientation
    lee_window: int = 15
    lee_d_min: float = 4.0
    lee_sign_convention: str = "outward"
    skeleton_method: str = "zhang-suen"
    # directional walk (defaults from the reference experiments)
    prop_delta_deg: float = 90.0
    prop_step_length: float = 2.0
    prop_s_min: int = 3
    prop_s_max: int = 50
    prop_target_m: float = 1.0
    prop_seed: int = 0
    # stage translation controller
    synth_tol_rel: float = 0.10
    synth_max_iters: int = 24
    synth_branching: bool = False
    synth_w_th: float = 2.0
    synth_w_sat: float = 2.0
    synth_w_cont: float = 4.0
    # severity score weights
    severity_w_s: float = 0.5
    severity_w_t: float = 0.5
    # per-stage targets: DeepCrack train-split means at 256x256
    stage0_s: float = 0.0117
    stage0_t: float = 1.184
    stage1_s: float = 0.0281
    stage1_t: float = 1.701
    stage2_s: float = 0.0663
    stage2_t: float = 3.509
    # io / orchestration
    io_threshold: int = 127
    io_resize: int = 0
    run_jobs: int = 1

    @staticmethod
    def key_of(name: str) -> str:
        return name.replace("_", ".", 1)

    @classmethod
    def keys(cls) -> list[str]:
        return [cls.key_of(f.name) for f in fields(cls)]

    def set(self, key: str, raw) -> None:
        by_key = {self.key_of(f.name): f for f in fields(self)}
        if key not in by_key:
            raise ConfigError(f"unknown config key {key!r}")
        f = by_key[key]
        setattr(self, f.name, _coerce(f.type, raw, key))

    def as_dict(self) -> dict:
        return {self.key_of(f.name): getattr(self, f.name) for f in fields(self)}

    def to_text(self) -> str:
        return "".join(f"{k}={_fmt(v)}\n" for k, v in self.as_dict().items())

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        cfg = cls()
        for k, v in parse_pairs(text).items():
            cfg.set(k, v)
        return cfg

    def lee(self) -> LeeParams:
        return LeeParams(window=self.lee_window, d_min=self.lee_d_min,
                         sign_convention=self.lee_sign_convention)

    def prop(self, seed: int | None = None) -> PropagationParams:
        return PropagationParams(
            delta=math.radians(self.prop_delta_deg),
            step_length=self.prop_step_length,
            s_min=self.prop_s_min,
            s_max=self.prop_s_max,
            target_density=self.prop_target_m,
            seed=self.prop_seed if seed is None else seed,
            thinning=self.skeleton_method,
        )

    def weights(self) -> tuple[float, float, float]:
        return (self.synth_w_th, self.synth_w_sat, self.synth_w_cont)

    def stage_target(self, stage: int) -> StageStats:
        if stage not in (0, 1, 2):
            raise ConfigError(f"stage must be 0, 1 or 2, got {stage}")
        return StageStats(stage_id=stage, n=1, sat_mean=getattr(self, f"stage{stage}_s"),
                          sat_std=0.0, thick_mean=getattr(self, f"stage{stage}_t"),
                          thick_std=0.0, split="config")


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return repr(v) if isinstance(v, float) else str(v)


def _coerce(tp, raw, key):
    tp = tp if isinstance(tp, str) else tp.__name__
    if not isinstance(raw, str):
        raw = _fmt(raw)
    raw = raw.strip()
    try:
        if tp == "bool":
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if tp == "int":
            return int(raw)
        if tp == "float":
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(f"bad value {raw!r} for {key} (expected {tp})") from None


def parse_pairs(text: str) -> dict[str, str]:
    """Parse ``key=value`` lines; ``#`` starts a comment, blank lines are skipped."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def load_config(path: str | None, overrides: dict[str, str] | None = None,
                seed: int | None = None) -> RunConfig:
    """Resolve a config: defaults, then ``$CRACKFORGE_SEED``, then the file, then overrides."""
    cfg = RunConfig()
    env_seed = os.environ.get(SEED_ENV)
    if env_seed:
        cfg.set("prop.seed", env_seed)
    if path:
        with open(path, encoding="utf-8") as fh:
            for k, v in parse_pairs(fh.read()).items():
                cfg.set(k, v)
    for k, v in (overrides or {}).items():
        cfg.set(k, v)
    if seed is not None:
        cfg.prop_seed = int(seed)
    return cfg
