"""Command-line entry point: ``crackforge {analyze,stage-split,elongate,translate,evaluate,make-seeds}``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 non-convergence under ``--strict``.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import zlib
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, load_config
from .evaluation import REPORT_NOTE, quality_report, stage_delta_report
from .mask_core import MaskError, load_mask, resize_nearest, saturation, save_mask
from .morphometry import (
    StageStats,
    UndefinedThickness,
    mean_thickness,
    partition_stages,
    score_from_stats,
    stats_from_values,
)
from .propagation import elongate_to_target, propagate
from .synthesis import TranslationRequest, translate_stage
from .synthetic import stage0_like_seed

log = logging.getLogger("crackforge")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NONCONVERGED = 0, 1, 2, 3
MASK_EXTS = (".png", ".pgm", ".pnm")
SPLITS = ("Train", "Val", "Test")
RESOLUTION_NOTE = ("thickness statistics scale with resolution; compare datasets at the same "
                   "working resolution (--resize)")


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- helpers -----------------------------------------------------------------

def dump_json(obj, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def dump_csv(rows: list[dict], path: str, columns: list[str]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: ("" if r.get(k) is None else r.get(k)) for k in columns})


def list_masks(path: str) -> list[str]:
    if not os.path.isdir(path):
        raise DataError(f"not a directory: {path}")
    return sorted(os.path.join(path, f) for f in os.listdir(path)
                  if f.lower().endswith(MASK_EXTS) and os.path.isfile(os.path.join(path, f)))


def read_mask(path: str, cfg: RunConfig) -> np.ndarray:
    mask = load_mask(path, cfg.io_threshold)
    if cfg.io_resize:
        mask = resize_nearest(mask, cfg.io_resize, cfg.io_resize)
    return mask


def file_seed(seed: int, name: str) -> int:
    """Per-file seed that depends only on the run seed and the file name."""
    ss = np.random.SeedSequence([int(seed) & (2**64 - 1), zlib.crc32(name.encode("utf-8"))])
    return int(ss.generate_state(1, np.uint64)[0])


def write_manifest(out_dir: str, command: str, cfg: RunConfig, inputs: list[str], **extra) -> None:
    manifest = {"command": command, "version": __version__, "seed": cfg.prop_seed,
                "config": cfg.as_dict(), "inputs": inputs, **extra}
    dump_json(manifest, os.path.join(out_dir, "manifest.json"))


def resolve_config(args) -> RunConfig:
    overrides = dict(kv.split("=", 1) for kv in (args.set or []))
    cfg = load_config(args.config, overrides, args.seed)
    for flag, key in (("threshold", "io.threshold"), ("resize", "io.resize"), ("jobs", "run.jobs")):
        value = getattr(args, flag, None)
        if value is not None:
            cfg.set(key, value)
    return cfg


# -- analyze / stage-split -----------------------------------------------------

def analyze_dir(input_dir: str, cfg: RunConfig) -> tuple[list[dict], list[dict], list[dict]]:
    """Measure every mask; returns (per-mask records, per-stage FULL stats, errors)."""
    records, errors = [], []
    for path in list_masks(input_dir):
        name = os.path.basename(path)
        try:
            m = read_mask(path, cfg)
            records.append({"file": name, "height": m.shape[0], "width": m.shape[1],
                            "saturation": saturation(m), "mean_thickness": mean_thickness(m)})
        except (OSError, MaskError, UndefinedThickness) as exc:
            errors.append({"file": name, "error": str(exc)})
    stages: list[dict] = []
    if records:
        norm = (max(r["saturation"] for r in records), max(r["mean_thickness"] for r in records))
        for r in records:
            r["severity"] = score_from_stats(r["saturation"], r["mean_thickness"], norm,
                                             (cfg.severity_w_s, cfg.severity_w_t))
        if len(records) >= 3:
            labels = partition_stages([r["severity"] for r in records])
            for r, lab in zip(records, labels):
                r["stage"] = lab
            for k in (0, 1, 2):
                rows = [r for r in records if r["stage"] == k]
                if rows:
                    stages.append(stats_from_values([r["saturation"] for r in rows],
                                                    [r["mean_thickness"] for r in rows], k).to_record())
    return records, stages, errors


RECORD_COLUMNS = ["file", "saturation", "mean_thickness", "severity", "stage", "split"]
STAGE_COLUMNS = ["stage", "split", "n", "sat_mean", "sat_std", "thick_mean", "thick_std"]


def cmd_analyze(args) -> int:
    cfg = resolve_config(args)
    os.makedirs(args.out, exist_ok=True)
    records, stages, errors = analyze_dir(args.input, cfg)
    warnings = []
    if not records and not errors:
        warnings.append("no mask files found")
    elif len(records) < 3:
        warnings.append("fewer than 3 valid masks: stage partition skipped")
    for w in warnings:
        log.warning(w)
    for e in errors:
        log.error("%s: %s", e["file"], e["error"])
    dump_json({"records": records, "stages": stages, "errors": errors, "warnings": warnings,
               "notes": [RESOLUTION_NOTE]}, os.path.join(args.out, "analysis.json"))
    dump_csv(records, os.path.join(args.out, "per_mask.csv"), RECORD_COLUMNS[:-1])
    dump_csv(stages, os.path.join(args.out, "stage_stats.csv"), STAGE_COLUMNS)
    write_manifest(args.out, "analyze", cfg, [args.input])
    return EXIT_DATA if errors and not records else EXIT_OK


def split_counts(n: int, ratios: tuple[float, float, float]) -> tuple[int, int, int]:
    n_val = round(ratios[1] * n)
    n_test = round(ratios[2] * n)
    return n - n_val - n_test, n_val, n_test


def cmd_stage_split(args) -> int:
    cfg = resolve_config(args)
    try:
        ratios = tuple(float(v) for v in args.ratios.split(","))
        if len(ratios) != 3 or any(r < 0 for r in ratios) or abs(sum(ratios) - 1) > 1e-6:
            raise ValueError
    except ValueError:
        raise ConfigError(f"--ratios must be three nonnegative numbers summing to 1, got {args.ratios!r}")
    os.makedirs(args.out, exist_ok=True)
    records, full_stages, errors = analyze_dir(args.input, cfg)
    if len(records) < 3:
        raise DataError("stage-split needs at least 3 valid masks")
    rng = np.random.default_rng(cfg.prop_seed)
    table = []
    for k in (0, 1, 2):
        rows = [r for r in records if r["stage"] == k]
        order = rng.permutation(len(rows))
        counts = split_counts(len(rows), ratios)
        start = 0
        for split, c in zip(SPLITS, counts):
            for i in order[start:start + c]:
                rows[i]["split"] = split
            start += c
        table.append(next(s for s in full_stages if s["stage"] == k) if rows else None)
        for split in SPLITS:
            part = [r for r in rows if r["split"] == split]
            if part:
                table.append(stats_from_values([r["saturation"] for r in part],
                                               [r["mean_thickness"] for r in part], k, split).to_record())
    table = [t for t in table if t]
    dump_json({"records": records, "stages": table, "errors": errors, "notes": [RESOLUTION_NOTE]},
              os.path.join(args.out, "stage_split.json"))
    dump_csv(records, os.path.join(args.out, "per_mask.csv"), RECORD_COLUMNS)
    dump_csv(table, os.path.join(args.out, "stage_table.csv"), STAGE_COLUMNS)
    write_manifest(args.out, "stage-split", cfg, [args.input], ratios=list(ratios))
    return EXIT_OK


# -- elongate --------------------------------------------------------------------

def cmd_elongate(args) -> int:
    cfg = resolve_config(args)
    if args.target_m is not None:
        cfg.set("prop.target_m", args.target_m)
    mask = read_mask(args.input, cfg)
    prop, lee = cfg.prop(), cfg.lee()
    if args.repeat:
        out, report = elongate_to_target(mask, cfg.prop_target_m, prop, lee)
        traces, extra = report.traces, {"passes": report.passes, "stalled": report.stalled}
    else:
        out, traces = propagate(mask, prop, lee)
        extra = {"passes": 1}
    out_dir = os.path.dirname(os.path.abspath(args.out))
    os.makedirs(out_dir, exist_ok=True)
    save_mask(out, args.out)
    sidecar = {"input": os.path.basename(args.input), "saturation": saturation(out),
               "traces": [t.to_dict() for t in traces], **extra}
    dump_json(sidecar, os.path.splitext(args.out)[0] + ".trace.json")
    write_manifest(out_dir, "elongate", cfg, [args.input])
    return EXIT_OK


# -- translate -----------------------------------------------------------------

def load_stage_targets(path: str) -> dict[int, StageStats]:
    """Stage targets from an analyze / stage-split report (Train rows preferred)."""
    if not os.path.isfile(path):
        raise DataError(f"stats file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    chosen: dict[int, dict] = {}
    for rec in doc.get("stages", []):
        k = int(rec["stage"])
        if k not in chosen or rec.get("split") == "Train":
            chosen[k] = rec
    return {k: StageStats(stage_id=k, n=int(r["n"]), sat_mean=float(r["sat_mean"]),
                          sat_std=float(r["sat_std"]), thick_mean=float(r["thick_mean"]),
                          thick_std=float(r["thick_std"]), split=r.get("split", "FULL"))
            for k, r in chosen.items()}


def _translate_one(job: tuple) -> dict:
    path, out_dir, cfg_text, target, seed = job
    cfg = RunConfig.from_text(cfg_text)
    name = os.path.basename(path)
    stem = os.path.splitext(name)[0]
    try:
        mask = read_mask(path, cfg)
        req = TranslationRequest(
            source=mask, target=target, prop=cfg.prop(seed), lee=cfg.lee(),
            tol_rel=cfg.synth_tol_rel, max_iters=cfg.synth_max_iters,
            branching=cfg.synth_branching, weights=cfg.weights(),
        )
        res = translate_stage(req)
    except (OSError, MaskError, UndefinedThickness, ValueError) as exc:
        return {"file": name, "error": str(exc)}
    save_mask(res.mask, os.path.join(out_dir, stem + ".png"))
    sidecar = res.sidecar()
    dump_json(sidecar, os.path.join(out_dir, stem + ".json"))
    return {"file": name, **sidecar}


def cmd_translate(args) -> int:
    cfg = resolve_config(args)
    if args.to_stage is not None:
        targets = load_stage_targets(args.stats) if args.stats else {k: cfg.stage_target(k) for k in (0, 1, 2)}
        if args.to_stage not in targets:
            raise DataError(f"no statistics for stage {args.to_stage}")
        target = targets[args.to_stage]
    else:
        target = StageStats(stage_id=-1, n=1, sat_mean=args.target_s, sat_std=0.0,
                            thick_mean=args.target_t, thick_std=0.0, split="explicit")
    inputs = list_masks(args.input) if os.path.isdir(args.input) else [args.input]
    if not inputs:
        log.warning("no mask files found in %s", args.input)
    os.makedirs(args.out, exist_ok=True)
    cfg_text = cfg.to_text()
    jobs = [(p, args.out, cfg_text, target, file_seed(cfg.prop_seed, os.path.basename(p))) for p in inputs]
    if cfg.run_jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.run_jobs) as pool:
            results = list(pool.map(_translate_one, jobs))
    else:
        results = [_translate_one(j) for j in jobs]
    write_manifest(args.out, "translate", cfg, inputs,
                   target={"sat_mean": target.sat_mean, "thick_mean": target.thick_mean,
                           "stage": target.stage_id},
                   results=results)
    failed = [r for r in results if "error" in r]
    for r in failed:
        log.error("%s: %s", r["file"], r["error"])
    if failed:
        return EXIT_DATA
    if args.strict and not all(r["converged"] for r in results):
        return EXIT_NONCONVERGED
    return EXIT_OK


# -- evaluate --------------------------------------------------------------------

def _stage_dirs(root: str) -> dict[int, str]:
    out = {}
    for d in sorted(os.listdir(root)):
        if d.startswith("stage_") and d[6:].isdigit() and os.path.isdir(os.path.join(root, d)):
            out[int(d[6:])] = os.path.join(root, d)
    return out


def _read_pairs(manifest: str, real_dir: str, gen_dir: str) -> list[tuple[str, str]]:
    if not os.path.isfile(manifest):
        raise DataError(f"pairing manifest not found: {manifest}")
    with open(manifest, encoding="utf-8") as fh:
        if manifest.lower().endswith(".json"):
            rows = json.load(fh)
            rows = rows.get("pairs", rows) if isinstance(rows, dict) else rows
        else:
            rows = list(csv.DictReader(fh))
    pairs = []
    for r in rows:
        real = os.path.join(real_dir, r["real"])
        gen = os.path.join(gen_dir, r["generated"])
        for p in (real, gen):
            if not os.path.isfile(p):
                raise DataError(f"manifest references missing file: {p}")
        pairs.append((real, gen))
    return pairs


def cmd_evaluate(args) -> int:
    cfg = resolve_config(args)
    for d in (args.real, args.generated):
        if not os.path.isdir(d):
            raise DataError(f"not a directory: {d}")
    real_stages, gen_stages = _stage_dirs(args.real), _stage_dirs(args.generated)
    if real_stages:
        groups = [(k, real_stages[k], gen_stages[k]) for k in sorted(real_stages) if k in gen_stages]
    else:
        groups = [(args.stage, args.real, args.generated)]
    deltas = []
    for k, rdir, gdir in groups:
        real = [read_mask(p, cfg) for p in list_masks(rdir)]
        gen = [read_mask(p, cfg) for p in list_masks(gdir)]
        if not real or not gen:
            raise DataError(f"stage {k}: empty real or generated directory")
        try:
            deltas.extend(stage_delta_report(real, gen, k).to_records())
        except UndefinedThickness as exc:
            raise DataError(f"stage {k}: {exc}") from None
    os.makedirs(args.out, exist_ok=True)
    report = {"stage_deltas": deltas, "notes": [REPORT_NOTE]}
    dump_csv(deltas, os.path.join(args.out, "stage_deltas.csv"),
             ["stage", "case", "n", "sat_mean", "sat_std", "delta_s", "thick_mean", "thick_std", "delta_t"])
    if args.manifest:
        pairs = _read_pairs(args.manifest, args.real, args.generated)
        paired = []
        for rp, gp in pairs:
            q = quality_report(read_mask(rp, cfg), read_mask(gp, cfg))
            paired.append({"real": os.path.relpath(rp, args.real),
                           "generated": os.path.relpath(gp, args.generated), **q.to_record()})
        summary = {k: float(np.mean([p[k] for p in paired])) for k in ("l1", "ssim", "psnr_db")} if paired else {}
        report["paired"] = paired
        report["quality_mean"] = summary
        dump_csv(paired, os.path.join(args.out, "quality.csv"), ["real", "generated", "l1", "ssim", "psnr_db"])
    dump_json(report, os.path.join(args.out, "evaluation.json"))
    write_manifest(args.out, "evaluate", cfg, [args.real, args.generated])
    return EXIT_OK


# -- make-seeds ----------------------------------------------------------------

def cmd_make_seeds(args) -> int:
    cfg = resolve_config(args)
    os.makedirs(args.out, exist_ok=True)
    for i in range(args.count):
        rng = np.random.default_rng([cfg.prop_seed, i])
        save_mask(stage0_like_seed(rng, (args.size, args.size)), os.path.join(args.out, f"seed_{i:03d}.png"))
    write_manifest(args.out, "make-seeds", cfg, [], count=args.count, size=args.size)
    return EXIT_OK


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key=value config file")
    common.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one config key")
    common.add_argument("--seed", type=int, help="run seed (fallback: $CRACKFORGE_SEED, then config)")
    common.add_argument("--threshold", type=int, help="binarisation threshold, foreground is > value")
    common.add_argument("--resize", type=int, help="nearest-neighbour resize to N x N before use")
    common.add_argument("--jobs", type=int, help="worker processes for batch commands")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="crackforge", description="Crack-mask growth synthesis and morphology statistics.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", parents=[common], help="per-mask statistics and stage partition")
    a.add_argument("input")
    a.add_argument("--out", required=True)
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("stage-split", parents=[common], help="stage partition plus train/val/test table")
    s.add_argument("input")
    s.add_argument("--out", required=True)
    s.add_argument("--ratios", default="0.7,0.15,0.15")
    s.set_defaults(func=cmd_stage_split)

    e = sub.add_parser("elongate", parents=[common], help="directional random-walk elongation")
    e.add_argument("input")
    e.add_argument("--out", required=True, help="output mask path (.png or .pgm)")
    e.add_argument("--target-m", type=float, help="target skeleton density m")
    e.add_argument("--repeat", action="store_true", help="repeat passes until m is reached or growth stalls")
    e.set_defaults(func=cmd_elongate)

    t = sub.add_parser("translate", parents=[common], help="translate masks to a target stage")
    t.add_argument("input", help="mask file or directory")
    t.add_argument("--out", required=True)
    g = t.add_mutually_exclusive_group(required=True)
    g.add_argument("--to-stage", type=int)
    g.add_argument("--target-s", type=float)
    t.add_argument("--target-t", type=float)
    t.add_argument("--stats", help="analyze/stage-split JSON providing stage targets")
    t.add_argument("--strict", action="store_true", help="exit 3 if any mask fails to converge")
    t.set_defaults(func=cmd_translate)

    v = sub.add_parser("evaluate", parents=[common], help="real vs generated statistics and metrics")
    v.add_argument("real")
    v.add_argument("generated")
    v.add_argument("--out", required=True)
    v.add_argument("--manifest", help="JSON or CSV with real,generated file pairs")
    v.add_argument("--stage", type=int, default=0, help="stage id when directories are not split by stage")
    v.set_defaults(func=cmd_evaluate)

    m = sub.add_parser("make-seeds", parents=[common], help="write synthetic hairline seed masks")
    m.add_argument("out")
    m.add_argument("--count", type=int, default=20)
    m.add_argument("--size", type=int, default=256)
    m.set_defaults(func=cmd_make_seeds)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "translate" and args.target_s is not None and args.target_t is None:
        parser.error("--target-s requires --target-t")
    if args.command == "translate" and args.to_stage is not None and args.target_t is not None:
        parser.error("--target-t cannot be combined with --to-stage")
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        if isinstance(exc, (MaskError, UndefinedThickness)):
            log.error("%s", exc)
            return EXIT_DATA
        log.error("%s", exc)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
