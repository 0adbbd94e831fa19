"""Command-line entry point.

Subcommands:
    run <config>                 full experiment, reports to the output dir
    sweep <config>               delta-grid monotonicity audit over the corpus
    bdrate <anchor.csv> <test.csv>   BD-rate between two RD curve files
    oracle <config>              brute-force grid reference per (image, target)

Exit codes: 0 success, 1 fatal error (including sweep violations),
2 config validation failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import logging
import sys
from pathlib import Path

import numpy as np

from . import codec
from .bd import BdError, RdCurve, bd_rate
from .config import ConfigError, ExperimentConfig, load_config
from .curves import CodecCurve
from .harness import HarnessError, emit_report, run_experiment
from .imageio import ImageError, load_corpus
from .search import TargetSpec, oracle_best_beta

log = logging.getLogger("brmkit")

SWEEP_GRID = 32


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level.upper(), logging.INFO),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return 2
    except (HarnessError, BdError, ImageError, OSError) as exc:
        log.error("%s", exc)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="brmkit")
    parser.add_argument("--log-level", default="info",
                        help="debug, info, warning, or error")
    sub = parser.add_subparsers(required=True)

    run_p = sub.add_parser("run", help="run the full experiment")
    run_p.add_argument("config", type=Path)
    _add_common(run_p)
    run_p.set_defaults(func=cmd_run)

    sweep_p = sub.add_parser("sweep", help="delta-grid rate/distortion audit")
    sweep_p.add_argument("config", type=Path)
    _add_common(sweep_p)
    sweep_p.set_defaults(func=cmd_sweep)

    bd_p = sub.add_parser("bdrate", help="BD-rate between two RD curve CSVs")
    bd_p.add_argument("anchor", type=Path)
    bd_p.add_argument("test", type=Path)
    bd_p.set_defaults(func=cmd_bdrate)

    oracle_p = sub.add_parser("oracle", help="grid-search reference results")
    oracle_p.add_argument("config", type=Path)
    oracle_p.add_argument("--grid-size", type=int, default=512)
    _add_common(oracle_p)
    oracle_p.set_defaults(func=cmd_oracle)
    return parser


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--workers", type=int, default=None,
                   help="parallel rows (default: from config)")
    p.add_argument("--output", type=Path, default=None,
                   help="output directory (default: from config)")


def _load(args) -> ExperimentConfig:
    config = load_config(args.config)
    overrides = {}
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.output is not None:
        overrides["output_dir"] = args.output
    if overrides:
        config = dataclasses.replace(config, **overrides)
    return config


def cmd_run(args) -> int:
    config = _load(args)
    report = run_experiment(config)
    written = emit_report(report, config.output_dir)
    for path in written:
        log.info("wrote %s", path)
    print(f"{len(report.rows)} rows -> {config.output_dir}")
    return 0


def _families(config: ExperimentConfig):
    images = load_corpus(config.corpus_dir)
    if not images:
        raise HarnessError(f"no PGM/PPM images in {config.corpus_dir}")
    for image in images:
        models = [
            codec.make_model(i, m.beta_train, m.delta_min, m.delta_max, m.gain_scale)
            for i, m in enumerate(config.models)
        ]
        yield image, models


def cmd_sweep(args) -> int:
    """Dump bpp and MSE over a geometric delta grid per (image, model) and
    fail on any rate or distortion monotonicity violation."""
    config = _load(args)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    violations = 0
    sweep_path = out / "sweep.csv"
    with open(sweep_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["image", "model_id", "delta_beta", "bpp", "mse"])
        for image, models in _families(config):
            for model in models:
                deltas = np.geomspace(model.delta_min, model.delta_max, SWEEP_GRID)
                latent = codec.encode_latent(image, model)
                prev_bpp, prev_mse = None, None
                for delta in deltas:
                    point, _ = codec.evaluate(image, model, float(delta), latent=latent)
                    writer.writerow([
                        image.name, model.model_id, f"{delta:.10g}",
                        f"{point.bpp:.10g}", f"{point.mse:.10g}",
                    ])
                    if prev_bpp is not None:
                        rate_ok = point.bpp > prev_bpp or (point.bpp == prev_bpp == 0)
                        if not rate_ok:
                            violations += 1
                            log.error("rate not strictly increasing: %s model %d "
                                      "delta %.6g (bpp %.6g -> %.6g)", image.name,
                                      model.model_id, delta, prev_bpp, point.bpp)
                        if point.mse > prev_mse:
                            violations += 1
                            log.error("distortion increased: %s model %d delta %.6g "
                                      "(mse %.6g -> %.6g)", image.name,
                                      model.model_id, delta, prev_mse, point.mse)
                    prev_bpp, prev_mse = point.bpp, point.mse
    log.info("wrote %s", sweep_path)
    if violations:
        print(f"sweep FAILED: {violations} monotonicity violations")
        return 1
    print("sweep OK: all grids monotone")
    return 0


def cmd_bdrate(args) -> int:
    anchor = RdCurve.load_csv(args.anchor)
    test = RdCurve.load_csv(args.test)
    result = bd_rate(anchor, test)
    print(f"BD-rate: {result.bd_rate_percent:+.4f}% "
          f"(quality overlap {result.overlap[0]:.3f}..{result.overlap[1]:.3f} dB)")
    return 0


def cmd_oracle(args) -> int:
    """Write the brute-force best beta per (image, target, model)."""
    config = _load(args)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    oracle_path = out / "oracle.csv"
    with open(oracle_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["image", "target_bpp", "model_id", "beta", "bpp",
                         "rel_error"])
        for image, models in _families(config):
            for target in config.targets:
                spec = TargetSpec(bpp_target=target, tolerance=config.tolerance)
                for model in models:
                    curve = CodecCurve(image, model, cache_latent=True)
                    beta, bpp = oracle_best_beta(curve, spec, grid_size=args.grid_size)
                    writer.writerow([
                        image.name, f"{target:.10g}", model.model_id,
                        f"{beta:.10g}", f"{bpp:.10g}", f"{spec.rel_error(bpp):.10g}",
                    ])
    log.info("wrote %s", oracle_path)
    print(f"oracle grid results -> {oracle_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
