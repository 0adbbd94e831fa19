"""Experiment runner: corpus x targets x methods, with CSV/JSON reports.

Counters (encoder/entropy/decoder runs) are the cost currency; the decode
used to report PSNR for the RD curves is measurement plumbing and is not
charged to any trace.
"""

from __future__ import annotations

import csv
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import bd, codec
from .bd import RdCurve, bit_difference, quality_psnr
from .config import ExperimentConfig
from .curves import CodecCurve
from .engine import BASELINE, PROPOSED, SearchConfig, run_brm
from .imageio import Image, load_corpus
from .search import TargetSpec

log = logging.getLogger(__name__)


class HarnessError(RuntimeError):
    pass


@dataclass(frozen=True)
class ResultRow:
    image: str
    target_bpp: float
    method: str
    model_id: int
    beta_test: float
    delta_beta: float
    bpp_achieved: float
    bit_diff_percent: float
    matched: bool
    encoder_runs: int
    entropy_evals: int
    decoder_runs: int
    mse: float
    psnr_db: float
    error: str = ""


@dataclass
class RunReport:
    rows: list[ResultRow]
    aggregates: dict
    rd_curves: dict[str, RdCurve]
    bd_rate_percent: float | None
    wall_seconds: float


def _make_family(
    image: Image, config: ExperimentConfig, target: float, cache_latent: bool
) -> list[CodecCurve]:
    curves = []
    for i, spec in enumerate(config.models):
        model = codec.make_model(
            model_id=i,
            beta_train=spec.beta_train,
            delta_min=spec.delta_min,
            delta_max=config.delta_max_for_target(target, i),
            gain_scale=spec.gain_scale,
        )
        curves.append(CodecCurve(image, model, cache_latent=cache_latent))
    return curves


def run_row(image: Image, target: float, method: str, config: ExperimentConfig) -> ResultRow:
    """One BRM run plus its report-only quality measurement."""
    curves = _make_family(image, config, target, cache_latent=(method == PROPOSED))
    spec = TargetSpec(bpp_target=target, tolerance=config.tolerance)
    search_config = SearchConfig(
        max_iters_binary=config.max_iters_binary,
        max_iters_loglinear=config.max_iters_loglinear,
        refit_bracketing=config.refit_bracketing,
    )
    result = run_brm(curves, spec, method, search_config)
    cost = result.total_cost
    # measurement decode, outside the pipeline's cost accounting
    mse, _ = curves[result.model_id].distortion(result.beta_test)
    return ResultRow(
        image=image.name,
        target_bpp=target,
        method=method,
        model_id=result.model_id,
        beta_test=result.beta_test,
        delta_beta=result.delta_beta,
        bpp_achieved=result.bpp_achieved,
        bit_diff_percent=bit_difference(result.bpp_achieved, target),
        matched=result.matched,
        encoder_runs=cost.encoder_runs,
        entropy_evals=cost.entropy_evals,
        decoder_runs=cost.decoder_runs,
        mse=mse,
        psnr_db=quality_psnr(mse),
    )


def run_experiment(config: ExperimentConfig) -> RunReport:
    """Execute every (image, target, method) row and aggregate the report."""
    started = time.monotonic()
    images = load_corpus(config.corpus_dir)
    if not images:
        raise HarnessError(f"no PGM/PPM images in {config.corpus_dir}")
    jobs = [
        (image, target, method)
        for image in images
        for target in config.targets
        for method in config.methods
    ]

    def _safe_row(job):
        image, target, method = job
        try:
            return run_row(image, target, method, config)
        except Exception as exc:  # row-level failure: record and continue
            log.error("row (%s, %.4g, %s) failed: %s", image.name, target, method, exc)
            return ResultRow(
                image=image.name, target_bpp=target, method=method, model_id=-1,
                beta_test=float("nan"), delta_beta=float("nan"),
                bpp_achieved=float("nan"), bit_diff_percent=float("nan"),
                matched=False, encoder_runs=0, entropy_evals=0, decoder_runs=0,
                mse=float("nan"), psnr_db=float("nan"), error=str(exc),
            )

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(_safe_row, jobs))
    else:
        rows = [_safe_row(job) for job in jobs]

    aggregates = _aggregate(rows, config)
    rd_curves = _rd_curves(rows, config)
    bd_percent = None
    if BASELINE in rd_curves and PROPOSED in rd_curves:
        try:
            bd_percent = bd.bd_rate(rd_curves[BASELINE], rd_curves[PROPOSED]).bd_rate_percent
        except bd.BdError as exc:
            log.warning("strategy BD-rate unavailable: %s", exc)
    return RunReport(
        rows=rows,
        aggregates=aggregates,
        rd_curves=rd_curves,
        bd_rate_percent=bd_percent,
        wall_seconds=time.monotonic() - started,
    )


def _aggregate(rows: list[ResultRow], config: ExperimentConfig) -> dict:
    out = {}
    for method in config.methods:
        mrows = [r for r in rows if r.method == method and not r.error]
        if not mrows:
            continue
        out[method] = {
            "rows": len(mrows),
            "mean_bit_diff_percent": sum(r.bit_diff_percent for r in mrows) / len(mrows),
            "matched_fraction": sum(r.matched for r in mrows) / len(mrows),
            "encoder_runs": sum(r.encoder_runs for r in mrows),
            "entropy_evals": sum(r.entropy_evals for r in mrows),
            "decoder_runs": sum(r.decoder_runs for r in mrows),
        }
    if BASELINE in out and PROPOSED in out and out[BASELINE]["entropy_evals"]:
        out["proposed_vs_baseline_entropy_ratio"] = (
            out[PROPOSED]["entropy_evals"] / out[BASELINE]["entropy_evals"]
        )
    return out


def _rd_curves(rows: list[ResultRow], config: ExperimentConfig) -> dict[str, RdCurve]:
    """Per method, one RD point per target: mean achieved bpp across images
    and PSNR of the mean MSE (stable even when a single image hits zero error)."""
    curves = {}
    for method in config.methods:
        points = []
        for target in sorted(config.targets):
            mrows = [
                r for r in rows
                if r.method == method and r.target_bpp == target and not r.error
            ]
            if not mrows:
                continue
            mean_bpp = sum(r.bpp_achieved for r in mrows) / len(mrows)
            mean_mse = sum(r.mse for r in mrows) / len(mrows)
            points.append((mean_bpp, quality_psnr(mean_mse)))
        if len(points) >= 2:
            try:
                curves[method] = RdCurve(points=tuple(points))
            except bd.BdError as exc:
                log.warning("RD curve for %s rejected: %s", method, exc)
    return curves


_CSV_COLUMNS = [
    "image", "target_bpp", "method", "model_id", "beta_test", "delta_beta",
    "bpp_achieved", "bit_diff_percent", "matched", "encoder_runs",
    "entropy_evals", "decoder_runs", "mse", "psnr_db", "error",
]


def emit_report(report: RunReport, output_dir: str | Path) -> list[Path]:
    """Write results.csv, summary.json, and curves/<method>.csv; returns the
    paths written. Output is byte-deterministic for a fixed report."""
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    written = []

    results_path = output_dir / "results.csv"
    with open(results_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CSV_COLUMNS)
        for r in report.rows:
            writer.writerow([
                r.image, f"{r.target_bpp:.10g}", r.method, r.model_id,
                f"{r.beta_test:.10g}", f"{r.delta_beta:.10g}",
                f"{r.bpp_achieved:.10g}", f"{r.bit_diff_percent:.10g}",
                int(r.matched), r.encoder_runs, r.entropy_evals, r.decoder_runs,
                f"{r.mse:.10g}", f"{r.psnr_db:.10g}", r.error,
            ])
    written.append(results_path)

    # wall clock goes to the log only: output files must be byte-identical
    # across reruns of the same config
    log.info("experiment wall time: %.3f s", report.wall_seconds)
    summary = {
        "aggregates": report.aggregates,
        "bd_rate_proposed_vs_baseline_percent": report.bd_rate_percent,
    }
    summary_path = output_dir / "summary.json"
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    written.append(summary_path)

    curves_dir = output_dir / "curves"
    curves_dir.mkdir(exist_ok=True)
    for method, curve in sorted(report.rd_curves.items()):
        path = curves_dir / f"{method}.csv"
        curve.save_csv(path)
        written.append(path)
    return written
