"""The two bit-rate-matching pipelines.

Baseline (prior art): candidate models are those whose bpp range covers the
target; every candidate runs a geometric binary search, then one decode to
score its loss, and the minimum-loss candidate wins.

Proposed: every model is probed once at its training beta to get its
default bpp, the model with the minimum relative bit distance
D_r = |bpp_default - bpp_target| / bpp_default is selected directly, and a
log-log linear search runs on that model alone with no decoder involvement.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .codec import CostCounters
from .curves import RateCurve
from .search import (
    INFEASIBLE,
    SearchTrace,
    TargetSpec,
    search_binary,
    search_loglinear,
)

log = logging.getLogger(__name__)

BASELINE = "baseline"
PROPOSED = "proposed"

LossFn = Callable[[RateCurve, float], tuple[float, CostCounters]]


class EngineError(ValueError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    max_iters_binary: int = 32
    max_iters_loglinear: int = 10
    refit_bracketing: bool = False


@dataclass
class BrmResult:
    """Outcome of one BRM run: the chosen operating point plus full traces."""

    model_id: int
    beta_test: float
    delta_beta: float
    bpp_achieved: float
    matched: bool
    traces: list[SearchTrace]
    selection_method: str

    @property
    def total_cost(self) -> CostCounters:
        total = CostCounters()
        for t in self.traces:
            total.add(t.cost)
        return total


def relative_bit_distance(bpp_default: float, bpp_target: float) -> float:
    """D_r = |bpp_default - bpp_target| / bpp_default."""
    if bpp_default <= 0 or bpp_target <= 0:
        raise EngineError("bpp values must be > 0")
    return abs(bpp_default - bpp_target) / bpp_default


def select_model_relative(
    curves: Sequence[RateCurve],
    target: TargetSpec,
    traces: Sequence[SearchTrace] | None = None,
) -> tuple[int, list[float]]:
    """Pick the model with minimum relative bit distance to the target.

    Each curve is evaluated exactly once, at its training beta (the default
    bpp); no search and no decode happen here. Ties go to the model with
    the higher default bpp, which keeps the eventual displacement <= 1.
    """
    if not curves:
        raise EngineError("empty model family")
    defaults = []
    for i, curve in enumerate(curves):
        bpp, cost = curve.eval(curve.beta_train)
        defaults.append(bpp)
        if traces is not None:
            traces[i].record(curve.beta_train, bpp, cost)
    best = 0
    best_dr = math.inf
    for i, bpp_default in enumerate(defaults):
        if bpp_default <= 0:
            # a model that emits zero bits at delta=1 can never be closest
            continue
        dr = relative_bit_distance(bpp_default, target.bpp_target)
        if dr < best_dr or (dr == best_dr and bpp_default > defaults[best]):
            best, best_dr = i, dr
    return best, defaults


def _curve_loss(curve: RateCurve, beta: float) -> tuple[float, CostCounters]:
    return curve.distortion(beta)


def select_model_baseline(
    curves: Sequence[RateCurve],
    target: TargetSpec,
    search: Callable[..., SearchTrace] = search_binary,
    loss: LossFn = _curve_loss,
    traces: Sequence[SearchTrace] | None = None,
    max_iters: int = 32,
) -> tuple[int, list[SearchTrace]]:
    """Prior-art selection: search every candidate, decode each match, keep
    the minimum-loss one.

    Candidates are the models whose [bpp(beta_min), bpp(beta_max)] range
    covers the target; when none does, the single model whose range
    boundary is relatively nearest the target is searched alone. The loss
    decode is charged once per candidate whose search matched.
    """
    if not curves:
        raise EngineError("empty model family")
    if traces is None:
        traces = [SearchTrace(model_id=i) for i in range(len(curves))]
    ranges = []
    for i, curve in enumerate(curves):
        bpp_min, cost_min = curve.eval(curve.beta_min)
        traces[i].record(curve.beta_min, bpp_min, cost_min)
        bpp_max, cost_max = curve.eval(curve.beta_max)
        traces[i].record(curve.beta_max, bpp_max, cost_max)
        ranges.append((bpp_min, bpp_max))
    candidates = [
        i for i, (lo, hi) in enumerate(ranges) if lo <= target.bpp_target <= hi
    ]
    if not candidates:
        candidates = [min(range(len(curves)), key=lambda i: _boundary_distance(ranges[i], target))]
    best = None
    for i in candidates:
        trace = search(curves[i], target, max_iters=max_iters, trace=traces[i])
        if trace.outcome == "matched":
            mse, cost = loss(curves[i], trace.final_beta)
            trace.cost.add(cost)
            key = (0, mse)
        else:
            key = (1, target.rel_error(trace.final_bpp))
        if best is None or key < best[0]:
            best = (key, i)
    return best[1], list(traces)


def _boundary_distance(bpp_range: tuple[float, float], target: TargetSpec) -> float:
    lo, hi = bpp_range
    return min(target.rel_error(lo), target.rel_error(hi))


def validate_beta(
    curve: RateCurve,
    beta: float,
    target: TargetSpec,
    want_loss: bool,
    trace: SearchTrace | None = None,
    bpp: float | None = None,
) -> tuple[float, float | None]:
    """One validation step: compute bpp (reusing a known value if given),
    and only when want_loss is set and the bpp is inside tolerance, run the
    decoder for the loss. The optimized pipeline never sets want_loss, so
    it never pays a decoder run."""
    if bpp is None:
        bpp, cost = curve.eval(beta)
        if trace is not None:
            trace.record(beta, bpp, cost)
    loss = None
    if want_loss and target.matches(bpp):
        loss, cost = curve.distortion(beta)
        if trace is not None:
            trace.cost.add(cost)
    return bpp, loss


def run_brm(
    curves: Sequence[RateCurve],
    target: TargetSpec,
    method: str,
    config: SearchConfig = SearchConfig(),
) -> BrmResult:
    """Run one full BRM pipeline over a model family."""
    if not curves:
        raise EngineError("empty model family")
    if method == BASELINE:
        return _run_baseline(curves, target, config)
    if method == PROPOSED:
        return _run_proposed(curves, target, config)
    raise EngineError(f"unknown method {method!r}")


def _run_baseline(curves, target, config) -> BrmResult:
    traces = [SearchTrace(model_id=i) for i in range(len(curves))]
    chosen, traces = select_model_baseline(
        curves, target, traces=traces, max_iters=config.max_iters_binary
    )
    trace = traces[chosen]
    return _result(chosen, curves[chosen], trace, target, traces, BASELINE)


def _run_proposed(curves, target, config) -> BrmResult:
    traces = [SearchTrace(model_id=i) for i in range(len(curves))]
    chosen, defaults = select_model_relative(curves, target, traces=traces)
    trace = search_loglinear(
        curves[chosen],
        target,
        max_iters=config.max_iters_loglinear,
        trace=traces[chosen],
        refit_bracketing=config.refit_bracketing,
    )
    # final validation, loss-free by construction; bpp reused from the search
    validate_beta(curves[chosen], trace.final_beta, target, want_loss=False,
                  trace=trace, bpp=trace.final_bpp)
    return _result(chosen, curves[chosen], trace, target, traces, PROPOSED)


def _result(chosen, curve, trace, target, traces, method) -> BrmResult:
    beta = trace.final_beta
    bpp = trace.final_bpp
    if trace.outcome == INFEASIBLE:
        log.info("target %.4g infeasible on model %s; best-effort beta %.4g",
                 target.bpp_target, trace.model_id, beta)
    return BrmResult(
        model_id=trace.model_id if trace.model_id is not None else chosen,
        beta_test=beta,
        delta_beta=beta / curve.beta_train,
        bpp_achieved=bpp,
        matched=target.matches(bpp),
        traces=list(traces),
        selection_method=method,
    )
