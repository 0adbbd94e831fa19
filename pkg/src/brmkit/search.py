"""Beta searches on monotone rate curves.

Two strategies: geometric binary search (the prior-art rule
beta = sqrt(beta_lo * beta_hi)) and a log-log linear fit that exploits
log(bpp) being approximately linear in log(beta), refit after each probe.
Both share the same bracket and feasibility logic and record every probe
plus its cost in a SearchTrace.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .codec import CostCounters
from .curves import RateCurve

log = logging.getLogger(__name__)

# empirical bpp can be exactly 0 at coarse quantization; floor it for logs
_LOG_BPP_FLOOR = 1e-12
_REPEAT_REL_TOL = 1e-6
_FLAT_SLOPE = 1e-9

MATCHED = "matched"
EXHAUSTED = "exhausted"
INFEASIBLE = "infeasible"


class SearchError(ValueError):
    pass


@dataclass(frozen=True)
class TargetSpec:
    """A target rate and the relative tolerance that defines a match."""

    bpp_target: float
    tolerance: float = 0.10

    def __post_init__(self):
        if self.bpp_target <= 0:
            raise SearchError("bpp_target must be > 0")
        if not (0 < self.tolerance < 1):
            raise SearchError("tolerance must be in (0, 1)")

    def rel_error(self, bpp: float) -> float:
        return abs(bpp - self.bpp_target) / self.bpp_target

    def matches(self, bpp: float) -> bool:
        return self.rel_error(bpp) <= self.tolerance


@dataclass
class SearchTrace:
    """Ordered record of every beta probed and the work it cost."""

    model_id: int | None = None
    probes: list[tuple[float, float]] = field(default_factory=list)
    cost: CostCounters = field(default_factory=CostCounters)
    outcome: str = ""
    final_beta: float = math.nan
    final_bpp: float = math.nan

    @property
    def encoder_runs(self) -> int:
        return self.cost.encoder_runs

    @property
    def entropy_evals(self) -> int:
        return self.cost.entropy_evals

    @property
    def decoder_runs(self) -> int:
        return self.cost.decoder_runs

    def record(self, beta: float, bpp: float, cost: CostCounters) -> None:
        self.probes.append((beta, bpp))
        self.cost.add(cost)

    def best_probe(self, target: TargetSpec) -> tuple[float, float]:
        if not self.probes:
            raise SearchError("no probes recorded")
        return min(self.probes, key=lambda p: target.rel_error(p[1]))

    def finish(self, outcome: str, target: TargetSpec) -> "SearchTrace":
        self.outcome = outcome
        self.final_beta, self.final_bpp = self.best_probe(target)
        return self


def _probe(curve: RateCurve, beta: float, trace: SearchTrace) -> float:
    """Evaluate the curve at beta and log the probe. Every call is charged:
    any latent reuse lives inside the curve, not here."""
    bpp, cost = curve.eval(beta)
    trace.record(beta, bpp, cost)
    log.debug("probe model=%s beta=%.6g bpp=%.6g cost=%s", trace.model_id, beta, bpp, trace.cost)
    return bpp


def _bracket_or_bail(
    curve: RateCurve, target: TargetSpec, trace: SearchTrace
) -> tuple[float, float, float, float] | None:
    """Probe both endpoints; return the initial bracket, or None when the
    search already ended (endpoint match or infeasible target)."""
    bpp_lo = _probe(curve, curve.beta_min, trace)
    if target.matches(bpp_lo):
        trace.finish(MATCHED, target)
        return None
    bpp_hi = _probe(curve, curve.beta_max, trace)
    if target.matches(bpp_hi):
        trace.finish(MATCHED, target)
        return None
    if not (bpp_lo <= target.bpp_target <= bpp_hi):
        trace.finish(INFEASIBLE, target)
        return None
    return curve.beta_min, bpp_lo, curve.beta_max, bpp_hi


def search_binary(
    curve: RateCurve,
    target: TargetSpec,
    max_iters: int = 32,
    trace: SearchTrace | None = None,
) -> SearchTrace:
    """Geometric binary search: beta <- sqrt(beta_lo * beta_hi).

    The bracket keeps beta_lo at the probe with the closest bpp below the
    target and beta_hi at the closest above. Stops on a match, on bracket
    exclusion (infeasible), or after max_iters midpoints (exhausted, best
    probe reported).
    """
    if max_iters < 1:
        raise SearchError("max_iters must be >= 1")
    trace = trace if trace is not None else SearchTrace()
    bracket = _bracket_or_bail(curve, target, trace)
    if bracket is None:
        return trace
    beta_lo, _, beta_hi, _ = bracket
    for _ in range(max_iters):
        beta = math.sqrt(beta_lo * beta_hi)
        bpp = _probe(curve, beta, trace)
        if target.matches(bpp):
            return trace.finish(MATCHED, target)
        if bpp < target.bpp_target:
            beta_lo = beta
        else:
            beta_hi = beta
    return trace.finish(EXHAUSTED, target)


def search_loglinear(
    curve: RateCurve,
    target: TargetSpec,
    max_iters: int = 10,
    trace: SearchTrace | None = None,
    refit_bracketing: bool = False,
) -> SearchTrace:
    """Search via the log(bpp) = A*log(beta) + B model.

    A and B come from the two endpoint probes; each proposal solves the
    line for the target bpp. On a miss the line is refit through the
    beta_min endpoint and the newest probe (with refit_bracketing, through
    the two probes bracketing the target instead). Degenerate fits (flat
    slope, repeated proposal) fall back to one geometric-binary step, so
    feasibility and worst-case behavior match search_binary.
    """
    if max_iters < 1:
        raise SearchError("max_iters must be >= 1")
    trace = trace if trace is not None else SearchTrace()
    bracket = _bracket_or_bail(curve, target, trace)
    if bracket is None:
        return trace
    beta_lo, bpp_lo, beta_hi, bpp_hi = bracket
    # a zero-rate endpoint cannot anchor a log-log fit; fit through the
    # current bracket instead until its low point carries positive rate
    anchored = bpp_lo > _LOG_BPP_FLOOR
    anchor = (curve.beta_min, bpp_lo)
    newest = (curve.beta_max, bpp_hi)
    log_target = math.log(target.bpp_target)
    for _ in range(max_iters):
        if refit_bracketing or not anchored:
            p1 = (beta_lo, bpp_lo)
            p2 = (beta_hi, bpp_hi)
        else:
            p1, p2 = anchor, newest
        beta = _propose(p1, p2, log_target)
        if beta is None or any(
            math.isclose(beta, b, rel_tol=_REPEAT_REL_TOL) for b, _ in trace.probes
        ):
            beta = math.sqrt(beta_lo * beta_hi)  # fallback binary step
        beta = min(max(beta, curve.beta_min), curve.beta_max)
        bpp = _probe(curve, beta, trace)
        if target.matches(bpp):
            return trace.finish(MATCHED, target)
        if bpp < target.bpp_target:
            if beta > beta_lo:
                beta_lo, bpp_lo = beta, bpp
        else:
            if beta < beta_hi:
                beta_hi, bpp_hi = beta, bpp
        newest = (beta, bpp)
    return trace.finish(EXHAUSTED, target)


def _propose(
    p1: tuple[float, float], p2: tuple[float, float], log_target: float
) -> float | None:
    """Solve the log-log line through p1, p2 for the target; None if flat
    or degenerate."""
    (b1, r1), (b2, r2) = p1, p2
    if r1 <= _LOG_BPP_FLOOR or r2 <= _LOG_BPP_FLOOR:
        return None
    if math.isclose(b1, b2, rel_tol=1e-12):
        return None
    a = (math.log(r2) - math.log(r1)) / (math.log(b2) - math.log(b1))
    if not math.isfinite(a) or a <= _FLAT_SLOPE:
        return None
    intercept = math.log(r1) - a * math.log(b1)
    beta = math.exp((log_target - intercept) / a)
    return beta if math.isfinite(beta) else None


def oracle_best_beta(
    curve: RateCurve, target: TargetSpec, grid_size: int = 512
) -> tuple[float, float]:
    """Brute-force reference: the point of a geometric beta grid whose bpp
    is relatively closest to the target. Independent of both searches."""
    if grid_size < 64:
        raise SearchError("grid_size must be >= 64")
    betas = np.geomspace(curve.beta_min, curve.beta_max, grid_size)
    best = None
    for beta in betas:
        bpp, _ = curve.eval(float(beta))
        err = target.rel_error(bpp)
        if best is None or err < best[0]:
            best = (err, float(beta), bpp)
    return best[1], best[2]
