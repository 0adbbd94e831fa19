"""Rate curves: anything that maps beta_test to bpp on a bounded interval.

Three flavors: the toy codec (real, image-dependent rates with latent
caching and cost accounting), exact/perturbed log-log linear synthetic
curves, and tabulated curves replayed from text files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import codec
from .codec import CodecModel, CostCounters, LatentTensor
from .imageio import Image


class CurveError(ValueError):
    pass


class BetaOutOfRange(CurveError):
    pass


class RateCurve:
    """Deterministic non-decreasing bpp(beta) on [beta_min, beta_max]."""

    beta_min: float
    beta_max: float
    beta_train: float

    def eval(self, beta: float) -> tuple[float, CostCounters]:
        raise NotImplementedError

    def distortion(self, beta: float) -> tuple[float, CostCounters]:
        """MSE of the reconstruction at beta; costs one decoder run.

        Only codec-backed curves support this.
        """
        raise NotImplementedError(f"{type(self).__name__} has no decoder")

    def _check_bounds(self, beta: float) -> None:
        # small relative slack so endpoint probes survive float round-trips
        lo = self.beta_min * (1 - 1e-12)
        hi = self.beta_max * (1 + 1e-12)
        if not (lo <= beta <= hi):
            raise BetaOutOfRange(
                f"beta {beta} outside [{self.beta_min}, {self.beta_max}]"
            )


class CodecCurve(RateCurve):
    """Adapter binding one (image, model) pair to the search API.

    With ``cache_latent`` the encoder is charged once and the latent reused
    on every later probe (the optimized validation path); without it every
    eval pays a full encoder run (the prior-art path).
    """

    def __init__(self, image: Image, model: CodecModel, cache_latent: bool = True):
        self.image = image
        self.model = model
        self.cache_latent = cache_latent
        self.beta_train = model.beta_train
        self.beta_min = model.beta_min
        self.beta_max = model.beta_max
        self._latent: LatentTensor | None = None

    def _get_latent(self, cost: CostCounters) -> LatentTensor:
        if self.cache_latent and self._latent is not None:
            return self._latent
        latent = codec.encode_latent(self.image, self.model)
        cost.encoder_runs += 1
        if self.cache_latent:
            self._latent = latent
        return latent

    def eval(self, beta: float) -> tuple[float, CostCounters]:
        self._check_bounds(beta)
        cost = CostCounters()
        latent = self._get_latent(cost)
        delta = beta / self.model.beta_train
        q = codec.quantize(latent, self.model.gain, delta)
        bpp = codec.estimate_rate(q, self.image.pixel_count)
        cost.entropy_evals += 1
        return bpp, cost

    def distortion(self, beta: float) -> tuple[float, CostCounters]:
        self._check_bounds(beta)
        cost = CostCounters()
        latent = self._get_latent(cost)
        delta = beta / self.model.beta_train
        q = codec.quantize(latent, self.model.gain, delta)
        rec = codec.decode(q, self.model.gain, delta, self.image.width, self.image.height)
        cost.decoder_runs += 1
        mse = float(
            np.mean(
                (self.image.samples.astype(np.float64) - rec.samples.astype(np.float64))
                ** 2
            )
        )
        return mse, cost


@dataclass
class SyntheticLogLinearCurve(RateCurve):
    """log(bpp) = A*log(beta) + B plus an optional bounded sine perturbation.

    The perturbation p(t) = eps*sin(omega*t) models 'approximately linear'
    deviation; construction enforces eps <= 0.05, omega <= 3 and a slope
    guard omega*eps < A so the curve stays strictly increasing.
    """

    A: float
    B: float
    beta_min: float
    beta_max: float
    eps: float = 0.0
    omega: float = 1.0

    def __post_init__(self):
        if self.A <= 0:
            raise CurveError("slope A must be > 0")
        if not (0 < self.beta_min < self.beta_max):
            raise CurveError("need 0 < beta_min < beta_max")
        if self.eps < 0 or self.eps > 0.05:
            raise CurveError("perturbation amplitude must be in [0, 0.05]")
        if self.omega <= 0 or self.omega > 3:
            raise CurveError("perturbation frequency must be in (0, 3]")
        if self.eps * self.omega >= self.A:
            raise CurveError("perturbation would break monotonicity (omega*eps >= A)")
        self.beta_train = math.sqrt(self.beta_min * self.beta_max)

    def eval(self, beta: float) -> tuple[float, CostCounters]:
        self._check_bounds(beta)
        t = math.log(beta)
        bpp = math.exp(self.A * t + self.B + self.eps * math.sin(self.omega * t))
        return bpp, CostCounters(entropy_evals=1)


class TabulatedCurve(RateCurve):
    """Monotone piecewise-linear interpolation in (log beta, log bpp)."""

    def __init__(self, betas, bpps, beta_train: float | None = None):
        betas = np.asarray(betas, dtype=np.float64)
        bpps = np.asarray(bpps, dtype=np.float64)
        if betas.ndim != 1 or betas.shape != bpps.shape or len(betas) < 2:
            raise CurveError("need matching 1-D beta/bpp arrays with >= 2 samples")
        if not np.all(np.diff(betas) > 0):
            raise CurveError("beta samples must be strictly increasing")
        if not np.all(np.diff(bpps) >= 0):
            raise CurveError("bpp samples must be non-decreasing")
        if np.any(betas <= 0) or np.any(bpps <= 0):
            raise CurveError("samples must be positive for log-log interpolation")
        self._log_betas = np.log(betas)
        self._log_bpps = np.log(bpps)
        self.beta_min = float(betas[0])
        self.beta_max = float(betas[-1])
        self.beta_train = float(beta_train) if beta_train is not None else float(
            math.sqrt(self.beta_min * self.beta_max)
        )

    def eval(self, beta: float) -> tuple[float, CostCounters]:
        self._check_bounds(beta)
        log_bpp = float(np.interp(math.log(beta), self._log_betas, self._log_bpps))
        return math.exp(log_bpp), CostCounters(entropy_evals=1)

    @classmethod
    def load(cls, path: str | Path, beta_train: float | None = None) -> "TabulatedCurve":
        """Read 'beta bpp' pairs, one per line; '#' starts a comment."""
        betas, bpps = [], []
        for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise CurveError(f"{path}:{lineno}: expected 'beta bpp', got {raw!r}")
            betas.append(float(parts[0]))
            bpps.append(float(parts[1]))
        return cls(betas, bpps, beta_train=beta_train)


def audit_monotonic(
    curve: RateCurve, grid_size: int = 64, zero_tie_bpp: float = 0.0
) -> list[str]:
    """Check bpp is non-decreasing, and strictly increasing above
    ``zero_tie_bpp``, on a geometric beta grid.

    Codec-backed rates are discrete, so a fine enough grid inevitably ties
    where almost everything quantizes to zero; zero_tie_bpp widens the
    tie-tolerant floor for such audits. Returns human-readable violations;
    empty means pass.
    """
    if grid_size < 2:
        raise CurveError("grid_size must be >= 2")
    betas = np.geomspace(curve.beta_min, curve.beta_max, grid_size)
    bpps = [curve.eval(b)[0] for b in betas]
    violations = []
    for i in range(1, grid_size):
        if bpps[i] < bpps[i - 1]:
            violations.append(
                f"bpp decreased: beta {betas[i - 1]:.6g}->{betas[i]:.6g}, "
                f"bpp {bpps[i - 1]:.6g}->{bpps[i]:.6g}"
            )
        elif bpps[i] == bpps[i - 1] and bpps[i] > zero_tie_bpp:
            violations.append(
                f"bpp tied at {bpps[i]:.6g} for beta {betas[i - 1]:.6g} and {betas[i]:.6g}"
            )
    return violations
