"""Rate-distortion curves and Bjøntegaard delta rate.

BD-rate: fit log10(bpp) as a cubic in quality for each curve (exact
interpolation at 4 points, least squares beyond), average the difference
over the overlapping quality interval, convert back from log10.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)

_INTEGRATION_SAMPLES = 1000


class BdError(ValueError):
    pass


@dataclass(frozen=True)
class RdCurve:
    """Sorted (bpp, quality_db) points; >= 4 needed for BD computation."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple((float(b), float(q)) for b, q in self.points)
        if any(b <= 0 for b, _ in pts):
            raise BdError("bpp values must be > 0")
        if any(not math.isfinite(q) for _, q in pts):
            raise BdError("quality values must be finite")
        bpps = [b for b, _ in pts]
        if sorted(bpps) != bpps or len(set(bpps)) != len(bpps):
            raise BdError("points must be sorted by strictly increasing bpp")
        for (b0, q0), (b1, q1) in zip(pts, pts[1:]):
            if q1 < q0:
                log.warning("quality drops from %.3f to %.3f dB as bpp rises "
                            "%.4g -> %.4g", q0, q1, b0, b1)
        object.__setattr__(self, "points", pts)

    @property
    def bpps(self) -> np.ndarray:
        return np.array([b for b, _ in self.points])

    @property
    def qualities(self) -> np.ndarray:
        return np.array([q for _, q in self.points])

    def save_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["bpp", "quality_db"])
            for bpp, quality in self.points:
                writer.writerow([f"{bpp:.10g}", f"{quality:.10g}"])

    @classmethod
    def load_csv(cls, path: str | Path) -> "RdCurve":
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != ["bpp", "quality_db"]:
                raise BdError(f"{path}: expected header 'bpp,quality_db'")
            points = [(float(row["bpp"]), float(row["quality_db"])) for row in reader]
        return cls(points=tuple(points))


@dataclass(frozen=True)
class BdResult:
    bd_rate_percent: float
    overlap: tuple[float, float]  # (quality_low, quality_high)


def bd_rate(anchor: RdCurve, test: RdCurve) -> BdResult:
    """BD-rate of test versus anchor in percent; negative means the test
    curve needs fewer bits at equal quality."""
    for name, curve in (("anchor", anchor), ("test", test)):
        if len(curve.points) < 4:
            raise BdError(f"{name} curve needs >= 4 points, has {len(curve.points)}")
    lo = max(anchor.qualities.min(), test.qualities.min())
    hi = min(anchor.qualities.max(), test.qualities.max())
    if hi <= lo:
        raise BdError(f"quality intervals do not overlap ({lo:.3f} >= {hi:.3f})")
    fit_anchor = np.polyfit(anchor.qualities, np.log10(anchor.bpps), 3)
    fit_test = np.polyfit(test.qualities, np.log10(test.bpps), 3)
    grid = np.linspace(lo, hi, _INTEGRATION_SAMPLES)
    diff = np.polyval(fit_test, grid) - np.polyval(fit_anchor, grid)
    avg_log_diff = float(np.trapezoid(diff, grid)) / (hi - lo)
    return BdResult(
        bd_rate_percent=(10.0**avg_log_diff - 1.0) * 100.0,
        overlap=(float(lo), float(hi)),
    )


def quality_psnr(mse: float) -> float:
    """PSNR in dB for 8-bit content; +inf sentinel at zero error."""
    if mse < 0:
        raise BdError("mse must be >= 0")
    if mse == 0:
        return math.inf
    return 10.0 * math.log10(255.0**2 / mse)


def bit_difference(achieved: float, target: float) -> float:
    """Relative rate miss in percent: 100 * |achieved - target| / target."""
    if target <= 0:
        raise BdError("target bpp must be > 0")
    return 100.0 * abs(achieved - target) / target
