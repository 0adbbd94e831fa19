"""Deterministic toy variable-rate image codec.

8x8 block DCT, a per-frequency-band gain vector scaled by the displacement
delta_beta = beta_test / beta_train, half-away-from-zero rounding, and an
empirical per-band entropy estimate standing in for a real entropy coder.
Rate responds monotonically to delta_beta, so bit-rate-matching searches
run against genuinely image-dependent rate curves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft

from .imageio import Image

BLOCK = 8
BANDS = BLOCK * BLOCK

# Standard JPEG luminance quantization table (row-major).
JPEG_LUMA_QTABLE = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.float64,
)

# Zig-zag scan order: band index -> (row, col) within the 8x8 block.
_ZIGZAG = sorted(
    ((r, c) for r in range(BLOCK) for c in range(BLOCK)),
    key=lambda rc: (rc[0] + rc[1], rc[1] if (rc[0] + rc[1]) % 2 == 0 else rc[0]),
)


class CodecError(ValueError):
    pass


@dataclass(frozen=True)
class GainVector:
    """Per-band positive scaling applied to DCT coefficients before rounding."""

    g: np.ndarray  # float64, shape (64,)

    def __post_init__(self):
        g = np.asarray(self.g, dtype=np.float64)
        if g.shape != (BANDS,):
            raise CodecError(f"gain vector must have {BANDS} entries, got {g.shape}")
        if not np.all(g > 0) or not np.all(np.isfinite(g)):
            raise CodecError("gain entries must be finite and > 0")
        g.setflags(write=False)
        object.__setattr__(self, "g", g)


@dataclass(frozen=True)
class CodecModel:
    """One variable-rate codec instance with its admissible displacement range."""

    model_id: int
    beta_train: float
    gain: GainVector
    delta_min: float
    delta_max: float

    def __post_init__(self):
        if self.beta_train <= 0:
            raise CodecError("beta_train must be > 0")
        if not (0 < self.delta_min <= 1 <= self.delta_max):
            raise CodecError("need 0 < delta_min <= 1 <= delta_max")

    @property
    def beta_min(self) -> float:
        return self.beta_train * self.delta_min

    @property
    def beta_max(self) -> float:
        return self.beta_train * self.delta_max


@dataclass(frozen=True)
class LatentTensor:
    """Pre-gain DCT coefficients of one image: shape (blocks_y, blocks_x, channels, 64).

    Deterministic function of (image, model); immutable, hence cacheable
    across beta probes.
    """

    coefficients: np.ndarray
    width: int  # unpadded source geometry
    height: int

    def __post_init__(self):
        c = self.coefficients
        if c.ndim != 4 or c.shape[3] != BANDS:
            raise CodecError(f"latent must have shape (by, bx, ch, {BANDS}), got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise CodecError("latent coefficients must be finite")
        c.setflags(write=False)

    @property
    def blocks_y(self) -> int:
        return self.coefficients.shape[0]

    @property
    def blocks_x(self) -> int:
        return self.coefficients.shape[1]

    @property
    def channels(self) -> int:
        return self.coefficients.shape[2]


@dataclass(frozen=True)
class RateDistortionPoint:
    bpp: float
    mse: float
    psnr: float  # math.inf when mse == 0


@dataclass
class CostCounters:
    """Mutable tally of algorithm-visible work."""

    encoder_runs: int = 0
    entropy_evals: int = 0
    decoder_runs: int = 0

    def add(self, other: "CostCounters") -> None:
        self.encoder_runs += other.encoder_runs
        self.entropy_evals += other.entropy_evals
        self.decoder_runs += other.decoder_runs


def round_half_away_from_zero(x: np.ndarray) -> np.ndarray:
    """Platform-independent rounding; ties go away from zero."""
    return np.copysign(np.floor(np.abs(x) + 0.5), x).astype(np.int64)


def _pad_to_blocks(samples: np.ndarray) -> np.ndarray:
    h, w = samples.shape[:2]
    pad_h = (-h) % BLOCK
    pad_w = (-w) % BLOCK
    if pad_h or pad_w:
        samples = np.pad(samples, ((0, pad_h), (0, pad_w), (0, 0)), mode="edge")
    return samples


def _to_blocks(padded: np.ndarray) -> np.ndarray:
    """(H, W, C) -> (by, bx, C, 8, 8)."""
    h, w, c = padded.shape
    by, bx = h // BLOCK, w // BLOCK
    return (
        padded.reshape(by, BLOCK, bx, BLOCK, c)
        .transpose(0, 2, 4, 1, 3)
        .copy()
    )


def _from_blocks(blocks: np.ndarray) -> np.ndarray:
    """(by, bx, C, 8, 8) -> (H, W, C)."""
    by, bx, c = blocks.shape[:3]
    return (
        blocks.transpose(0, 3, 1, 4, 2)
        .reshape(by * BLOCK, bx * BLOCK, c)
    )


_ZZ_ROWS = np.array([rc[0] for rc in _ZIGZAG])
_ZZ_COLS = np.array([rc[1] for rc in _ZIGZAG])


def encode_latent(image: Image, model: CodecModel) -> LatentTensor:
    """Forward transform: mean-shift by 128, edge-pad to multiples of 8,
    orthonormal 2-D DCT-II per block, zig-zag flatten to 64 bands.

    The result does not depend on the gain or delta_beta; those enter in
    quantize().
    """
    padded = _pad_to_blocks(image.samples.astype(np.float64) - 128.0)
    blocks = _to_blocks(padded)
    dct = scipy.fft.dctn(blocks, type=2, norm="ortho", axes=(-2, -1))
    coeffs = dct[..., _ZZ_ROWS, _ZZ_COLS]
    return LatentTensor(coefficients=coeffs, width=image.width, height=image.height)


def quantize(latent: LatentTensor, gain: GainVector, delta_beta: float) -> np.ndarray:
    """Scale each band by g_k * delta_beta and round half away from zero.

    Larger delta_beta means a finer effective step, hence more distinct
    symbols and a higher rate.
    """
    if delta_beta <= 0:
        raise CodecError("delta_beta must be > 0")
    return round_half_away_from_zero(latent.coefficients * (gain.g * delta_beta))


def estimate_rate(q: np.ndarray, pixel_count: int) -> float:
    """Empirical zeroth-order entropy in bits per pixel.

    Each of the 64 frequency bands gets its own symbol histogram over all
    blocks and channels; total bits are the sum of per-band Shannon
    entropies, normalized by the unpadded pixel count.
    """
    total_bits = 0.0
    n = q.shape[0] * q.shape[1] * q.shape[2]
    for k in range(BANDS):
        _, counts = np.unique(q[..., k], return_counts=True)
        if len(counts) > 1:
            p = counts / n
            total_bits += -n * float(np.sum(p * np.log2(p)))
    return total_bits / pixel_count


def decode(
    q: np.ndarray,
    gain: GainVector,
    delta_beta: float,
    width: int,
    height: int,
) -> Image:
    """Dequantize, inverse DCT, shift by +128, clamp, round, crop padding."""
    if delta_beta <= 0:
        raise CodecError("delta_beta must be > 0")
    by, bx, ch = q.shape[:3]
    if by * BLOCK < height or bx * BLOCK < width or by * BLOCK - height >= BLOCK or bx * BLOCK - width >= BLOCK:
        raise CodecError(
            f"geometry mismatch: {bx}x{by} blocks cannot carry a {width}x{height} image"
        )
    coeffs = q.astype(np.float64) / (gain.g * delta_beta)
    blocks = np.zeros((by, bx, ch, BLOCK, BLOCK), dtype=np.float64)
    blocks[..., _ZZ_ROWS, _ZZ_COLS] = coeffs
    rec = scipy.fft.idctn(blocks, type=2, norm="ortho", axes=(-2, -1))
    padded = _from_blocks(rec) + 128.0
    cropped = padded[:height, :width, :]
    samples = np.clip(np.rint(cropped), 0, 255).astype(np.uint8)
    return Image(samples=samples)


def evaluate(
    image: Image,
    model: CodecModel,
    delta_beta: float,
    latent: LatentTensor | None = None,
    counters: CostCounters | None = None,
) -> tuple[RateDistortionPoint, LatentTensor]:
    """Full rate+distortion evaluation of one displacement.

    When a cached latent is supplied the encoder is skipped and the result
    is bit-identical to the uncached path. Counters, when given, record one
    entropy evaluation, one decoder run, and an encoder run only if the
    latent was computed here.
    """
    if latent is None:
        latent = encode_latent(image, model)
        if counters is not None:
            counters.encoder_runs += 1
    q = quantize(latent, model.gain, delta_beta)
    bpp = estimate_rate(q, image.pixel_count)
    if counters is not None:
        counters.entropy_evals += 1
    rec = decode(q, model.gain, delta_beta, image.width, image.height)
    if counters is not None:
        counters.decoder_runs += 1
    mse = float(
        np.mean((image.samples.astype(np.float64) - rec.samples.astype(np.float64)) ** 2)
    )
    psnr = psnr_db(mse)
    return RateDistortionPoint(bpp=bpp, mse=mse, psnr=psnr), latent


def psnr_db(mse: float) -> float:
    """Peak signal-to-noise ratio for 8-bit content; +inf for zero error."""
    if mse < 0:
        raise CodecError("mse must be >= 0")
    if mse == 0:
        return math.inf
    return 10.0 * math.log10(255.0**2 / mse)


def base_gain_profile() -> np.ndarray:
    """Reference gain shape w_k = 16 / Q_k from the JPEG luminance table,
    flattened in zig-zag order."""
    return 16.0 / JPEG_LUMA_QTABLE[_ZZ_ROWS, _ZZ_COLS]


def make_model(
    model_id: int,
    beta_train: float,
    delta_min: float,
    delta_max: float,
    gain_scale: float,
) -> CodecModel:
    """Build a codec model whose gain is gain_scale times the reference profile."""
    if gain_scale <= 0:
        raise CodecError("gain_scale must be > 0")
    return CodecModel(
        model_id=model_id,
        beta_train=beta_train,
        gain=GainVector(g=gain_scale * base_gain_profile()),
        delta_min=delta_min,
        delta_max=delta_max,
    )
