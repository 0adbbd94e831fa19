#!/usr/bin/env python3
"""Regenerate the checked-in test corpus.

Eight deterministic synthetic images with natural-image statistics
(random-phase 1/f spectra plus smooth gradients and a few hard edges),
six grayscale PGM and two color PPM. Seeded, so reruns are byte-identical.

Usage: python3 scripts/make_corpus.py [corpus_dir]
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from brmkit.imageio import Image, write_netpbm  # noqa: E402

SIZES = [
    ("gravel", 256, 256, 1),
    ("dunes", 320, 256, 1),
    ("cliff", 384, 288, 1),
    ("meadow", 512, 384, 1),
    ("harbor", 640, 480, 1),
    ("ridge", 768, 512, 1),
    ("lagoon", 256, 256, 3),
    ("orchard", 512, 384, 3),
]


def spectral_field(rng: np.ndarray, height: int, width: int, slope: float) -> np.ndarray:
    """Random-phase field with ~1/f^slope amplitude spectrum, in [0, 1]."""
    fy = np.fft.fftfreq(height)[:, None]
    fx = np.fft.rfftfreq(width)[None, :]
    radius = np.sqrt(fx**2 + fy**2)
    amplitude = 1.0 / (radius**slope + 1e-3)
    amplitude[0, 0] = 0.0
    phase = rng.uniform(0, 2 * np.pi, size=amplitude.shape)
    spectrum = amplitude * np.exp(1j * phase)
    field = np.fft.irfft2(spectrum, s=(height, width))
    lo, hi = field.min(), field.max()
    return (field - lo) / (hi - lo)


def make_image(name: str, width: int, height: int, channels: int, seed: int) -> Image:
    rng = np.random.default_rng(seed)
    base = spectral_field(rng, height, width, slope=1.8)
    texture = spectral_field(rng, height, width, slope=1.1)
    yy, xx = np.mgrid[0:height, 0:width]
    gradient = (0.3 * xx / width + 0.2 * yy / height)
    luma = 0.55 * base + 0.2 * texture + gradient
    # a couple of hard-edged patches for block-transform stress
    cx, cy = rng.integers(width // 4, 3 * width // 4), rng.integers(height // 4, 3 * height // 4)
    r = min(width, height) // 6
    disk = (xx - cx) ** 2 + (yy - cy) ** 2 < r**2
    luma = np.where(disk, 0.75 * luma + 0.25, luma)
    luma = (luma - luma.min()) / (luma.max() - luma.min())
    if channels == 1:
        samples = np.round(10 + 235 * luma)[:, :, None]
    else:
        tint = spectral_field(rng, height, width, slope=2.2)
        planes = [
            10 + 235 * np.clip(luma + 0.12 * (tint - 0.5), 0, 1),
            10 + 235 * luma,
            10 + 235 * np.clip(luma - 0.12 * (tint - 0.5), 0, 1),
        ]
        samples = np.round(np.stack(planes, axis=-1))
    return Image(samples=samples.astype(np.uint8), name=name)


def main() -> None:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("corpus")
    out.mkdir(parents=True, exist_ok=True)
    for seed, (name, width, height, channels) in enumerate(SIZES, start=101):
        image = make_image(name, width, height, channels, seed)
        ext = "pgm" if channels == 1 else "ppm"
        path = out / f"{name}.{ext}"
        write_netpbm(image, path)
        print(f"wrote {path} ({width}x{height}x{channels})")


if __name__ == "__main__":
    main()
