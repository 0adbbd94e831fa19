"""Binary Netpbm (PGM P5 / PPM P6) reading and writing, 8-bit only.

Images are kept as uint8 numpy arrays of shape (height, width, channels)
with channels 1 (gray) or 3 (RGB), row-major, channel-interleaved.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MIN_DIM = 8


class ImageError(ValueError):
    pass


@dataclass(frozen=True)
class Image:
    """8-bit image with validated geometry."""

    samples: np.ndarray  # uint8, shape (height, width, channels)
    name: str = ""

    def __post_init__(self):
        s = self.samples
        if s.ndim != 3 or s.shape[2] not in (1, 3):
            raise ImageError(f"expected (h, w, 1|3) array, got shape {s.shape}")
        if s.dtype != np.uint8:
            raise ImageError(f"expected uint8 samples, got {s.dtype}")
        if s.shape[0] < MIN_DIM or s.shape[1] < MIN_DIM:
            raise ImageError(
                f"image must be at least {MIN_DIM}x{MIN_DIM}, got {s.shape[1]}x{s.shape[0]}"
            )
        s.setflags(write=False)

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def channels(self) -> int:
        return self.samples.shape[2]

    @property
    def pixel_count(self) -> int:
        return self.height * self.width


_TOKEN = re.compile(rb"\s*(?:#[^\n\r]*\s*)*(\S+)")


def _read_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read `count` whitespace-separated header tokens, skipping '#' comments.

    Returns the tokens and the offset just past the single whitespace byte
    that terminates the last token (start of raster data).
    """
    tokens = []
    pos = 0
    for _ in range(count):
        m = _TOKEN.match(data, pos)
        if m is None:
            raise ImageError("truncated netpbm header")
        tokens.append(m.group(1))
        pos = m.end()
    if pos >= len(data) or data[pos : pos + 1] not in b" \t\r\n":
        raise ImageError("malformed netpbm header")
    return tokens, pos + 1


def read_netpbm(path: str | Path) -> Image:
    """Load a binary PGM (P5) or PPM (P6) file with maxval 255."""
    data = Path(path).read_bytes()
    tokens, offset = _read_tokens(data, 4)
    magic, w_tok, h_tok, maxval_tok = tokens
    if magic == b"P5":
        channels = 1
    elif magic == b"P6":
        channels = 3
    else:
        raise ImageError(f"unsupported netpbm magic {magic!r} (want P5 or P6)")
    try:
        width, height, maxval = int(w_tok), int(h_tok), int(maxval_tok)
    except ValueError as exc:
        raise ImageError(f"bad netpbm header field: {exc}") from exc
    if maxval != 255:
        raise ImageError(f"only maxval 255 supported, got {maxval}")
    n = width * height * channels
    raster = data[offset : offset + n]
    if len(raster) != n:
        raise ImageError(f"raster truncated: expected {n} bytes, got {len(raster)}")
    samples = np.frombuffer(raster, dtype=np.uint8).reshape(height, width, channels).copy()
    return Image(samples=samples, name=Path(path).stem)


def write_netpbm(image: Image, path: str | Path) -> None:
    """Write a binary PGM (1 channel) or PPM (3 channels) file."""
    magic = b"P5" if image.channels == 1 else b"P6"
    header = b"%s\n%d %d\n255\n" % (magic, image.width, image.height)
    Path(path).write_bytes(header + image.samples.tobytes())


def load_corpus(directory: str | Path) -> list[Image]:
    """Load every .pgm/.ppm file in a directory, sorted by filename."""
    directory = Path(directory)
    paths = sorted(p for p in directory.iterdir() if p.suffix.lower() in (".pgm", ".ppm"))
    return [read_netpbm(p) for p in paths]
