import numpy as np
import pytest

from brmkit.imageio import Image, ImageError, load_corpus, read_netpbm, write_netpbm


def _gray(h=16, w=16, value=100):
    return Image(samples=np.full((h, w, 1), value, dtype=np.uint8), name="g")


def test_pgm_round_trip(tmp_path):
    rng = np.random.default_rng(1)
    img = Image(samples=rng.integers(0, 256, (24, 32, 1), dtype=np.uint8))
    path = tmp_path / "x.pgm"
    write_netpbm(img, path)
    back = read_netpbm(path)
    assert back.width == 32 and back.height == 24 and back.channels == 1
    np.testing.assert_array_equal(back.samples, img.samples)


def test_ppm_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    img = Image(samples=rng.integers(0, 256, (16, 8, 3), dtype=np.uint8))
    path = tmp_path / "x.ppm"
    write_netpbm(img, path)
    back = read_netpbm(path)
    assert back.channels == 3
    np.testing.assert_array_equal(back.samples, img.samples)


def test_header_comments(tmp_path):
    raster = bytes(range(64)) * 4
    data = b"P5\n# a comment\n16 16\n# another\n255\n" + raster
    path = tmp_path / "c.pgm"
    path.write_bytes(data)
    img = read_netpbm(path)
    assert img.width == img.height == 16
    assert img.samples[0, 1, 0] == 1


@pytest.mark.parametrize(
    "payload",
    [
        b"P4\n16 16\n255\n" + b"\0" * 256,  # wrong magic
        b"P5\n16 16\n65535\n" + b"\0" * 512,  # wrong maxval
        b"P5\n16 16\n255\n" + b"\0" * 100,  # truncated raster
        b"P5\n16\n",  # truncated header
    ],
)
def test_malformed_files_rejected(tmp_path, payload):
    path = tmp_path / "bad.pgm"
    path.write_bytes(payload)
    with pytest.raises(ImageError):
        read_netpbm(path)


def test_minimum_dimensions_enforced():
    with pytest.raises(ImageError):
        Image(samples=np.zeros((4, 16, 1), dtype=np.uint8))
    with pytest.raises(ImageError):
        Image(samples=np.zeros((16, 7, 1), dtype=np.uint8))


def test_bad_channel_count_rejected():
    with pytest.raises(ImageError):
        Image(samples=np.zeros((16, 16, 2), dtype=np.uint8))


def test_samples_are_frozen():
    img = _gray()
    with pytest.raises(ValueError):
        img.samples[0, 0, 0] = 1


def test_load_corpus_sorted(tmp_path):
    for name in ("b.pgm", "a.pgm"):
        write_netpbm(_gray(), tmp_path / name)
    (tmp_path / "notes.txt").write_text("ignored")
    images = load_corpus(tmp_path)
    assert [im.name for im in images] == ["a", "b"]
