import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from brmkit import codec
from brmkit.codec import (
    CodecError,
    CostCounters,
    GainVector,
    LatentTensor,
    decode,
    encode_latent,
    estimate_rate,
    evaluate,
    make_model,
    psnr_db,
    quantize,
    round_half_away_from_zero,
)
from brmkit.imageio import Image


def _model(gain_scale=1.0, delta_min=0.1, delta_max=4.0):
    return make_model(0, beta_train=0.01, delta_min=delta_min, delta_max=delta_max,
                      gain_scale=gain_scale)


def _unit_model():
    return codec.CodecModel(
        model_id=0, beta_train=1.0,
        gain=GainVector(g=np.ones(64)), delta_min=0.5, delta_max=4.0,
    )


def _image_from(array2d, name="t"):
    return Image(samples=np.asarray(array2d, dtype=np.uint8)[:, :, None], name=name)


def brute_force_dct2(block):
    """Direct double-summation orthonormal 2-D DCT-II; the reference the
    fast path must match."""
    out = np.zeros((8, 8))
    for u in range(8):
        for v in range(8):
            cu = math.sqrt(1 / 8) if u == 0 else math.sqrt(2 / 8)
            cv = math.sqrt(1 / 8) if v == 0 else math.sqrt(2 / 8)
            acc = 0.0
            for x in range(8):
                for y in range(8):
                    acc += (
                        block[x, y]
                        * math.cos((2 * x + 1) * u * math.pi / 16)
                        * math.cos((2 * y + 1) * v * math.pi / 16)
                    )
            out[u, v] = cu * cv * acc
    return out


class TestEncodeLatent:
    def test_constant_128_gives_zero_latent(self):
        img = _image_from(np.full((16, 16), 128))
        latent = encode_latent(img, _model())
        np.testing.assert_array_equal(latent.coefficients, 0.0)

    def test_constant_255_gives_dc_only(self):
        img = _image_from(np.full((8, 8), 255))
        latent = encode_latent(img, _model())
        coeffs = latent.coefficients[0, 0, 0]
        assert coeffs[0] == pytest.approx(8 * (255 - 128), abs=1e-9)
        np.testing.assert_allclose(coeffs[1:], 0.0, atol=1e-9)

    def test_ramp_matches_brute_force_reference(self):
        ramp = np.arange(16 * 8).reshape(8, 16) % 256
        img = _image_from(ramp)
        latent = encode_latent(img, _model())
        for bx in range(2):
            block = ramp[:, bx * 8:(bx + 1) * 8].astype(np.float64) - 128.0
            expected = brute_force_dct2(block)
            got = np.zeros((8, 8))
            got[codec._ZZ_ROWS, codec._ZZ_COLS] = latent.coefficients[0, bx, 0]
            np.testing.assert_allclose(got, expected, atol=1e-9)

    def test_padding_replicates_edges(self):
        rng = np.random.default_rng(3)
        img = _image_from(rng.integers(0, 256, (10, 12)))
        latent = encode_latent(img, _model())
        assert latent.blocks_y == 2 and latent.blocks_x == 2
        assert latent.width == 12 and latent.height == 10

    def test_deterministic(self, small_image):
        a = encode_latent(small_image, _model())
        b = encode_latent(small_image, _model())
        np.testing.assert_array_equal(a.coefficients, b.coefficients)


class TestRounding:
    def test_half_away_from_zero(self):
        x = np.array([3.2, 3.5, -3.5, -3.2, 0.5, -0.5, 0.0])
        np.testing.assert_array_equal(
            round_half_away_from_zero(x), [3, 4, -4, -3, 1, -1, 0]
        )

    @given(st.floats(-1e6, 1e6, allow_nan=False))
    def test_odd_symmetry(self, x):
        arr = np.array([x])
        assert round_half_away_from_zero(-arr)[0] == -round_half_away_from_zero(arr)[0]


class TestQuantize:
    def _latent(self, values):
        coeffs = np.zeros((1, 1, 1, 64))
        coeffs[0, 0, 0, : len(values)] = values
        return LatentTensor(coefficients=coeffs, width=8, height=8)

    def test_zero_maps_to_zero(self):
        latent = self._latent([0.0])
        for delta in (0.1, 1.0, 7.3):
            assert quantize(latent, GainVector(g=np.ones(64)), delta)[0, 0, 0, 0] == 0

    def test_rounding_definition(self):
        latent = self._latent([3.2])
        gain = GainVector(g=np.ones(64))
        assert quantize(latent, gain, 1.0)[0, 0, 0, 0] == 3
        assert quantize(latent, gain, 2.0)[0, 0, 0, 0] == 6

    def test_finer_delta_not_worse_on_random_latent(self):
        # brute-force check over a seeded random latent: mean absolute
        # dequantization error at delta=2 must not exceed that at delta=1
        rng = np.random.default_rng(11)
        coeffs = rng.uniform(-50, 50, size=(4, 4, 1, 64))
        latent = LatentTensor(coefficients=coeffs, width=32, height=32)
        gain = GainVector(g=np.ones(64))
        errors = {}
        for delta in (1.0, 2.0):
            q = quantize(latent, gain, delta)
            errors[delta] = np.mean(np.abs(coeffs - q / delta))
        assert errors[2.0] <= errors[1.0]

    def test_nonpositive_delta_rejected(self):
        with pytest.raises(CodecError):
            quantize(self._latent([1.0]), GainVector(g=np.ones(64)), 0.0)


class TestEstimateRate:
    def test_all_zero_is_free(self):
        q = np.zeros((8, 8, 1, 64), dtype=np.int64)
        assert estimate_rate(q, 64 * 64) == 0.0

    def test_two_symbol_band(self):
        # one band splits 50/50 over 64 blocks of a 64x64 image: 1 bit per
        # block, 64 bits total, 64/4096 bpp
        q = np.zeros((8, 8, 1, 64), dtype=np.int64)
        q[:, :4, 0, 5] = 1
        assert estimate_rate(q, 4096) == pytest.approx(64 / 4096, abs=1e-12)

    def test_rate_increases_with_delta(self, small_image):
        model = _model(gain_scale=0.05)
        latent = encode_latent(small_image, model)
        bpps = [
            estimate_rate(quantize(latent, model.gain, d), small_image.pixel_count)
            for d in (0.5, 1.0, 2.0)
        ]
        assert bpps[0] < bpps[1] < bpps[2]


class TestDecode:
    def test_constant_round_trip(self):
        img = _image_from(np.full((16, 24), 128))
        model = _model()
        latent = encode_latent(img, model)
        q = quantize(latent, model.gain, 1.0)
        rec = decode(q, model.gain, 1.0, img.width, img.height)
        np.testing.assert_array_equal(rec.samples, img.samples)

    def test_all_zero_q_decodes_to_128(self):
        q = np.zeros((2, 3, 1, 64), dtype=np.int64)
        rec = decode(q, GainVector(g=np.ones(64)), 1.0, 20, 12)
        assert rec.width == 20 and rec.height == 12
        np.testing.assert_array_equal(rec.samples, 128)

    def test_geometry_mismatch_rejected(self):
        q = np.zeros((2, 2, 1, 64), dtype=np.int64)
        with pytest.raises(CodecError):
            decode(q, GainVector(g=np.ones(64)), 1.0, 100, 100)

    def test_quality_improves_with_delta(self, small_image):
        model = _model(gain_scale=0.2)
        latent = encode_latent(small_image, model)
        mses = []
        for delta in (model.delta_min, model.delta_max):
            q = quantize(latent, model.gain, delta)
            rec = decode(q, model.gain, delta, small_image.width, small_image.height)
            mses.append(
                np.mean((small_image.samples.astype(float) - rec.samples.astype(float)) ** 2)
            )
        assert psnr_db(mses[1]) >= psnr_db(mses[0])


class TestEvaluate:
    def test_cache_is_transparent_and_saves_one_encode(self, small_image):
        model = _model(gain_scale=0.1)
        cold = CostCounters()
        point_cold, latent = evaluate(small_image, model, 1.3, counters=cold)
        warm = CostCounters()
        point_warm, _ = evaluate(small_image, model, 1.3, latent=latent, counters=warm)
        assert point_cold == point_warm
        assert cold.encoder_runs - warm.encoder_runs == 1
        assert cold.entropy_evals == warm.entropy_evals == 1
        assert cold.decoder_runs == warm.decoder_runs == 1

    def test_deterministic(self, small_image):
        model = _model(gain_scale=0.1)
        a, _ = evaluate(small_image, model, 0.7)
        b, _ = evaluate(small_image, model, 0.7)
        assert a == b

    def test_default_bpp_at_delta_one(self, small_image):
        model = _model(gain_scale=0.1)
        point, latent = evaluate(small_image, model, 1.0)
        q = quantize(latent, model.gain, 1.0)
        assert point.bpp == estimate_rate(q, small_image.pixel_count)


class TestInvariantsOnCorpus:
    def test_rate_and_distortion_monotone_on_grid(self, corpus, default_models):
        image = corpus[0]
        model = default_models[2]
        deltas = np.geomspace(model.delta_min, model.delta_max, 32)
        latent = encode_latent(image, model)
        prev = None
        for delta in deltas:
            point, _ = evaluate(image, model, float(delta), latent=latent)
            if prev is not None:
                assert point.bpp > prev.bpp or point.bpp == prev.bpp == 0
                assert point.mse <= prev.mse
            prev = point


def test_psnr_examples():
    assert psnr_db(255.0**2) == pytest.approx(0.0)
    assert psnr_db(255.0**2 / 1000) == pytest.approx(30.0)
    assert psnr_db(0.0) == math.inf
    with pytest.raises(CodecError):
        psnr_db(-1.0)


def test_model_invariants():
    with pytest.raises(CodecError):
        make_model(0, beta_train=-1.0, delta_min=0.5, delta_max=2.0, gain_scale=1.0)
    with pytest.raises(CodecError):
        make_model(0, beta_train=1.0, delta_min=1.5, delta_max=2.0, gain_scale=1.0)
    with pytest.raises(CodecError):
        GainVector(g=np.zeros(64))
