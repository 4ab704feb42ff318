import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ghostimg import core, detect, speckle
from ghostimg.core import default_config
from ghostimg.detect import DetectorModel, apply_detector, bucket_signal
from ghostimg.errors import DimensionMismatch


@pytest.fixture(scope="module")
def cfg():
    return default_config(nx=16, ny=16, seed=1)


def test_bucket_of_transparent_mask_is_total_power(cfg):
    frame = speckle.generate_frame(cfg, 0)
    mask = core.ObjectMask(np.ones(cfg.shape))
    assert bucket_signal(frame, mask, cfg.pitch) == pytest.approx(
        frame.intensity.sum() * cfg.pitch ** 2, rel=1e-12)


def test_bucket_of_opaque_mask_is_zero(cfg):
    frame = speckle.generate_frame(cfg, 0)
    assert bucket_signal(frame, core.ObjectMask(np.zeros(cfg.shape)), cfg.pitch) == 0.0


@settings(max_examples=25)
@given(a=st.floats(0, 10), b=st.floats(0, 10), seed=st.integers(0, 100))
def test_bucket_linear_in_intensity(a, b, seed):
    rng = np.random.default_rng(seed)
    i1, i2 = rng.exponential(size=(2, 8, 8))
    mask = core.ObjectMask(rng.uniform(size=(8, 8)))
    lhs = bucket_signal(a * i1 + b * i2, mask, 1.0)
    rhs = a * bucket_signal(i1, mask, 1.0) + b * bucket_signal(i2, mask, 1.0)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


def test_bucket_batch_matches_single(cfg):
    ens = speckle.generate_ensemble(cfg, 5)
    mask = core.make_rect(cfg, 6 * cfg.pitch)
    series = detect.bucket_series(ens, mask, cfg.pitch)
    assert len(series) == 5
    for k in range(5):
        assert series.s[k] == pytest.approx(bucket_signal(ens[k], mask, cfg.pitch), rel=1e-12)


def test_bucket_uses_power_transmission(cfg):
    i = np.ones(cfg.shape)
    mask = core.ObjectMask(np.full(cfg.shape, 0.5))
    assert bucket_signal(i, mask, 1.0) == pytest.approx(0.25 * i.size)


def test_bucket_shape_mismatch(cfg):
    with pytest.raises(DimensionMismatch):
        bucket_signal(np.ones((4, 4)), core.ObjectMask(np.ones((5, 5))), 1.0)


def test_bucket_series_rejects_negative():
    with pytest.raises(ValueError):
        detect.BucketSeries([1.0, -1.0])


def test_ideal_detector_is_identity():
    model = DetectorModel()
    assert model.ideal
    x = np.array([0.0, 1.5, 3.25])
    d = apply_detector(x, model)
    assert np.array_equal(d.values, x) and d.saturated == 0


def test_quantization_and_saturation():
    model = DetectorModel(quant_bits=8, full_scale=10.0)
    d = apply_detector(np.array([-1.0, 0.0, 5.0, 10.0, 20.0]), model)
    assert d.values.tolist() == [0, 0, 128, 255, 255]
    assert d.saturated == 2


def test_shot_noise_statistics():
    model = DetectorModel(shot_noise=True)
    rng = detect.detector_rng(0, 0)
    d = apply_detector(np.full(100_000, 50.0), model, rng)
    assert d.values.mean() == pytest.approx(50, rel=0.01)
    assert d.values.var() == pytest.approx(50, rel=0.03)


def test_read_noise_statistics():
    model = DetectorModel(read_noise_sigma=2.0)
    d = apply_detector(np.zeros(100_000), model, detect.detector_rng(0, 1))
    assert d.values.std() == pytest.approx(2.0, rel=0.02)


def test_noise_requires_rng():
    with pytest.raises(ValueError):
        apply_detector(np.ones(3), DetectorModel(shot_noise=True))


@pytest.mark.parametrize("kw", [dict(quant_bits=12), dict(read_noise_sigma=-1),
                                dict(exposure_gain=0), dict(full_scale=0)])
def test_invalid_detector(kw):
    with pytest.raises(ValueError):
        DetectorModel(**kw)


def test_detector_stream_independent_of_speckle():
    a = detect.detector_rng(3, 4).standard_normal(4)
    b = speckle.frame_rng(3, 4).standard_normal(4)
    assert not np.allclose(a, b)
