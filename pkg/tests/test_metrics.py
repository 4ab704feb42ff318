import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ghostimg import core, metrics, speckle
from ghostimg.core import CorrelationOrder, default_config
from ghostimg.correlate import GhostImage
from ghostimg.errors import EmptyRegion, PeakNotFound, TooFewFrames, ZeroVariance


@pytest.fixture(scope="module")
def cfg():
    return default_config(nx=40, ny=40)


def image(g):
    return GhostImage(g, CorrelationOrder(2, 1), 100)


def test_visibility_of_ideal_image(cfg):
    mask = core.make_rect(cfg, 8 * cfg.pitch)
    g = 1 + mask.power
    rep = metrics.visibility(image(g), mask, cfg)
    assert rep.gamma_in == 2 and rep.gamma_out == 1
    assert rep.v == pytest.approx(1 / 3)
    assert rep.frames_used == 100


def test_visibility_ignores_guard_band(cfg):
    mask = core.make_rect(cfg, 8 * cfg.pitch)
    inside, outside = metrics.regions(mask, cfg)
    g = np.where(inside, 2.0, 1.0)
    g[~inside & ~outside] = 50.0  # blurred halo must not count
    assert metrics.visibility(g, mask, cfg).v == pytest.approx(1 / 3)


def test_visibility_empty_region(cfg):
    with pytest.raises(EmptyRegion):
        metrics.visibility(np.ones(cfg.shape), core.ObjectMask(np.ones(cfg.shape)), cfg)


def test_m_obj(cfg):
    mask = core.make_rect(cfg, 4 * cfg.pitch)
    assert metrics.m_obj(mask, cfg) == pytest.approx(1.0)
    assert metrics.m_obj(core.make_rect(cfg, 8 * cfg.pitch), cfg) == pytest.approx(4.0)


def test_fidelity_bounds(cfg):
    mask = core.make_glyph(cfg)
    assert metrics.fidelity(mask.power * 3, mask) == pytest.approx(1.0)
    assert metrics.fidelity(1 - mask.power, mask) == pytest.approx(-1.0)
    with pytest.raises(ZeroVariance):
        metrics.fidelity(np.ones(cfg.shape), mask)


@settings(max_examples=20)
@given(seed=st.integers(0, 10_000))
def test_fidelity_in_range(seed):
    rng = np.random.default_rng(seed)
    mask = core.ObjectMask(rng.uniform(size=(6, 6)))
    f = metrics.fidelity(rng.exponential(size=(6, 6)), mask)
    assert -1 - 1e-12 <= f <= 1 + 1e-12


def test_block_fluctuation():
    blocks = [np.full((2, 2), v) for v in (1.0, 2.0, 3.0)]
    assert metrics.block_fluctuation(blocks) == pytest.approx(1.0)
    with pytest.raises(TooFewFrames):
        metrics.block_fluctuation(blocks[:1])


def test_estimator_fluctuation_drops_remainder():
    rng = np.random.default_rng(0)
    s = rng.exponential(size=103)
    frames = rng.exponential(size=(103, 3, 3))
    a = metrics.estimator_fluctuation(s, frames, (2, 1), 10)
    b = metrics.estimator_fluctuation(s[:100], frames[:100], (2, 1), 10)
    assert a == b
    with pytest.raises(TooFewFrames):
        metrics.estimator_fluctuation(s[:10], frames[:10], (2, 1), 10)


def test_fluctuation_shrinks_with_frames():
    cfg = default_config(nx=16, ny=16, seed=2)
    mask = core.make_rect(cfg, 6 * cfg.pitch)
    ens = speckle.generate_ensemble(cfg, 8000)
    from ghostimg import detect
    s = detect.bucket_series(ens, mask, cfg.pitch)
    small = metrics.estimator_fluctuation(s.s[:800], ens.intensities[:800], (2, 1), 8)
    large = metrics.estimator_fluctuation(s.s, ens.intensities, (2, 1), 8)
    assert large == pytest.approx(small / math.sqrt(10), rel=0.3)


def test_profile_fwhm_triangle():
    p = np.array([0, 0, 1, 2, 3, 4, 3, 2, 1, 0, 0], dtype=float)
    assert metrics.profile_fwhm(p, 5, 0.0, 1.0) == pytest.approx(4.0)
    assert metrics.profile_fwhm(p + 1, 5, 1.0, 2.0) == pytest.approx(8.0)


def test_profile_fwhm_gaussian():
    x = np.arange(-50, 51, dtype=float)
    sigma = 7.3
    p = 1 + 2 * np.exp(-x ** 2 / (2 * sigma ** 2))
    fwhm = metrics.profile_fwhm(p, 50, 1.0, 1.0)
    assert fwhm == pytest.approx(2 * math.sqrt(2 * math.log(2)) * sigma, rel=0.01)


def test_profile_fwhm_edge():
    with pytest.raises(PeakNotFound):
        metrics.profile_fwhm(np.array([4.0, 3, 2]), 0, 0.0, 1.0)


def test_image_fwhm_synthetic(cfg):
    yy, xx = np.indices(cfg.shape)
    r2 = (yy - 20) ** 2 + (xx - 20) ** 2
    rng = np.random.default_rng(1)
    g = 1 + np.exp(-r2 / (2 * 2.0 ** 2)) + rng.normal(0, 1e-3, cfg.shape)
    rep = metrics.image_fwhm(g, cfg)
    assert rep.fwhm == pytest.approx(2.3548 * 2.0 * cfg.pitch, rel=0.05)


def test_image_fwhm_rejects_noise(cfg):
    g = 1 + np.random.default_rng(2).normal(0, 0.1, cfg.shape)
    g[20, 20] = 1.05
    with pytest.raises(PeakNotFound):
        metrics.image_fwhm(g, cfg)


def test_psf_width_small_run():
    cfg = default_config(nx=24, ny=24, seed=3)
    rep = metrics.psf_fwhm(cfg, (2, 1), frames=20_000)
    assert 0.5 < rep.fwhm / cfg.coherence_length < 1.2
