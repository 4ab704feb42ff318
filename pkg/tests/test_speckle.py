import math

import numpy as np
import pytest

from ghostimg import speckle
from ghostimg.core import default_config
from ghostimg.errors import InsufficientSamples, UnequalArms
from ghostimg.speckle import FrameEnsemble


@pytest.fixture(scope="module")
def cfg():
    return default_config(nx=32, ny=32, seed=7)


def test_frames_are_reproducible(cfg):
    a = speckle.generate_frame(cfg, 12).intensity
    b = speckle.generate_frame(cfg, 12).intensity
    assert np.array_equal(a, b)


def test_batched_equals_single(cfg):
    batch = speckle.generate_intensities(cfg, 5, 4)
    for k in range(4):
        assert np.array_equal(batch[k], speckle.generate_frame(cfg, 5 + k).intensity)


def test_random_access_independent_of_history(cfg):
    ens = speckle.generate_ensemble(cfg, 10)
    assert np.array_equal(ens.intensities[9], speckle.generate_frame(cfg, 9).intensity)
    assert np.array_equal(ens[3].intensity, speckle.generate_ensemble(cfg, 2, start=3).intensities[0])


def test_seeds_give_different_frames(cfg):
    a = speckle.generate_frame(cfg, 0).intensity
    b = speckle.generate_frame(cfg.replace(seed=8), 0).intensity
    c = speckle.generate_frame(cfg, 1).intensity
    assert not np.allclose(a, b) and not np.allclose(a, c)


def test_chunk_iteration_covers_range(cfg):
    chunks = list(speckle.iter_intensity_chunks(cfg, 3, 10, chunk=4))
    assert [c.shape[0] for _, c in chunks] == [4, 4, 2]
    stacked = np.concatenate([c for _, c in chunks])
    assert np.array_equal(stacked, speckle.generate_intensities(cfg, 3, 10))


def test_frame_metadata(cfg):
    f = speckle.generate_frame(cfg, 4)
    assert f.frame_index == 4
    assert f.seed_used == speckle.frame_seed(cfg.seed, 4)
    assert f.intensity.shape == cfg.shape and np.all(f.intensity >= 0)


def test_ensemble_indices_strictly_increasing():
    with pytest.raises(ValueError):
        FrameEnsemble(np.ones((2, 2, 2)), [1, 1])


def test_mean_intensity_and_contrast():
    cfg = default_config(nx=64, ny=64, seed=3)
    ens = speckle.generate_ensemble(cfg, 400)
    x = ens.intensities
    assert x.mean() == pytest.approx(cfg.mean_intensity, rel=0.02)
    assert x.std() / x.mean() == pytest.approx(1.0, rel=0.05)


def test_mean_intensity_scales():
    cfg = default_config(nx=32, ny=32, seed=3, mean_intensity=5.0)
    assert speckle.generate_ensemble(cfg, 200).intensities.mean() == pytest.approx(5.0, rel=0.03)


def test_exponential_statistics():
    cfg = default_config(nx=64, ny=64, seed=5)
    ens = speckle.generate_ensemble(cfg, 1000)
    samples = speckle.sample_pixels(ens, 4)
    assert samples.size == 256_000
    assert speckle.exponential_fit_test(samples) < 0.02


def test_exponential_fit_rejects_small_sample():
    with pytest.raises(InsufficientSamples):
        speckle.exponential_fit_test(np.ones(100))


def test_exponential_fit_detects_wrong_distribution():
    rng = np.random.default_rng(0)
    assert speckle.exponential_fit_test(rng.uniform(0, 2, 50_000)) > 0.1


def test_autocovariance_width_2d_and_1d():
    cfg = default_config(nx=64, ny=64, seed=9)
    w = speckle.autocovariance_width(speckle.generate_ensemble(cfg, 200), cfg.pitch)
    assert w == pytest.approx(cfg.coherence_length, rel=0.05)
    cfg1 = default_config(nx=2048, ny=1, seed=9)
    w1 = speckle.autocovariance_width(speckle.generate_ensemble(cfg1, 200), cfg1.pitch)
    assert w1 == pytest.approx(cfg1.coherence_length, rel=0.05)


def test_autocovariance_zero_lag_is_one(cfg):
    c = speckle.intensity_autocovariance(speckle.generate_ensemble(cfg, 20), 5)
    assert c[0] == 1.0 and np.all(np.diff(c) < 0.1)


def test_arm_pair_identical(cfg):
    a, b = speckle.generate_arm_pair(cfg, 2)
    assert np.array_equal(a.intensity, b.intensity)
    with pytest.raises(UnequalArms):
        speckle.generate_arm_pair(cfg.replace(z2=cfg.z1 * 1.1), 2)


def test_frame_key_counter_based():
    k1 = speckle.frame_key(1, 2)
    assert np.array_equal(k1, speckle.frame_key(1, 2))
    assert not np.array_equal(k1, speckle.frame_key(1, 3))
    assert not np.array_equal(k1, speckle.frame_key(1, 2, speckle.STREAM_DETECTOR))


def test_same_point_moments_small():
    cfg = default_config(nx=64, ny=64, seed=13)
    samples = speckle.sample_pixels(speckle.generate_ensemble(cfg, 500), 4)
    from ghostimg.correlate import g_same_point
    for N in (2, 3):
        assert g_same_point(samples, N) == pytest.approx(math.factorial(N), rel=0.1)
