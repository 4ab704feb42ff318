"""Pseudothermal speckle frames.

Each frame is the squared modulus of a circular complex Gaussian field with a
Gaussian correlation envelope. The field is white complex noise filtered in
the spatial-frequency domain on a grid padded by four coherence lengths per
side, then cropped, so the filter's periodic wrap-around never reaches the
retained window.

Frames are generated from a counter-based stream (Philox keyed by a hash of
``(seed, frame_index)``), so any frame can be produced on its own, in any
order, and reproduces bit for bit.
"""

from dataclasses import dataclass
import functools
import math

import numpy as np
from scipy import fft as sfft
from scipy import stats

from .errors import DimensionMismatch, InsufficientSamples, UnequalArms

#: padding on each side, in coherence lengths
PAD_COHERENCE = 4
#: stream tags so different consumers of one frame index never share numbers
STREAM_FIELD = 0
STREAM_DETECTOR = 1
STREAM_PHASE = 2

_CHUNK_ELEMENTS = 2 ** 21


def frame_key(seed, frame_index, stream=STREAM_FIELD):
    """128-bit Philox key derived from ``(seed, frame_index, stream)``."""
    ss = np.random.SeedSequence([int(seed), int(frame_index), int(stream)])
    return ss.generate_state(2, dtype=np.uint64)


def frame_rng(seed, frame_index, stream=STREAM_FIELD):
    return np.random.Generator(np.random.Philox(key=frame_key(seed, frame_index, stream)))


def frame_seed(seed, frame_index):
    """The 64-bit value reported as ``seed_used`` for a frame."""
    return int(frame_key(seed, frame_index)[0])


@dataclass(frozen=True, eq=False)
class SpeckleFrame:
    intensity: np.ndarray
    frame_index: int
    seed_used: int


@dataclass(frozen=True, eq=False)
class FrameEnsemble:
    """Ordered stack of frames, ``intensities[k]`` taken at ``indices[k]``."""

    intensities: np.ndarray
    indices: np.ndarray
    seed: int = 0

    def __post_init__(self):
        stack = np.asarray(self.intensities)
        if stack.ndim != 3:
            raise DimensionMismatch(f"ensemble must be (count, ny, nx), got {stack.shape}")
        idx = np.asarray(self.indices, dtype=np.int64)
        if idx.shape != (stack.shape[0],):
            raise DimensionMismatch("one frame index per frame is required")
        if idx.size > 1 and np.any(np.diff(idx) <= 0):
            raise ValueError("frame indices must be strictly increasing")
        object.__setattr__(self, "intensities", stack)
        object.__setattr__(self, "indices", idx)

    @property
    def count(self):
        return self.intensities.shape[0]

    @property
    def shape(self):
        return self.intensities.shape[1:]

    def __len__(self):
        return self.count

    def __iter__(self):
        for k in range(self.count):
            yield self[k]

    def __getitem__(self, k):
        idx = int(self.indices[k])
        return SpeckleFrame(self.intensities[k], idx, frame_seed(self.seed, idx))


class _Filter:
    """Padded grid geometry and the Gaussian transfer function for one config."""

    def __init__(self, cfg):
        lc = cfg.coherence_length
        pad = int(math.ceil(PAD_COHERENCE * lc / cfg.pitch))
        self.pad_y = pad if cfg.ny > 1 else 0
        self.pad_x = pad if cfg.nx > 1 else 0
        self.shape = (sfft.next_fast_len(cfg.ny + 2 * self.pad_y),
                      sfft.next_fast_len(cfg.nx + 2 * self.pad_x))
        fy = sfft.fftfreq(self.shape[0], d=cfg.pitch)
        fx = sfft.fftfreq(self.shape[1], d=cfg.pitch)
        f2 = fy[:, None] ** 2 + fx[None, :] ** 2
        # field correlation exp(-2 r^2 / lc^2)  <=>  |H|^2 = exp(-pi^2 lc^2 f^2 / 2)
        h = np.exp(-(math.pi * lc) ** 2 * f2 / 4)
        h *= math.sqrt(cfg.mean_intensity / np.mean(h ** 2))
        self.h = h
        self.window = (slice(self.pad_y, self.pad_y + cfg.ny),
                       slice(self.pad_x, self.pad_x + cfg.nx))


@functools.lru_cache(maxsize=16)
def _filter(cfg):
    return _Filter(cfg)


def chunk_size(cfg):
    """Frames per batch so a batch of padded complex fields stays around 32 MB."""
    py, px = _filter(cfg).shape
    return max(1, _CHUNK_ELEMENTS // (py * px))


def generate_fields(cfg, start, count):
    """Complex speckle fields for frame indices ``start .. start + count - 1``."""
    filt = _filter(cfg)
    py, px = filt.shape
    noise = np.empty((count, py, px), dtype=complex)
    buf = np.empty((2, py, px))
    for k in range(count):
        frame_rng(cfg.seed, start + k).standard_normal(out=buf)
        noise[k].real = buf[0]
        noise[k].imag = buf[1]
    noise *= math.sqrt(0.5)
    spec = sfft.fft2(noise, norm="ortho", overwrite_x=True)
    spec *= filt.h
    field = sfft.ifft2(spec, norm="ortho", overwrite_x=True)
    return np.ascontiguousarray(field[(slice(None),) + filt.window])


def generate_field(cfg, frame_index):
    return generate_fields(cfg, frame_index, 1)[0]


def generate_intensities(cfg, start, count):
    field = generate_fields(cfg, start, count)
    return field.real ** 2 + field.imag ** 2


def generate_frame(cfg, frame_index):
    """One speckle intensity frame; a pure function of ``(cfg, frame_index)``."""
    return SpeckleFrame(generate_intensities(cfg, frame_index, 1)[0], int(frame_index),
                        frame_seed(cfg.seed, frame_index))


def iter_intensity_chunks(cfg, start, count, chunk=None):
    """Yield ``(first_index, intensities)`` batches covering the index range."""
    chunk = chunk or chunk_size(cfg)
    stop = start + count
    for first in range(start, stop, chunk):
        yield first, generate_intensities(cfg, first, min(chunk, stop - first))


def generate_ensemble(cfg, count, start=0, dtype=float):
    stack = np.empty((count,) + cfg.shape, dtype=dtype)
    for first, block in iter_intensity_chunks(cfg, start, count):
        stack[first - start:first - start + len(block)] = block
    return FrameEnsemble(stack, np.arange(start, start + count), cfg.seed)


def generate_arm_pair(cfg, frame_index):
    """Object-plane and reference-plane frames of the symmetric lensless setup.

    With ``z1 == z2`` both planes see the same speckle realization.
    """
    if cfg.z1 != cfg.z2:
        raise UnequalArms(f"only the z1 == z2 geometry is modelled (z1={cfg.z1}, z2={cfg.z2})")
    frame = generate_frame(cfg, frame_index)
    twin = SpeckleFrame(frame.intensity.copy(), frame.frame_index, frame.seed_used)
    return frame, twin


def _as_samples(data):
    if isinstance(data, FrameEnsemble):
        data = data.intensities
    elif isinstance(data, SpeckleFrame):
        data = data.intensity
    return np.asarray(data, dtype=float).ravel()


def sample_pixels(ensemble, stride):
    """Pixels on a sub-grid with spacing `stride`, pooled over all frames.

    With `stride` of one coherence length or more, samples are close to
    independent, which is what the single-point statistics tests need.
    """
    stack = ensemble.intensities if isinstance(ensemble, FrameEnsemble) else np.asarray(ensemble)
    sy = stride if stack.shape[1] > 1 else 1
    return stack[:, ::sy, ::stride].ravel().astype(float)


def exponential_fit_test(samples, min_samples=10_000):
    """Kolmogorov-Smirnov distance to a negative exponential of the same mean."""
    x = _as_samples(samples)
    if x.size < min_samples:
        raise InsufficientSamples(f"need at least {min_samples} samples, got {x.size}")
    mean = x.mean()
    if mean <= 0:
        raise InsufficientSamples("samples have non-positive mean")
    return float(stats.kstest(x, "expon", args=(0.0, mean)).statistic)


def intensity_autocovariance(ensemble, max_lag):
    """Normalized intensity autocovariance versus pixel lag, ``C[0] == 1``.

    Averaged over frames and over both grid axes (only x for one-row grids).
    """
    stack = ensemble.intensities if isinstance(ensemble, FrameEnsemble) else np.asarray(ensemble)
    d = stack - stack.mean()
    axes = [2] if stack.shape[1] == 1 else [1, 2]
    cov = np.zeros(max_lag + 1)
    for lag in range(max_lag + 1):
        vals = []
        for ax in axes:
            n = d.shape[ax]
            a = np.take(d, np.arange(0, n - lag), axis=ax)
            b = np.take(d, np.arange(lag, n), axis=ax)
            vals.append(np.mean(a * b))
        cov[lag] = np.mean(vals)
    return cov / cov[0]


def autocovariance_width(ensemble, pitch, max_lag=None):
    """Full width (m) at which the intensity autocovariance falls to 1/e."""
    stack = ensemble.intensities if isinstance(ensemble, FrameEnsemble) else np.asarray(ensemble)
    if max_lag is None:
        max_lag = min(64, stack.shape[2] // 4)
    c = intensity_autocovariance(stack, max_lag)
    below = np.nonzero(c < math.exp(-1))[0]
    if below.size == 0:
        raise InsufficientSamples("autocovariance never drops below 1/e within max_lag")
    k = int(below[0])
    target = math.exp(-1)
    half = (k - 1) + (c[k - 1] - target) / (c[k - 1] - c[k])
    return 2 * half * pitch
