"""Bucket and pixel-array detection."""

from dataclasses import dataclass

import numpy as np

from . import speckle
from .errors import DimensionMismatch


@dataclass(frozen=True, eq=False)
class BucketSeries:
    """One bucket value per frame, in frame order."""

    s: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.s, dtype=float).ravel()
        if np.any(s < 0) or not np.all(np.isfinite(s)):
            raise ValueError("bucket values must be finite and non-negative")
        object.__setattr__(self, "s", s)

    def __len__(self):
        return self.s.size


@dataclass(frozen=True)
class DetectorModel:
    """Optional non-idealities; the default is an ideal linear detector.

    ``quant_bits`` of 0 disables quantization. When enabled the output is in
    ADC levels, ``full_scale`` (defaults to ``2**quant_bits - 1``) mapping to
    the top level.
    """

    shot_noise: bool = False
    read_noise_sigma: float = 0.0
    quant_bits: int = 0
    exposure_gain: float = 1.0
    full_scale: float = None

    def __post_init__(self):
        if self.read_noise_sigma < 0:
            raise ValueError("read_noise_sigma must be >= 0")
        if self.quant_bits not in (0, 8, 16):
            raise ValueError(f"quant_bits must be 0, 8 or 16, got {self.quant_bits}")
        if not self.exposure_gain > 0:
            raise ValueError("exposure_gain must be > 0")
        if self.full_scale is not None and not self.full_scale > 0:
            raise ValueError("full_scale must be > 0")

    @property
    def ideal(self):
        return (not self.shot_noise and self.read_noise_sigma == 0 and self.quant_bits == 0
                and self.exposure_gain == 1)


@dataclass(frozen=True, eq=False)
class Detection:
    values: np.ndarray
    saturated: int


def bucket_signal(frame, mask, pitch):
    """Transmitted power ``sum(I * |T|**2) * pitch**2``.

    `frame` may be a single ``(ny, nx)`` intensity or a ``(k, ny, nx)`` stack,
    in which case one value per frame is returned.
    """
    intensity = frame.intensity if isinstance(frame, speckle.SpeckleFrame) else np.asarray(frame)
    power = mask.power if hasattr(mask, "power") else np.abs(np.asarray(mask)) ** 2
    if intensity.shape[-2:] != power.shape:
        raise DimensionMismatch(f"frame {intensity.shape[-2:]} and mask {power.shape} differ")
    out = np.tensordot(intensity, power, axes=([-2, -1], [0, 1])) * pitch ** 2
    return float(out) if np.ndim(out) == 0 else out


def bucket_series(ensemble, mask, pitch):
    return BucketSeries(bucket_signal(ensemble.intensities, mask, pitch))


def detector_rng(seed, frame_index):
    """Noise stream for one frame, independent of the speckle stream."""
    return speckle.frame_rng(seed, frame_index, speckle.STREAM_DETECTOR)


def apply_detector(values, model, rng=None):
    """Gain, then shot noise, read noise and quantization as enabled.

    Returns a :class:`Detection` carrying the detected values and the number
    of samples clipped at zero or full scale.
    """
    x = np.asarray(values, dtype=float) * model.exposure_gain
    if model.shot_noise or model.read_noise_sigma > 0:
        if rng is None:
            raise ValueError("a random generator is required for noisy detection")
    if model.shot_noise:
        x = rng.poisson(np.clip(x, 0, None)).astype(float)
    if model.read_noise_sigma > 0:
        x = x + rng.normal(0.0, model.read_noise_sigma, size=x.shape)
    saturated = 0
    if model.quant_bits:
        top = 2 ** model.quant_bits - 1
        full = top if model.full_scale is None else model.full_scale
        levels = x * (top / full)
        saturated = int(np.count_nonzero(levels < 0) + np.count_nonzero(levels > top))
        x = np.rint(np.clip(levels, 0, top))
    return Detection(x if np.ndim(x) else float(x), saturated)
