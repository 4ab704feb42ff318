"""Normalized arbitrary-order intensity correlations.

The ghost image of order ``(N, n)`` at reference pixel ``y`` is

    gamma(y) = < (s/<s>)**n * (i(y)/<i(y)>)**(N-n) >

with ``s`` the bucket signal and ``i`` the reference-camera frame. Splitting
each signal into ``n`` (or ``N - n``) equal parts before multiplying, as an
N-detector measurement would, changes numerator and denominator by the same
constant, so it is left out.

Everything is evaluated in two passes: the means first, then the average of
the mean-normalized products. Raw moments are never formed; at ``N = 20`` they
overflow double precision for realistic intensity scales.
"""

from dataclasses import dataclass, replace
import enum

import numpy as np

from .core import CorrelationOrder
from .errors import (AllZeroImage, EmptyEnsemble, IncompatibleAccumulators, LengthMismatch,
                     PassOrderViolation, TooFewFrames, ZeroMean, ZeroMeanPixel)

_CHUNK_ELEMENTS = 2 ** 22


@dataclass(frozen=True, eq=False)
class GhostImage:
    gamma: np.ndarray
    order: CorrelationOrder
    frames_used: int

    def __post_init__(self):
        g = np.asarray(self.gamma, dtype=float)
        if not np.all(np.isfinite(g)):
            raise ValueError("gamma contains non-finite values")
        if self.frames_used < 2:
            raise TooFewFrames(f"a ghost image needs at least 2 frames, got {self.frames_used}")
        object.__setattr__(self, "gamma", g)

    @property
    def normalized(self):
        return normalize_image(self).gamma


def _as_order(order):
    if isinstance(order, CorrelationOrder):
        return order
    return CorrelationOrder(*order)


def _split_product(s_ratio, i_ratio, order):
    sp = s_ratio ** order.n
    ip = i_ratio ** order.reference_power
    return sp.reshape(sp.shape + (1,) * (ip.ndim - 1)) * ip


def _check_means(s_mean, i_mean):
    if not s_mean > 0:
        raise ZeroMean(f"mean bucket signal must be positive, got {s_mean!r}")
    bad = np.count_nonzero(~(i_mean > 0))
    if bad:
        raise ZeroMeanPixel(f"{bad} reference pixel(s) have non-positive mean intensity")


def gamma_image(buckets, ref_frames, order):
    """Ghost image of order `order` from paired bucket values and reference frames.

    Parameters
    ----------
    buckets : array_like or BucketSeries, shape (T,)
    ref_frames : array_like or FrameEnsemble, shape (T, ...)
    order : CorrelationOrder or (N, n)

    Raises
    ------
    LengthMismatch, ZeroMean, ZeroMeanPixel
    """
    order = _as_order(order)
    s = np.asarray(getattr(buckets, "s", buckets), dtype=float).ravel()
    frames = getattr(ref_frames, "intensities", ref_frames)
    frames = np.asarray(frames)
    if frames.shape[0] != s.size:
        raise LengthMismatch(f"{s.size} bucket values but {frames.shape[0]} frames")
    if s.size < 2:
        raise TooFewFrames(f"need at least 2 frames, got {s.size}")
    s_mean = s.mean()
    i_mean = frames.mean(axis=0, dtype=float)
    _check_means(s_mean, i_mean)
    total = np.zeros(frames.shape[1:])
    step = max(1, _CHUNK_ELEMENTS // max(1, i_mean.size))
    for k in range(0, s.size, step):
        total += _split_product(s[k:k + step] / s_mean, frames[k:k + step] / i_mean,
                                order).sum(axis=0)
    return GhostImage(total / s.size, order, s.size)


def g_same_point(samples, N):
    """Normalized same-point moment ``<I**N> / <I>**N``."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 2:
        raise TooFewFrames("need at least 2 samples")
    mean = x.mean()
    if not mean > 0:
        raise ZeroMean(f"sample mean must be positive, got {mean!r}")
    return float(np.mean((x / mean) ** N))


def normalize_image(img):
    """Divide by the maximum so the brightest pixel(s) are exactly 1."""
    peak = img.gamma.max()
    if not peak > 0:
        raise AllZeroImage("image maximum is not positive")
    g = img.gamma / peak
    g[img.gamma == peak] = 1.0
    return GhostImage(g, img.order, img.frames_used)


class Pass(enum.Enum):
    MEAN = "mean"
    CROSS = "cross"


@dataclass(frozen=True, eq=False)
class CorrAccumulator:
    """Mergeable running sums for one ghost image.

    A MEAN-pass accumulator collects ``sum(s)`` and ``sum(i)``. Calling
    :meth:`begin_cross` freezes the means and returns an empty CROSS-pass
    accumulator that collects ``sum((s/s_mean)**n * (i/i_mean)**(N-n))``.
    Every operation returns a new accumulator.
    """

    order: CorrelationOrder
    shape: tuple
    stage: Pass = Pass.MEAN
    count: int = 0
    sum_s: float = 0.0
    sum_i: np.ndarray = None
    s_mean: float = None
    i_mean: np.ndarray = None
    sum_cross: np.ndarray = None
    mean_count: int = 0

    @classmethod
    def empty(cls, order, shape):
        order = _as_order(order)
        shape = tuple(shape)
        return cls(order, shape, Pass.MEAN, 0, 0.0, np.zeros(shape))

    def begin_cross(self, order=None):
        """Freeze the means and start the cross-product pass (optionally at another order)."""
        if self.stage is not Pass.MEAN:
            raise PassOrderViolation("begin_cross called on an accumulator already in CROSS pass")
        if self.count == 0:
            raise EmptyEnsemble("no frames accumulated in the mean pass")
        s_mean = self.sum_s / self.count
        i_mean = self.sum_i / self.count
        _check_means(s_mean, i_mean)
        return CorrAccumulator(self.order if order is None else _as_order(order), self.shape,
                               Pass.CROSS, 0, 0.0, None, s_mean, i_mean, np.zeros(self.shape),
                               self.count)

    def with_means(self, s_mean, i_mean, order=None):
        """Empty CROSS-pass accumulator using externally supplied means."""
        i_mean = np.asarray(i_mean, dtype=float)
        _check_means(s_mean, i_mean)
        return CorrAccumulator(self.order if order is None else _as_order(order), self.shape,
                               Pass.CROSS, 0, 0.0, None, float(s_mean), i_mean,
                               np.zeros(self.shape), 0)

    def finalize(self):
        if self.stage is not Pass.CROSS:
            raise PassOrderViolation("finalize requires a CROSS-pass accumulator")
        if self.count == 0:
            raise EmptyEnsemble("no frames accumulated in the cross pass")
        return GhostImage(self.sum_cross / self.count, self.order, self.count)


def accumulate(acc, s, frames):
    """Add one frame (scalar `s`, 2-D `frames`) or a batch (``(k,)``, ``(k, ...)``)."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    frames = np.asarray(frames, dtype=float)
    if frames.shape == acc.shape:
        frames = frames[None]
    if frames.shape[1:] != acc.shape:
        raise LengthMismatch(f"frame shape {frames.shape[1:]} does not match {acc.shape}")
    if frames.shape[0] != s.size:
        raise LengthMismatch(f"{s.size} bucket values but {frames.shape[0]} frames")
    if acc.stage is Pass.MEAN:
        return replace(acc, count=acc.count + s.size, sum_s=acc.sum_s + float(s.sum()),
                       sum_i=acc.sum_i + frames.sum(axis=0))
    if acc.i_mean is None:
        raise PassOrderViolation("cross pass started without frozen means")
    cross = _split_product(s / acc.s_mean, frames / acc.i_mean, acc.order).sum(axis=0)
    return replace(acc, count=acc.count + s.size, sum_cross=acc.sum_cross + cross)


def merge(a, b):
    """Combine accumulators over disjoint frame sets."""
    if a.order != b.order or a.stage is not b.stage or a.shape != b.shape:
        raise IncompatibleAccumulators(
            f"cannot merge {a.stage.value}/{a.order}/{a.shape} with "
            f"{b.stage.value}/{b.order}/{b.shape}")
    if a.stage is Pass.MEAN:
        if b.count == 0:
            return a
        if a.count == 0:
            return b
        return replace(a, count=a.count + b.count, sum_s=a.sum_s + b.sum_s,
                       sum_i=a.sum_i + b.sum_i)
    if a.s_mean != b.s_mean or not np.array_equal(a.i_mean, b.i_mean):
        raise IncompatibleAccumulators("cross-pass accumulators were normalized by different means")
    if b.count == 0:
        return a
    if a.count == 0:
        return b
    return replace(a, count=a.count + b.count, sum_cross=a.sum_cross + b.sum_cross)
