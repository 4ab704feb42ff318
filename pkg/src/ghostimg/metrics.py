"""Figures of merit for ghost images."""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from . import correlate, engine
from .core import CorrelationOrder, coherence_area, make_pinhole
from .errors import (DimensionMismatch, EmptyRegion, PeakNotFound, TooFewFrames, ZeroVariance)

#: |T|^2 above this counts as inside the object
SUPPORT_THRESHOLD = 0.5


def _gamma(img):
    return img.gamma if isinstance(img, correlate.GhostImage) else np.asarray(img, dtype=float)


@dataclass(frozen=True)
class VisibilityReport:
    v: float
    gamma_in: float
    gamma_out: float
    order: CorrelationOrder = None
    frames_used: int = 0


@dataclass(frozen=True)
class ResolutionReport:
    fwhm: float
    order: CorrelationOrder = None


def regions(mask, cfg, guard=None):
    """Boolean (inside, outside) pixel sets.

    The outside set leaves out every pixel within `guard` metres (default one
    coherence length) of the support.
    """
    inside = mask.support(SUPPORT_THRESHOLD)
    guard = cfg.coherence_length if guard is None else guard
    if not inside.any():
        return inside, np.ones_like(inside)
    dist = ndimage.distance_transform_edt(~inside) * cfg.pitch
    return inside, dist > guard


def visibility(img, mask, cfg, guard=None):
    """Contrast ``(g_in - g_out) / (g_in + g_out)`` of the mean in/out gamma."""
    g = _gamma(img)
    if g.shape != mask.shape:
        raise DimensionMismatch(f"image {g.shape} and mask {mask.shape} differ")
    inside, outside = regions(mask, cfg, guard)
    if not inside.any() or not outside.any():
        raise EmptyRegion("visibility needs non-empty inside and outside regions")
    g_in = float(g[inside].mean())
    g_out = float(g[outside].mean())
    return VisibilityReport((g_in - g_out) / (g_in + g_out), g_in, g_out,
                            getattr(img, "order", None), getattr(img, "frames_used", 0))


def m_obj(mask, cfg):
    """Number of coherence areas covered by the object support."""
    area = np.count_nonzero(mask.support(SUPPORT_THRESHOLD)) * cfg.pitch ** 2
    return area / coherence_area(cfg)


def analysis_region(mask):
    """Bounding box of the object support as a pair of slices (whole grid if empty)."""
    ys, xs = np.nonzero(mask.support(SUPPORT_THRESHOLD))
    if ys.size == 0:
        return (slice(None), slice(None))
    return (slice(ys.min(), ys.max() + 1), slice(xs.min(), xs.max() + 1))


def fidelity(img, mask, region=None):
    """Pearson correlation between the max-normalized image and ``|T|^2``.

    Evaluated over `region` (slices), by default the bounding box of the
    support: far background correlates with any blurred copy of the object
    and would hide the loss of structure.
    """
    g = _gamma(img)
    if g.shape != mask.shape:
        raise DimensionMismatch(f"image {g.shape} and mask {mask.shape} differ")
    region = analysis_region(mask) if region is None else region
    peak = g.max()
    a = (g / peak if peak > 0 else g)[region].ravel()
    b = mask.power[region].ravel()
    if np.ptp(a) == 0 or np.ptp(b) == 0:
        raise ZeroVariance("fidelity is undefined for a constant image or mask")
    return float(np.corrcoef(a, b)[0, 1])


def block_fluctuation(block_images):
    """Pixel-averaged standard deviation of gamma across independent blocks."""
    stack = np.stack([_gamma(b) for b in block_images])
    if stack.shape[0] < 2:
        raise TooFewFrames("need at least two blocks")
    return float(np.std(stack, axis=0, ddof=1).mean())


def estimator_fluctuation(buckets, ref_frames, order, block_count):
    """Spread of the gamma estimator over `block_count` contiguous frame blocks.

    Each block gets its own means and its own image; the result is the mean
    over pixels of the across-block standard deviation. Frames past the last
    whole block are ignored.
    """
    s = np.asarray(getattr(buckets, "s", buckets), dtype=float).ravel()
    frames = np.asarray(getattr(ref_frames, "intensities", ref_frames))
    if block_count < 2:
        raise TooFewFrames("block_count must be >= 2")
    size = s.size // block_count
    if size < 2:
        raise TooFewFrames(f"{s.size} frames cannot fill {block_count} blocks of >= 2 frames")
    images = [correlate.gamma_image(s[b * size:(b + 1) * size], frames[b * size:(b + 1) * size],
                                    order) for b in range(block_count)]
    return block_fluctuation(images)


def profile_fwhm(profile, peak_index, plateau, pitch):
    """Full width at half height above `plateau`, by linear interpolation.

    Walks outwards from `peak_index` to the first sample at or below half
    height on each side.
    """
    p = np.asarray(profile, dtype=float)
    half = plateau + (p[peak_index] - plateau) / 2

    def edge(step):
        k = peak_index
        while 0 <= k + step < p.size and p[k + step] > half:
            k += step
        if not 0 <= k + step < p.size:
            raise PeakNotFound("peak does not fall to half height inside the profile")
        # fraction of the way from k to k + step where the profile crosses half
        return k + step * (p[k] - half) / (p[k] - p[k + step])

    return (edge(1) - edge(-1)) * pitch


def image_fwhm(img, cfg, peak=None, sigmas=3.0):
    """FWHM of the correlation peak of a pinhole reconstruction.

    The plateau is the mean over pixels more than three coherence lengths from
    the peak; the width is measured along the row through the peak.
    """
    g = _gamma(img)
    if peak is None:
        peak = (cfg.ny // 2, cfg.nx // 2)
    yy, xx = np.indices(g.shape)
    far = np.hypot(yy - peak[0], xx - peak[1]) * cfg.pitch > 3 * cfg.coherence_length
    if not far.any():
        raise EmptyRegion("grid too small to estimate the plateau")
    plateau = float(g[far].mean())
    noise = float(g[far].std())
    if g[peak] - plateau < sigmas * noise:
        raise PeakNotFound(f"peak {g[peak] - plateau:.3g} above plateau is below "
                           f"{sigmas} x scatter {noise:.3g}")
    return ResolutionReport(profile_fwhm(g[peak[0]], peak[1], plateau, cfg.pitch),
                            getattr(img, "order", None))


def psf_fwhm(cfg, order, frames=100_000, **kwargs):
    """Simulate a single-pixel object at `order` and measure the peak width."""
    if not isinstance(order, CorrelationOrder):
        order = CorrelationOrder(*order)
    res = engine.simulate(cfg, [make_pinhole(cfg)], [order], frames, **kwargs)
    return image_fwhm(res.image(order), cfg)

