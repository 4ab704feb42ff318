"""Scalar free-space propagation and direct (non-correlation) imaging."""

from dataclasses import dataclass
import functools
import math

import numpy as np
from scipy import fft as sfft

from . import speckle
from .errors import AliasedPropagation, DimensionMismatch, NonPositiveParameter


@dataclass(frozen=True, eq=False)
class ComplexField:
    field: np.ndarray
    pitch: float
    wavelength: float

    def __post_init__(self):
        f = np.asarray(self.field, dtype=complex)
        if f.ndim < 2:
            raise DimensionMismatch(f"field must be at least 2-D, got shape {f.shape}")
        if not np.all(np.isfinite(f)):
            raise ValueError("field contains non-finite values")
        object.__setattr__(self, "field", f)

    @property
    def intensity(self):
        return self.field.real ** 2 + self.field.imag ** 2

    def power(self):
        return float(np.sum(self.intensity) * self.pitch ** 2)


def check_sampling(shape, pitch, wavelength, z):
    """Raise AliasedPropagation unless ``wavelength * z / (N * pitch**2) <= 1``.

    `N` is the smallest grid dimension larger than one.
    """
    if z < 0:
        raise NonPositiveParameter(f"propagation distance must be >= 0, got {z!r}")
    sizes = [n for n in shape[-2:] if n > 1]
    if not sizes:
        return
    ratio = wavelength * z / (min(sizes) * pitch ** 2)
    if ratio > 1:
        raise AliasedPropagation(
            f"wavelength*z/(N*pitch^2) = {ratio:.3g} > 1; use a larger grid or shorter distance")


@functools.lru_cache(maxsize=32)
def transfer_function(shape, pitch, wavelength, z):
    """Angular-spectrum transfer function; evanescent components are zeroed."""
    fy = sfft.fftfreq(shape[0], d=pitch)
    fx = sfft.fftfreq(shape[1], d=pitch)
    arg = 1.0 / wavelength ** 2 - fy[:, None] ** 2 - fx[None, :] ** 2
    h = np.zeros(shape, dtype=complex)
    prop = arg >= 0
    h[prop] = np.exp(2j * math.pi * z * np.sqrt(arg[prop]))
    h.setflags(write=False)
    return h


def propagate_array(field, pitch, wavelength, z):
    """Propagate the last two axes of `field` by `z`; leading axes are a batch."""
    field = np.asarray(field, dtype=complex)
    check_sampling(field.shape, pitch, wavelength, z)
    if z == 0:
        return field.copy()
    h = transfer_function(field.shape[-2:], float(pitch), float(wavelength), float(z))
    spec = sfft.fft2(field, axes=(-2, -1))
    spec *= h
    return sfft.ifft2(spec, axes=(-2, -1), overwrite_x=True)


def angular_spectrum_propagate(f, z):
    """Exact transfer-function propagation of a sampled scalar field.

    Parameters
    ----------
    f : ComplexField
    z : float
        Distance in metres, ``z >= 0``.

    Raises
    ------
    AliasedPropagation
        If the transfer-function chirp is undersampled on this grid.
    """
    return ComplexField(propagate_array(f.field, f.pitch, f.wavelength, z), f.pitch, f.wavelength)


def direct_images(cfg, mask, z_values, frames, start=0):
    """Frame-averaged intensity behind the mask at each distance in `z_values`.

    The speckle field of each frame (the same realization the correlation path
    uses) is multiplied by the transmission ``T``, propagated and squared.

    `frames` is a frame count or a :class:`~ghostimg.speckle.FrameEnsemble`
    whose indices are reused (its seed must equal ``cfg.seed``).
    """
    mask.check_grid(cfg)
    if isinstance(frames, speckle.FrameEnsemble):
        if frames.seed != cfg.seed:
            raise ValueError("ensemble seed differs from cfg.seed; fields cannot be regenerated")
        indices = frames.indices
    else:
        indices = np.arange(start, start + int(frames))
    if indices.size == 0:
        raise ValueError("no frames")
    z_values = [float(z) for z in z_values]
    for z in z_values:
        check_sampling(cfg.shape, cfg.pitch, cfg.wavelength, z)
    sums = [np.zeros(cfg.shape) for _ in z_values]
    chunk = speckle.chunk_size(cfg)
    t = mask.t
    k = 0
    while k < indices.size:
        first = int(indices[k])
        run = 1
        # gather a contiguous run of indices
        while k + run < indices.size and run < chunk and indices[k + run] == first + run:
            run += 1
        field = speckle.generate_fields(cfg, first, run) * t
        for acc, z in zip(sums, z_values):
            out = propagate_array(field, cfg.pitch, cfg.wavelength, z)
            acc += np.sum(out.real ** 2 + out.imag ** 2, axis=0)
        k += run
    return [acc / indices.size for acc in sums]


def direct_image(cfg, mask, z3, frames, start=0):
    """Frame-averaged direct intensity image at distance `z3` behind the mask."""
    return direct_images(cfg, mask, [z3], frames, start)[0]
