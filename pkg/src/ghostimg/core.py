"""Geometry, sampling grid and object masks shared by the whole package.

Lengths are in metres throughout. Arrays are indexed ``[row, column]`` which
is ``[y, x]``; a one-dimensional scenario is simply a grid with ``ny == 1``.
"""

from dataclasses import dataclass, replace
import math

import numpy as np

from . import pgm
from .errors import (DimensionMismatch, GeometryTooLargeForGrid, InvalidGeometry,
                     InvalidOrder, NonPositiveParameter, UndersampledGrid)

#: minimum number of pixels per transverse coherence length
MIN_PIXELS_PER_COHERENCE = 3

nm = 1e-9
um = 1e-6
mm = 1e-3


@dataclass(frozen=True)
class OpticalConfig:
    """Source/arm geometry and the sampling grid of both detector planes.

    Construction validates every invariant, so an instance in hand is always
    usable. Use :func:`default_config` to get a grid sampled at a quarter of
    the coherence length.
    """

    wavelength: float
    source_diameter: float
    z1: float
    z2: float
    z3: float = 0.0
    pitch: float = 10 * um
    nx: int = 256
    ny: int = 256
    mean_intensity: float = 1.0
    seed: int = 0

    def __post_init__(self):
        validate_config(self)

    @property
    def coherence_length(self):
        return self.wavelength * self.z1 / self.source_diameter

    @property
    def shape(self):
        return (self.ny, self.nx)

    def replace(self, **changes):
        return replace(self, **changes)


def validate_config(cfg):
    """Check the invariants of `cfg` and return it unchanged.

    Raises
    ------
    NonPositiveParameter
        A length, the mean intensity or a grid dimension is not positive, or
        the seed is outside the unsigned 64-bit range.
    UndersampledGrid
        Fewer than three pixels per coherence length ``wavelength * z1 / D``.
    """
    for name in ("wavelength", "source_diameter", "z1", "z2", "pitch", "mean_intensity"):
        value = getattr(cfg, name)
        if not (math.isfinite(value) and value > 0):
            raise NonPositiveParameter(f"{name} must be positive and finite, got {value!r}")
    if not (math.isfinite(cfg.z3) and cfg.z3 >= 0):
        raise NonPositiveParameter(f"z3 must be >= 0, got {cfg.z3!r}")
    for name in ("nx", "ny"):
        value = getattr(cfg, name)
        if int(value) != value or value < 1:
            raise NonPositiveParameter(f"{name} must be a positive integer, got {value!r}")
    if int(cfg.seed) != cfg.seed or not 0 <= cfg.seed < 2**64:
        raise NonPositiveParameter(f"seed must be an unsigned 64-bit integer, got {cfg.seed!r}")
    lc = cfg.wavelength * cfg.z1 / cfg.source_diameter
    if cfg.pitch > lc / MIN_PIXELS_PER_COHERENCE:
        raise UndersampledGrid(
            f"pitch {cfg.pitch:.3e} m exceeds coherence length / {MIN_PIXELS_PER_COHERENCE}"
            f" = {lc / MIN_PIXELS_PER_COHERENCE:.3e} m")
    return cfg


def default_config(wavelength=532 * nm, source_diameter=3 * mm, z1=240 * mm, z2=None,
                   z3=0.0, nx=256, ny=256, pixels_per_coherence=4, **kwargs):
    """Config with ``pitch = coherence_length / pixels_per_coherence``.

    The defaults are the 532 nm, 3 mm, 240 mm geometry of the character-mask
    experiment.
    """
    lc = wavelength * z1 / source_diameter
    return OpticalConfig(wavelength=wavelength, source_diameter=source_diameter, z1=z1,
                         z2=z1 if z2 is None else z2, z3=z3, pitch=lc / pixels_per_coherence,
                         nx=nx, ny=ny, **kwargs)


def coherence_area(cfg):
    """Transverse coherence area ``(wavelength * z1 / D) ** 2`` in m^2."""
    return cfg.coherence_length ** 2


@dataclass(frozen=True)
class CorrelationOrder:
    """Total order `N` split into `n` bucket factors and ``N - n`` reference factors."""

    N: int
    n: int

    def __post_init__(self):
        if int(self.N) != self.N or int(self.n) != self.n:
            raise InvalidOrder(f"order must be integral, got N={self.N!r}, n={self.n!r}")
        if self.N < 2:
            raise InvalidOrder(f"N must be >= 2, got {self.N}")
        if not 1 <= self.n <= self.N - 1:
            raise InvalidOrder(f"n must be in [1, N-1] = [1, {self.N - 1}], got {self.n}")

    @property
    def reference_power(self):
        return self.N - self.n

    def __str__(self):
        return f"N{self.N}n{self.n}"


@dataclass(frozen=True, eq=False)
class ObjectMask:
    """Field transmission amplitude ``T`` of the object, sampled on the grid."""

    t: np.ndarray

    def __post_init__(self):
        t = np.array(self.t, dtype=float, copy=True)
        if t.ndim != 2:
            raise DimensionMismatch(f"mask must be 2-D, got shape {t.shape}")
        if not np.all(np.isfinite(t)) or t.min() < 0 or t.max() > 1:
            raise InvalidGeometry("mask amplitudes must lie in [0, 1]")
        t.setflags(write=False)
        object.__setattr__(self, "t", t)

    @property
    def shape(self):
        return self.t.shape

    @property
    def power(self):
        """Intensity transmission ``|T|^2``."""
        return self.t ** 2

    def support(self, threshold=0.5):
        return self.power > threshold

    def check_grid(self, cfg):
        if self.shape != cfg.shape:
            raise DimensionMismatch(f"mask shape {self.shape} does not match grid {cfg.shape}")


def _place(length, count, center):
    start = int(round(center - count / 2))
    return start, start + count


def make_rect(cfg, width, height=None, center=(0.0, 0.0)):
    """Binary rectangle of the given physical size; `center` is an offset in metres."""
    wpx = max(1, int(round(width / cfg.pitch)))
    hpx = 1 if cfg.ny == 1 else max(1, int(round((width if height is None else height) / cfg.pitch)))
    cy = cfg.ny / 2 + center[0] / cfg.pitch
    cx = cfg.nx / 2 + center[1] / cfg.pitch
    y0, y1 = _place(cfg.ny, hpx, cy)
    x0, x1 = _place(cfg.nx, wpx, cx)
    if y0 < 0 or x0 < 0 or y1 > cfg.ny or x1 > cfg.nx:
        raise GeometryTooLargeForGrid(f"rectangle {hpx}x{wpx} px does not fit grid {cfg.shape}")
    t = np.zeros(cfg.shape)
    t[y0:y1, x0:x1] = 1.0
    return ObjectMask(t)


def make_pinhole(cfg):
    """Single transmitting pixel at the grid centre."""
    t = np.zeros(cfg.shape)
    t[cfg.ny // 2, cfg.nx // 2] = 1.0
    return ObjectMask(t)


def make_double_slit(cfg, slit_width, separation, slit_height=None):
    """Two bars of width `slit_width` whose centres are `separation` apart.

    Slits are vertical (extended along y). On a one-row grid the height is
    ignored; otherwise ``slit_height=None`` means the full grid height.
    """
    if separation <= slit_width:
        raise InvalidGeometry(
            f"slit separation {separation!r} must exceed slit width {slit_width!r}")
    wpx = max(1, int(round(slit_width / cfg.pitch)))
    dpx = int(round(separation / cfg.pitch))
    if dpx <= wpx:
        raise InvalidGeometry("slits overlap after quantization to the grid")
    if cfg.ny == 1:
        hpx = 1
    elif slit_height is None:
        hpx = cfg.ny
    else:
        hpx = max(1, int(round(slit_height / cfg.pitch)))
    left = int(round(cfg.nx / 2 - dpx / 2 - wpx / 2))
    right = left + dpx
    y0, y1 = _place(cfg.ny, hpx, cfg.ny / 2)
    if left < 0 or right + wpx > cfg.nx or y0 < 0 or y1 > cfg.ny:
        raise GeometryTooLargeForGrid(
            f"double slit ({wpx} px wide, {dpx} px apart, {hpx} px high) exceeds grid {cfg.shape}")
    t = np.zeros(cfg.shape)
    t[y0:y1, left:left + wpx] = 1.0
    t[y0:y1, right:right + wpx] = 1.0
    return ObjectMask(t)


# Stroke skeleton of a stand-in for the character "light" (unit box, y down).
_GLYPH_STROKES = (
    ((0.50, 0.04), (0.50, 0.36)),
    ((0.22, 0.10), (0.31, 0.30)),
    ((0.78, 0.10), (0.69, 0.30)),
    ((0.06, 0.42), (0.94, 0.42)),
    ((0.38, 0.42), (0.36, 0.68)),
    ((0.36, 0.68), (0.10, 0.94)),
    ((0.62, 0.42), (0.62, 0.90)),
    ((0.62, 0.90), (0.92, 0.90)),
    ((0.92, 0.90), (0.92, 0.74)),
)


def make_glyph(cfg, size=0.8, stroke=0.085):
    """Stand-in mask for the character "light" built from thick line strokes.

    `size` is the glyph box as a fraction of the smaller grid side and
    `stroke` the stroke width as a fraction of the box.
    """
    if cfg.ny < 8 or cfg.nx < 8:
        raise GeometryTooLargeForGrid(f"glyph needs at least 8x8 pixels, grid is {cfg.shape}")
    box = size * min(cfg.nx, cfg.ny)
    y, x = np.mgrid[0:cfg.ny, 0:cfg.nx].astype(float)
    u = (x + 0.5 - (cfg.nx - box) / 2) / box
    v = (y + 0.5 - (cfg.ny - box) / 2) / box
    hit = np.zeros(cfg.shape, dtype=bool)
    for (ax, ay), (bx, by) in _GLYPH_STROKES:
        dx, dy = bx - ax, by - ay
        frac = np.clip(((u - ax) * dx + (v - ay) * dy) / (dx * dx + dy * dy), 0.0, 1.0)
        dist = np.hypot(u - ax - frac * dx, v - ay - frac * dy)
        hit |= dist <= stroke / 2
    return ObjectMask(hit.astype(float))


def load_mask_pgm(path, cfg=None):
    """Read a P5 file as a transmission mask, gray level / maxval -> amplitude."""
    gray, maxval = pgm.read_pgm(path)
    mask = ObjectMask(gray / maxval)
    if cfg is not None:
        mask.check_grid(cfg)
    return mask


def mask_area(mask, cfg, threshold=0.5):
    """Physical area (m^2) of the pixels with ``|T|^2 > threshold``."""
    return float(np.count_nonzero(mask.support(threshold))) * cfg.pitch ** 2
