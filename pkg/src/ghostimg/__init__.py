"""Simulation of arbitrary-order lensless ghost imaging with pseudothermal light.

Modules
-------
core        geometry, sampling grid, object masks
speckle     pseudothermal speckle frames with counter-based seeding
propagate   angular-spectrum propagation and direct imaging
detect      bucket signal and detector model
correlate   normalized N-th order correlation estimator and accumulators
metrics     visibility, coherent-cell count, peak width, fluctuation, fidelity
engine      streaming two-pass simulation shared by all of the above
harness     scenario files, frame files, scenario runs, ``ghost`` CLI
"""

__version__ = "0.1.0"

from .core import (CorrelationOrder, ObjectMask, OpticalConfig, coherence_area, default_config,
                   load_mask_pgm, make_double_slit, make_glyph, make_pinhole, make_rect,
                   validate_config)
from .correlate import (CorrAccumulator, GhostImage, accumulate, g_same_point, gamma_image,
                        merge, normalize_image)
from .engine import simulate

__all__ = [
    "CorrelationOrder", "ObjectMask", "OpticalConfig", "coherence_area", "default_config",
    "load_mask_pgm", "make_double_slit", "make_glyph", "make_pinhole", "make_rect",
    "validate_config", "CorrAccumulator", "GhostImage", "accumulate", "g_same_point",
    "gamma_image", "merge", "normalize_image", "simulate",
]
