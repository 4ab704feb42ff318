"""Pseudothermal speckle: grain size and intensity statistics.

Run with ``python3 demos/01_speckle_statistics.py``. Takes a few seconds.
"""
# %%
import math

from ghostimg import correlate, speckle
from ghostimg.core import coherence_area, default_config

cfg = default_config(nx=128, ny=128, seed=1)
print(f"coherence length {cfg.coherence_length * 1e6:.2f} um, "
      f"pitch {cfg.pitch * 1e6:.2f} um, coherence area {coherence_area(cfg) * 1e12:.0f} um^2")

# %% Grain size: the intensity autocovariance drops to 1/e over one coherence length.
ens = speckle.generate_ensemble(cfg, 200)
width = speckle.autocovariance_width(ens, cfg.pitch)
print(f"1/e width of the autocovariance: {width / cfg.coherence_length:.3f} coherence lengths")

# %% Pixels one grain apart are close to independent draws from a negative exponential,
# so <I^N>/<I>^N should come out as N!.
samples = speckle.sample_pixels(ens, 4)
print(f"{samples.size} samples, KS distance {speckle.exponential_fit_test(samples):.4f}")
for N in range(2, 6):
    g = correlate.g_same_point(samples, N)
    print(f"  N={N}: {g:8.2f}   N! = {math.factorial(N)}")

# %% Frames are addressed by (seed, index): any frame can be regenerated on its own.
again = speckle.generate_frame(cfg, 137).intensity
print("frame 137 regenerated bit for bit:", (again == ens.intensities[137]).all())
