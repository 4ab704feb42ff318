"""Double slit seen through correlations of increasing order.

Five orders with n = N/2 share one stream of 20 000 frames. Visibility climbs
with N while the fringe-free slit image stays put. About ten seconds.
"""
# %%
import numpy as np

from ghostimg import core, engine, metrics
from ghostimg.core import OpticalConfig, mm, nm, um

cfg = OpticalConfig(wavelength=441.6 * nm, source_diameter=1 * mm, z1=354 * mm, z2=354 * mm,
                    pitch=10 * um, nx=4096, ny=1, seed=0)
mask = core.make_double_slit(cfg, 150 * um, 570 * um)
orders = [(N, N // 2) for N in (2, 4, 6, 8, 10)]
res = engine.simulate(cfg, [mask], orders, 20_000)

# %%
print(f"coherence length {cfg.coherence_length * 1e6:.0f} um, slits 150 um wide, 570 um apart")
print(" N  n   visibility  gamma_in  gamma_out")
for o in orders:
    rep = metrics.visibility(res.image(o), mask, cfg)
    print(f"{o[0]:2d} {o[1]:2d}   {rep.v:9.3f}  {rep.gamma_in:8.3f}  {rep.gamma_out:8.3f}")

# %% A coarse text profile around the slits, normalized to the peak.
c = cfg.nx // 2
for o in (orders[0], orders[-1]):
    g = res.image(o).normalized[0, c - 60:c + 60:4]
    bars = "".join(" .:-=+*#%@"[min(9, int(v * 9.99))] for v in np.clip(g, 0, 1))
    print(f"N={o[0]:2d} |{bars}|")
