"""Without correlations, an extended source gives no image far from the object.

The direct intensity a short way behind the mask is a sharp shadow. Further
back, the angular spread of the source blurs it with a Gaussian of width
z*D/(pi*z1). The ghost image is formed at the reference plane instead and
does not depend on that distance. About thirty seconds.
"""
# %%
import math

from ghostimg import core, engine, metrics, propagate
from ghostimg.core import default_config, mm

cfg = default_config(nx=128, ny=128, seed=4, pixels_per_coherence=3)
mask = core.make_glyph(cfg, size=0.5)

# %%
zs = [0.0, 1 * mm, 5 * mm, 36 * mm]
images = propagate.direct_images(cfg, mask, zs, 2_000)
for z, img in zip(zs, images):
    blur = z * cfg.source_diameter / (math.pi * cfg.z1)
    print(f"z3 = {z * 1e3:5.1f} mm  blur sigma {blur * 1e6:6.1f} um  "
          f"fidelity {metrics.fidelity(img, mask):.3f}")

# %%
res = engine.simulate(cfg, [mask], [(2, 1), (6, 5)], 5_000)
for o in ((2, 1), (6, 5)):
    print(f"ghost image N={o[0]} n={o[1]}: fidelity {metrics.fidelity(res.image(o), mask):.3f}")
