"""Fourth-order images with one, two or three reference factors.

The bucket signal sums over the whole object and fluctuates little; the
reference pixel does not. Putting more of the order on the bucket side
(larger n) gives a quieter image. About five seconds.
"""
# %%
from ghostimg import core, engine, metrics
from ghostimg.core import default_config

cfg = default_config(nx=64, ny=64, seed=3)
mask = core.make_glyph(cfg)
orders = [(4, 1), (4, 2), (4, 3)]
res = engine.simulate(cfg, [mask], orders, 5_000, blocks=10)

# %%
print(f"glyph covers M_obj = {metrics.m_obj(mask, cfg):.1f} coherence areas")
print(" N  n   fluctuation  fidelity  visibility")
for o in orders:
    img = res.image(o)
    fl = metrics.block_fluctuation(res.block_images[(0, img.order)])
    print(f" 4  {o[1]}   {fl:11.4f}  {metrics.fidelity(img, mask):8.3f}  "
          f"{metrics.visibility(img, mask, cfg).v:10.4f}")
