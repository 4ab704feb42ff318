import numpy as np
import pytest

from ghostimg import core, engine, metrics, propagate
from ghostimg.core import CorrelationOrder, OpticalConfig, default_config, mm, nm, um

SLIT_ORDERS = [CorrelationOrder(N, N // 2) for N in (2, 4, 6, 8, 10)]
GLYPH_ORDERS = [CorrelationOrder(*o) for o in ((4, 1), (4, 2), (4, 3), (2, 1), (6, 5), (10, 9))]
PINHOLE_ORDERS = [CorrelationOrder(N, N - 1) for N in (2, 4, 6)]

_acceptance = []


def slit_config(seed=0, nx=4096):
    return OpticalConfig(wavelength=441.6 * nm, source_diameter=1 * mm, z1=354 * mm,
                         z2=354 * mm, pitch=10 * um, nx=nx, ny=1, seed=seed)


@pytest.fixture
def report():
    """Record one acceptance line: report(criterion, passed, detail)."""
    def _rec(criterion, passed, detail):
        _acceptance.append((criterion, bool(passed), detail))
        return passed
    return _rec


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in _acceptance:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {criterion}: {detail}")


@pytest.fixture(scope="session")
def slit_runs():
    """Double slit, n = N/2, 20 000 frames, five seeds."""
    runs = []
    for seed in range(5):
        cfg = slit_config(seed)
        mask = core.make_double_slit(cfg, 150 * um, 570 * um)
        runs.append((cfg, mask, engine.simulate(cfg, [mask], SLIT_ORDERS, 20_000)))
    return runs


@pytest.fixture(scope="session")
def glyph_runs():
    """64x64 glyph, 5 000 frames, ten seeds, ten fluctuation blocks."""
    runs = []
    for seed in range(10):
        cfg = default_config(nx=64, ny=64, seed=100 + seed)
        mask = core.make_glyph(cfg)
        runs.append((cfg, mask, engine.simulate(cfg, [mask], GLYPH_ORDERS, 5_000, blocks=10)))
    return runs


@pytest.fixture(scope="session")
def pinhole_run():
    """Single-pixel object and a one-coherence-area square, 10^5 frames."""
    cfg = default_config(nx=32, ny=32, seed=11)
    masks = [core.make_pinhole(cfg), core.make_rect(cfg, cfg.coherence_length)]
    return cfg, masks, engine.simulate(cfg, masks, PINHOLE_ORDERS, 100_000)


@pytest.fixture(scope="session")
def mobj_run():
    """Squares covering 1, 10 and 100 coherence areas, N = 2, 10^5 frames."""
    cfg = default_config(nx=64, ny=64, seed=21, pixels_per_coherence=3)
    p = cfg.pitch
    masks = [core.make_rect(cfg, 3 * p), core.make_rect(cfg, 10 * p, 9 * p),
             core.make_rect(cfg, 30 * p)]
    return cfg, masks, engine.simulate(cfg, masks, [(2, 1)], 100_000)


DIRECT_NEAR = 1 * mm
DIRECT_FAR = 36 * mm


@pytest.fixture(scope="session")
def direct_run():
    cfg = default_config(nx=128, ny=128, seed=31, pixels_per_coherence=3)
    mask = core.make_glyph(cfg, size=0.5)
    images = propagate.direct_images(cfg, mask, [0.0, DIRECT_NEAR, DIRECT_FAR], 20_000)
    return cfg, mask, dict(zip((0.0, DIRECT_NEAR, DIRECT_FAR), images))


def visibilities(runs, orders):
    return np.array([[metrics.visibility(res.image(o), mask, cfg).v for o in orders]
                     for cfg, mask, res in runs])
