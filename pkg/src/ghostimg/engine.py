"""Streaming two-arm ghost-imaging simulation.

Frames are produced in chunks, turned into bucket values for every mask and
fed to mergeable accumulators. The mean pass and the cross pass walk the same
frame indices; chunks are either kept from the first pass (when they fit the
cache budget) or regenerated bit for bit from their counter-based seeds.

Chunk boundaries never straddle a block boundary, so the per-block images
used for fluctuation estimates come out of the same two passes.
"""

from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field

import numpy as np

from . import correlate, detect, speckle
from .core import CorrelationOrder
from .errors import DimensionMismatch, TooFewFrames

DEFAULT_CACHE_BYTES = 768 * 2 ** 20


@dataclass
class SimulationResult:
    cfg: object
    masks: list
    orders: list
    frames: int
    start: int
    blocks: int
    images: dict = field(default_factory=dict)
    block_images: dict = field(default_factory=dict)
    bucket_mean: list = field(default_factory=list)
    reference_mean: np.ndarray = None

    def image(self, order, mask=0):
        return self.images[(mask, _order(order))]


def _order(order):
    return order if isinstance(order, CorrelationOrder) else CorrelationOrder(*order)


def _chunks(frames, chunk, blocks):
    """(offset, count, block) triples; block is None for the remainder frames."""
    out = []
    block_len = frames // blocks if blocks else 0
    bounds = sorted({0, frames, *range(0, frames, chunk),
                     *(b * block_len for b in range(1, blocks + 1) if blocks)})
    for a, b in zip(bounds[:-1], bounds[1:]):
        if b <= a:
            continue
        blk = a // block_len if blocks and a < blocks * block_len else None
        out.append((a, b - a, blk))
    return out


class _Source:
    def __init__(self, cfg, masks, start, detector, cache):
        self.cfg = cfg
        self.power = np.stack([m.power for m in masks])
        self.start = start
        self.detector = detector
        self.cache = {} if cache else None

    def get(self, offset, count):
        if self.cache is not None and offset in self.cache:
            return self.cache[offset]
        first = self.start + offset
        frames = speckle.generate_intensities(self.cfg, first, count)
        s = np.tensordot(frames, self.power, axes=([1, 2], [1, 2])).T * self.cfg.pitch ** 2
        if self.detector is not None and not self.detector.ideal:
            for k in range(count):
                rng = detect.detector_rng(self.cfg.seed, first + k)
                frames[k] = detect.apply_detector(frames[k], self.detector, rng).values
                for m in range(s.shape[0]):
                    s[m, k] = detect.apply_detector(s[m, k], self.detector, rng).values
        if self.cache is not None:
            self.cache[offset] = (frames, s)
        return frames, s


def _fold(total, part):
    return part if total is None else correlate.merge(total, part)


def simulate(cfg, masks, orders, frames, start=0, blocks=0, detector=None, threads=1,
             bit_exact=True, cache_bytes=DEFAULT_CACHE_BYTES, chunk=None):
    """Ghost images of every mask at every order from one shared frame stream.

    Parameters
    ----------
    cfg : OpticalConfig
    masks : sequence of ObjectMask
    orders : sequence of CorrelationOrder or (N, n)
    frames : int
        Number of frames, indices ``start .. start + frames - 1``.
    blocks : int
        If non-zero, also produce one image per contiguous block of
        ``frames // blocks`` frames (trailing remainder frames join only the
        full image).
    detector : DetectorModel, optional
        Applied to every bucket value and reference frame.
    threads : int
        Worker threads for chunk processing.
    bit_exact : bool
        Reduce chunk results in index order. Otherwise in completion order,
        which differs only by floating-point reassociation.
    """
    masks = list(masks)
    orders = [_order(o) for o in orders]
    if not masks or not orders:
        raise ValueError("at least one mask and one order are required")
    for m in masks:
        if m.shape != cfg.shape:
            raise DimensionMismatch(f"mask shape {m.shape} does not match grid {cfg.shape}")
    if frames < 2:
        raise TooFewFrames(f"need at least 2 frames, got {frames}")
    if blocks and frames // blocks < 2:
        raise TooFewFrames(f"{frames} frames cannot fill {blocks} blocks of >= 2 frames")
    chunk = chunk or speckle.chunk_size(cfg)
    plan = _chunks(frames, chunk, blocks)
    npix = cfg.nx * cfg.ny
    cache = frames * npix * 8 <= cache_bytes
    source = _Source(cfg, masks, start, detector, cache)
    shape = cfg.shape
    nm = len(masks)

    def run(fn, fold):
        """Apply `fn` to every chunk and fold the results, in plan order when bit_exact."""
        if threads <= 1:
            for i, p in enumerate(plan):
                fold(i, fn(p))
            return
        with ThreadPoolExecutor(threads) as pool:
            if bit_exact:
                for i, res in enumerate(pool.map(fn, plan)):
                    fold(i, res)
            else:
                futs = {pool.submit(fn, p): i for i, p in enumerate(plan)}
                for f in as_completed(futs):
                    fold(futs[f], f.result())

    empty = correlate.CorrAccumulator.empty(orders[0], shape)
    full_mean = [None] * nm
    block_mean = [[None] * blocks for _ in range(nm)]

    def mean_pass(p):
        offset, count, _ = p
        fr, s = source.get(offset, count)
        return [correlate.accumulate(empty, s[m], fr) for m in range(nm)]

    def mean_fold(i, res):
        blk = plan[i][2]
        for m in range(nm):
            full_mean[m] = _fold(full_mean[m], res[m])
            if blk is not None:
                block_mean[m][blk] = _fold(block_mean[m][blk], res[m])

    run(mean_pass, mean_fold)

    starts = [[full_mean[m].begin_cross(o) for o in orders] for m in range(nm)]
    block_starts = [[[block_mean[m][b].begin_cross(o) for o in orders] for b in range(blocks)]
                    for m in range(nm)]
    no = len(orders)
    full_cross = [[None] * no for _ in range(nm)]
    block_cross = [[[None] * no for _ in range(blocks)] for _ in range(nm)]

    def cross_pass(p):
        offset, count, blk = p
        fr, s = source.get(offset, count)
        full = [[correlate.accumulate(starts[m][k], s[m], fr) for k in range(no)]
                for m in range(nm)]
        part = None
        if blk is not None:
            part = [[correlate.accumulate(block_starts[m][blk][k], s[m], fr) for k in range(no)]
                    for m in range(nm)]
        return full, part

    def cross_fold(i, res):
        blk = plan[i][2]
        full, part = res
        for m in range(nm):
            for k in range(no):
                full_cross[m][k] = _fold(full_cross[m][k], full[m][k])
                if blk is not None:
                    block_cross[m][blk][k] = _fold(block_cross[m][blk][k], part[m][k])

    run(cross_pass, cross_fold)

    out = SimulationResult(cfg, masks, orders, frames, start, blocks)
    for m in range(nm):
        for k, o in enumerate(orders):
            out.images[(m, o)] = full_cross[m][k].finalize()
            if blocks:
                out.block_images[(m, o)] = [block_cross[m][b][k].finalize()
                                            for b in range(blocks)]
        out.bucket_mean.append(full_mean[m].sum_s / full_mean[m].count)
    out.reference_mean = full_mean[0].sum_i / full_mean[0].count
    return out
