"""Scenario runs: simulate, reconstruct and export images, profiles and summaries."""

from contextlib import contextmanager
from dataclasses import dataclass
import math
import os
import time

import numpy as np

from .. import __version__, core, correlate, engine, metrics, propagate, speckle
from ..errors import GhostError, StageError
from ..pgm import write_pgm
from . import fileio


@dataclass(frozen=True)
class RunManifest:
    spec: object
    seed: int
    files: tuple
    wall_time: float
    version: str
    path: str

    def check(self):
        """Every listed file exists and is non-empty."""
        return all(os.path.isfile(f) and os.path.getsize(f) > 0 for f in self.files)


@contextmanager
def stage(name):
    try:
        yield
    except StageError:
        raise
    except (GhostError, OSError, ValueError) as exc:
        raise StageError(name, exc) from exc


def build_mask(spec):
    """Object mask named by ``spec.mask_source`` (a builtin name or a PGM path)."""
    cfg = spec.config
    src = spec.mask_source
    if src == "builtin":
        src = "double_slit" if spec.scenario_id == "double_slit_1d" else "glyph"
    if src == "glyph":
        return core.make_glyph(cfg, size=spec.glyph_size, stroke=spec.glyph_stroke)
    if src == "double_slit":
        return core.make_double_slit(cfg, spec.slit_width, spec.slit_sep, spec.slit_height)
    if src == "pinhole":
        return core.make_pinhole(cfg)
    if src == "rect":
        return core.make_rect(cfg, spec.rect_width or cfg.coherence_length)
    if src == "none":
        return None
    return core.load_mask_pgm(src, cfg)


def profile_row(mask):
    """Row through the centroid of the support (row 0 for one-row grids)."""
    if mask.shape[0] == 1:
        return 0
    ys = np.nonzero(mask.support())[0]
    return int(round(ys.mean())) if ys.size else mask.shape[0] // 2


def _write_profile(path, cfg, row, values, mask):
    norm = values / values.max() if values.max() > 0 else values
    x = (np.arange(cfg.nx) - cfg.nx / 2) * cfg.pitch
    fileio.write_csv(path, ["pixel", "position_m", "value", "value_normalized", "transmission"],
                     zip(range(cfg.nx), x, values[row], norm[row], mask.power[row]))


def _config_entries(spec):
    cfg = spec.config
    return [("scenario_id", spec.scenario_id), ("seed", cfg.seed), ("frames", spec.frames),
            ("orders", " ".join(f"{o.N}:{o.n}" for o in spec.orders)),
            ("wavelength_m", repr(cfg.wavelength)), ("source_diameter_m", repr(cfg.source_diameter)),
            ("z1_m", repr(cfg.z1)), ("z2_m", repr(cfg.z2)), ("z3_m", repr(cfg.z3)),
            ("pitch_m", repr(cfg.pitch)), ("grid", f"{cfg.ny}x{cfg.nx}"),
            ("mean_intensity", repr(cfg.mean_intensity)), ("mask_source", spec.mask_source),
            ("bit_exact", spec.bit_exact), ("threads", spec.threads)]


def _run_ghost(spec, out):
    cfg = spec.config
    with stage("mask"):
        mask = build_mask(spec)
    with stage("simulate"):
        res = engine.simulate(cfg, [mask], spec.orders, spec.frames, blocks=spec.blocks,
                                detector=spec.detector, threads=spec.threads,
                                bit_exact=spec.bit_exact)
    files, rows = [], []
    row = profile_row(mask)
    with stage("export"):
        for o in spec.orders:
            img = res.image(o)
            tag = f"N{o.N}n{o.n}"
            pgm_path = os.path.join(out, f"ghost_{tag}.pgm")
            write_pgm(pgm_path, correlate.normalize_image(img).gamma)
            csv_path = os.path.join(out, f"cross_{tag}.csv")
            _write_profile(csv_path, cfg, row, img.gamma, mask)
            files += [pgm_path, csv_path]
            vis = metrics.visibility(img, mask, cfg)
            fluct = (metrics.block_fluctuation(res.block_images[(0, o)]) if spec.blocks
                     else math.nan)
            rows.append([o.N, o.n, img.frames_used, vis.v, vis.gamma_in, vis.gamma_out, fluct,
                         metrics.fidelity(img, mask)])
        summary = os.path.join(out, "summary.csv")
        fileio.write_csv(summary, ["N", "n", "frames", "visibility", "gamma_in", "gamma_out",
                                   "fluctuation", "fidelity"], rows)
        files.append(summary)
        mask_path = os.path.join(out, "mask.pgm")
        write_pgm(mask_path, mask.power)
        files.append(mask_path)
    extra = [("m_obj", repr(metrics.m_obj(mask, cfg)))]
    return files, extra


def _run_direct(spec, out):
    cfg = spec.config
    z_values = spec.z3_list or (0.0, cfg.z3)
    with stage("mask"):
        mask = build_mask(spec)
    with stage("propagate"):
        images = propagate.direct_images(cfg, mask, z_values, spec.frames)
    files, rows = [], []
    row = profile_row(mask)
    with stage("export"):
        for z, img in zip(z_values, images):
            tag = f"z{z * 1e3:g}mm"
            pgm_path = os.path.join(out, f"direct_{tag}.pgm")
            write_pgm(pgm_path, img / img.max())
            csv_path = os.path.join(out, f"cross_{tag}.csv")
            _write_profile(csv_path, cfg, row, img, mask)
            files += [pgm_path, csv_path]
            blur = z * cfg.source_diameter / (math.pi * cfg.z1)
            rows.append([z, spec.frames, blur, metrics.fidelity(img, mask)])
        summary = os.path.join(out, "summary.csv")
        fileio.write_csv(summary, ["z3_m", "frames", "blur_sigma_m", "fidelity"], rows)
        files.append(summary)
    return files, []


def _run_nfactorial(spec, out):
    cfg = spec.config
    stride = spec.sample_stride or max(1, math.ceil(cfg.coherence_length / cfg.pitch))
    with stage("speckle"):
        ens = speckle.generate_ensemble(cfg, spec.frames)
        samples = speckle.sample_pixels(ens, stride)
        ks = speckle.exponential_fit_test(samples)
        width = speckle.autocovariance_width(ens, cfg.pitch)
    rows = []
    for N in range(2, spec.max_order + 1):
        g = correlate.g_same_point(samples, N)
        rows.append([N, g, math.factorial(N), g / math.factorial(N) - 1])
    with stage("export"):
        path = os.path.join(out, "nfactorial.csv")
        fileio.write_csv(path, ["N", "g_measured", "N_factorial", "relative_error"], rows)
        stats_path = os.path.join(out, "speckle_stats.csv")
        fileio.write_csv(stats_path, ["metric", "value"],
                         [["samples", samples.size], ["ks_distance", ks],
                          ["autocovariance_width_m", width],
                          ["coherence_length_m", cfg.coherence_length]])
    return [path, stats_path], []


_RUNNERS = {"character2d": _run_ghost, "order_sweep_2d": _run_ghost,
            "fourth_order_n_sweep": _run_ghost, "double_slit_1d": _run_ghost,
            "direct_image": _run_direct, "nfactorial_check": _run_nfactorial}


def run_scenario(spec):
    """Run `spec`, write its outputs under ``spec.output_dir`` and return the manifest.

    Raises
    ------
    StageError
        Naming the stage (``output``, ``mask``, ``simulate``, ``propagate``,
        ``speckle`` or ``export``) that failed.
    """
    t0 = time.perf_counter()
    out = spec.output_dir
    with stage("output"):
        os.makedirs(out, exist_ok=True)
    files, extra = _RUNNERS[spec.scenario_id](spec, out)
    wall = time.perf_counter() - t0
    path = os.path.join(out, "manifest.txt")
    with stage("export"):
        fileio.write_manifest(path, _config_entries(spec) + extra
                              + [("version", __version__), ("wall_time_s", f"{wall:.3f}")],
                              files)
    manifest = RunManifest(spec, spec.config.seed, tuple(files), wall, __version__, path)
    if not manifest.check():
        raise StageError("export", OSError("a listed output file is missing or empty"))
    return manifest
