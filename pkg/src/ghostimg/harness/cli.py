"""``ghost`` command line entry point."""

import argparse
import math
import sys

from .. import core, correlate, metrics, speckle
from ..errors import GhostError
from . import config, scenarios


def _cmd_run(args):
    with open(args.config, encoding="utf-8") as fh:
        spec = config.parse_config(fh.read())
    changes = {}
    if args.seed is not None:
        changes["config"] = spec.config.replace(seed=args.seed)
    if args.frames is not None:
        if args.frames < config.MIN_FRAMES:
            raise config.RangeError(f"--frames must be >= {config.MIN_FRAMES}")
        changes["frames"] = args.frames
    if args.out is not None:
        changes["output_dir"] = args.out
    if args.threads is not None:
        changes["threads"] = args.threads
    if args.bit_exact:
        changes["bit_exact"] = True
    spec = spec.replace(**changes)
    manifest = scenarios.run_scenario(spec)
    print(f"wrote {len(manifest.files)} files to {spec.output_dir} "
          f"in {manifest.wall_time:.1f} s (manifest: {manifest.path})")


def _cmd_nfactorial(args):
    cfg = core.default_config(seed=args.seed)
    stride = math.ceil(cfg.coherence_length / cfg.pitch)
    per_frame = math.ceil(cfg.ny / stride) * math.ceil(cfg.nx / stride)
    frames = max(1, math.ceil(args.samples / per_frame))
    samples = speckle.sample_pixels(speckle.generate_ensemble(cfg, frames), stride)
    print(f"{samples.size} samples from {frames} frames")
    print("N  g_measured  N!  relative_error")
    for N in range(2, args.max_order + 1):
        g = correlate.g_same_point(samples, N)
        print(f"{N}  {g:.4f}  {math.factorial(N)}  {g / math.factorial(N) - 1:+.4f}")
    if samples.size >= 10_000:
        print(f"KS distance to exponential: {speckle.exponential_fit_test(samples):.4f}")


def _cmd_psf(args):
    try:
        N, n = (int(v) for v in args.order.split(","))
    except ValueError:
        raise config.ConfigError(f"--order must look like N,n, got {args.order!r}") from None
    order = core.CorrelationOrder(N, n)
    cfg = core.default_config(nx=args.grid, ny=args.grid, seed=args.seed)
    rep = metrics.psf_fwhm(cfg, order, frames=args.frames)
    print(f"order {N},{n}: FWHM = {rep.fwhm:.4e} m = {rep.fwhm / cfg.coherence_length:.3f} "
          f"coherence lengths ({args.frames} frames)")


def build_parser():
    p = argparse.ArgumentParser(prog="ghost", description="Arbitrary-order ghost imaging simulator")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a scenario file")
    r.add_argument("config")
    r.add_argument("--seed", type=int)
    r.add_argument("--frames", type=int)
    r.add_argument("--out")
    r.add_argument("--threads", type=int)
    r.add_argument("--bit-exact", action="store_true")
    r.set_defaults(func=_cmd_run)

    c = sub.add_parser("check-nfactorial", help="same-point moments of generated speckle")
    c.add_argument("--samples", type=int, default=200_000)
    c.add_argument("--max-order", type=int, default=4)
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=_cmd_nfactorial)

    f = sub.add_parser("psf", help="width of a pinhole reconstruction")
    f.add_argument("--order", required=True, help="N,n")
    f.add_argument("--frames", type=int, default=100_000)
    f.add_argument("--grid", type=int, default=32)
    f.add_argument("--seed", type=int, default=0)
    f.set_defaults(func=_cmd_psf)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (GhostError, OSError) as exc:
        print(f"ghost: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
