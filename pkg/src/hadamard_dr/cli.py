"""Command line interface.

Exit codes: 0 success, 2 invalid input, 3 solver stopped at --max-iter.
Pixel coordinates printed by the CLI are 1-based (row, column).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import data as D
from .image import read_mimg, read_pgm, write_mimg
from .manifolds import KINDS, ManifoldError
from .proximal import KarcherConfig
from .rof import SOLVERS, denoise, functional_value, inpainting_mask
from .solvers import SolverConfig

EXIT_OK, EXIT_INVALID, EXIT_NONCONVERGED = 0, 2, 3


class InvalidInput(Exception):
    pass


def _load_scalar(path) -> np.ndarray:
    p = Path(path)
    if p.suffix == ".npy":
        return np.load(p)
    if p.suffix in (".pgm", ".pnm"):
        return read_pgm(p)
    return np.loadtxt(p, ndmin=2)


def _load_mask(path) -> np.ndarray:
    p = Path(path)
    if p.suffix == ".mimg":
        img = read_mimg(p)
        return img.known
    return _load_scalar(p) != 0


def _solver_args(p):
    p.add_argument("--alpha", type=float, default=0.2, help="TV weight")
    p.add_argument("--eta", type=float, default=0.5, help="proximal parameter")
    p.add_argument("--lambda", dest="lam", type=float, default=0.9, help="relaxation in (0, 1]")
    p.add_argument("--eps", type=float, default=1e-6, help="stop when d(x_r, x_r-1) < eps")
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--solver", choices=SOLVERS, default="pdra")
    p.add_argument("--trace", help="write the iteration trace as CSV")
    p.add_argument("--manifold", choices=KINDS, help="expected manifold kind of the input")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hadamard-dr", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="piecewise-constant phantom with tangent noise")
    p.add_argument("--manifold", choices=KINDS, default="hyperbolic")
    p.add_argument("--dim", type=int, help="n for euclidean/spd, d for hyperbolic")
    p.add_argument("--rows", type=int, default=16)
    p.add_argument("--cols", type=int)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mask", help="known-pixel mask file, or 'border' for the inpainting frame")
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("stensor", help="det-1 structure tensors of a gray image")
    p.add_argument("input", nargs="?", help=".npy/.pgm/.txt image; synthetic 64x64 if omitted")
    p.add_argument("--sigma", type=float, default=0.8)
    p.add_argument("--rho", type=float, default=0.35)
    p.add_argument("--noise", type=float, default=0.0, help="additive Gaussian noise std")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-det1", action="store_true", help="keep the raw P(2) tensors")
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("gaussml", help="(mu, sigma) image from a stack of m gray images")
    p.add_argument("input", nargs="?", help=".npy array of shape (m, N, M)")
    p.add_argument("--synthetic", type=int, metavar="M", help="simulate M noisy frames instead")
    p.add_argument("--size", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)

    for name, help_ in (("denoise", "minimize the ROF functional"), ("inpaint", "ROF with missing pixels")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("input")
        p.add_argument("-o", "--output", required=True)
        p.add_argument("--mask", help="known-pixel mask (.npy/.pgm/.txt nonzero = known, or .mimg)")
        p.add_argument("--seed", type=int, help="accepted for symmetry with synth; the solvers are deterministic")
        _solver_args(p)

    p = sub.add_parser("eval", help="functional value of an image for given data")
    p.add_argument("input", help="candidate image u")
    p.add_argument("--data", help="data image f (defaults to input)")
    p.add_argument("--alpha", type=float, default=0.2)
    p.add_argument("--mask")

    p = sub.add_parser("export", help="scalar channel as PGM + JSON sidecar")
    p.add_argument("input")
    p.add_argument("--channel", required=True, choices=("mean", "std", "anisotropy", "trace"))
    p.add_argument("-o", "--output", required=True)
    return ap


def _cmd_synth(a):
    cols = a.cols or a.rows
    img = D.add_tangent_noise(D.phantom(a.manifold, a.rows, cols, a.dim), a.noise, a.seed)
    if a.mask == "border":
        img.mask = inpainting_mask(a.rows, cols)
    elif a.mask:
        img.mask = _load_mask(a.mask).reshape(a.rows, cols)
    write_mimg(img, a.output)
    return EXIT_OK


def _cmd_stensor(a):
    img = _load_scalar(a.input) if a.input else D.synthetic_scalar_image(64)
    if a.noise:
        img = img + a.noise * np.random.default_rng(a.seed).standard_normal(img.shape)
    cfg = D.StructureTensorConfig(a.sigma, a.rho, not a.no_det1)
    out = D.structure_tensor(img, cfg)
    write_mimg(out, a.output)
    excluded = int((~out.known).sum())
    if excluded:
        print(f"{excluded} singular pixels excluded from the data set", file=sys.stderr)
    return EXIT_OK


def _cmd_gaussml(a):
    if a.input:
        stack = np.load(a.input)
    elif a.synthetic:
        i, j = np.mgrid[0 : a.size, 0 : a.size]
        mean = 0.5 + 0.3 * (i > a.size // 2)
        std = 0.05 + 0.1 * (j > a.size // 2)
        stack = D.noisy_stack(mean, std, a.synthetic, a.seed)
    else:
        raise InvalidInput("gaussml needs an input stack or --synthetic M")
    write_mimg(D.gaussian_ml_image(stack), a.output)
    return EXIT_OK


def _restore(a, inpaint: bool):
    img = read_mimg(a.input)
    if a.manifold and a.manifold != img.kind:
        raise InvalidInput(f"input is {img.kind}, expected {a.manifold}")
    if a.mask:
        img.mask = _load_mask(a.mask).reshape(img.shape)
    if inpaint and img.mask is None:
        raise InvalidInput("inpaint needs a mask (in the file or via --mask)")
    img.validate()
    cfg = SolverConfig(
        eta=a.eta, lam=a.lam, eps=a.eps, max_iter=a.max_iter, karcher=KarcherConfig()
    )
    u, trace, _ = denoise(img, a.alpha, a.solver, cfg)
    write_mimg(u, a.output)
    if a.trace:
        trace.to_csv(a.trace)
    last = trace.functional[-1] if trace.functional else float("nan")
    print(
        json.dumps(
            {
                "solver": a.solver,
                "iterations": trace.iterations,
                "reason": trace.reason,
                "functional": last,
                "eps": trace.eps[-1] if trace.eps else None,
            }
        )
    )
    return EXIT_OK if trace.converged else EXIT_NONCONVERGED


def _cmd_eval(a):
    u = read_mimg(a.input)
    f = read_mimg(a.data) if a.data else u
    if a.mask:
        f.mask = _load_mask(a.mask).reshape(f.shape)
    if f.kind != u.kind or f.shape != u.shape:
        raise InvalidInput("data and candidate images differ in kind or size")
    print(f"{functional_value(f, u, a.alpha):.12g}")
    return EXIT_OK


def _cmd_export(a):
    img = read_mimg(a.input)
    meta = D.export_field(img, a.channel, a.output)
    print(json.dumps(meta))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "synth": _cmd_synth,
        "stensor": _cmd_stensor,
        "gaussml": _cmd_gaussml,
        "denoise": lambda a: _restore(a, False),
        "inpaint": lambda a: _restore(a, True),
        "eval": _cmd_eval,
        "export": _cmd_export,
    }
    try:
        return handlers[args.command](args)
    except (InvalidInput, ManifoldError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
