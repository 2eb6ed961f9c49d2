"""Command-line front end.

Exit codes: 0 success, 1 a verification check failed, 2 refused parameters
(including caps), 3 I/O error such as a missing output directory.

Output goes to ``--out`` if given, otherwise into ``$FZSPEC_OUTPUT_DIR``
under a default file name if that variable is set, otherwise to stdout.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import conjecture_overlay, verification_suite
from .core import ComplexGrid
from .export import Layer, grid_csv, pgm_bytes, svg_text
from .finite_spectra import SIGMA_CAP, CapExceeded, PatternId, build_finite_matrix, sigma_n, sigma_n_eps
from .periodic_spectra import PI_CAP, pi_n, pi_n_branches
from .pseudospectra import (
    eps_table,
    format_eps_table,
    matrix_pseudospectrum,
    numerical_range_boundary,
    pseudospectrum_mask,
)
from .sierpinski import coefficient_table, format_table, sierpinski_signs

log = logging.getLogger("fzspec")

ENV_OUT = "FZSPEC_OUTPUT_DIR"
EXIT_OK, EXIT_VERIFY, EXIT_PARAM, EXIT_IO = 0, 1, 2, 3
TABLE_CAP = 4096
WARN_PATTERNS = 1 << 16


class ParameterError(ValueError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    n: int | None = None
    eps: float | None = None
    grid: ComplexGrid | None = None
    phi_samples: int = 512
    m: int = 4096
    out: Path | None = None
    fmt: str = "csv"
    workers: int = 1
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.workers < 1:
            raise ParameterError("--workers must be at least 1")
        if self.n is not None and self.n < 1:
            raise ParameterError("--n must be at least 1")
        if self.eps is not None and self.eps <= 0:
            raise ParameterError("--eps must be positive")
        if self.subcommand == "sigma" and self.n > self.extra.get("cap", SIGMA_CAP):
            raise CapExceeded(f"sigma: n={self.n} exceeds the cap {self.extra.get('cap', SIGMA_CAP)}")
        if self.subcommand == "pi" and self.n > self.extra.get("cap", PI_CAP):
            raise CapExceeded(f"pi: n={self.n} exceeds the cap {self.extra.get('cap', PI_CAP)}")


# -- helpers -------------------------------------------------------------------


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def _parse_pattern(text: str) -> tuple[int, ...]:
    text = text.replace("−", "-")
    if any(ch not in "+-" for ch in text):
        raise argparse.ArgumentTypeError("pattern must consist of '+' and '-'")
    return tuple(1 if ch == "+" else -1 for ch in text)


def _grid(args) -> ComplexGrid:
    center = args.zoom if args.zoom is not None else 0j
    half = args.window if args.window is not None else 2.2
    if half <= 0 or args.grid_size < 2:
        raise ParameterError("--window must be positive and --grid-size at least 2")
    return ComplexGrid.square(half, args.grid_size, center)


def _target(cfg: RunConfig, default_name: str) -> Path | None:
    if cfg.out is not None:
        return cfg.out
    env = os.environ.get(ENV_OUT)
    return Path(env) / default_name if env else None


def _emit(cfg: RunConfig, payload: str | bytes, default_name: str) -> None:
    path = _target(cfg, default_name)
    if path is None:
        if isinstance(payload, bytes):
            sys.stdout.buffer.write(payload)
            sys.stdout.buffer.flush()
        else:
            sys.stdout.write(payload)
        return
    if not path.parent.is_dir():
        raise FileNotFoundError(f"output directory {path.parent} does not exist")
    if isinstance(payload, bytes):
        path.write_bytes(payload)
    else:
        path.write_text(payload)
    log.info("wrote %s", path)


def _crop(cloud, grid: ComplexGrid):
    z = cloud.points
    keep = (z.real >= grid.re_min) & (z.real <= grid.re_max) & (z.imag >= grid.im_min) & (z.imag <= grid.im_max)
    return cloud.subset(keep)


def _field_payload(cfg: RunConfig, field_grid: ComplexGrid, mask: np.ndarray):
    if cfg.fmt == "pgm":
        # in the picture, the eps-set is black and the rest white
        return pgm_bytes(field_grid, vmax=1.0, values=np.where(mask, 0.0, 1.0))
    if cfg.fmt == "csv":
        return grid_csv(field_grid)
    raise ParameterError(f"format {cfg.fmt!r} is not available for grids (use csv or pgm)")


# -- subcommands ---------------------------------------------------------------


def cmd_sigma(cfg: RunConfig) -> int:
    n = cfg.n
    if (1 << (n - 1)) > WARN_PATTERNS:
        log.warning("sigma: n=%d sweeps 2**%d = %d matrices; this takes a while", n, n - 1, 1 << (n - 1))
    cap = cfg.extra["cap"]
    if cfg.eps is not None:
        field_grid = sigma_n_eps(n, cfg.eps, cfg.grid, workers=cfg.workers, cap=cap)
        pts = sigma_n(n, workers=cfg.workers, cap=cap).points
        mask = pseudospectrum_mask(field_grid, cfg.eps, pts)
        log.info("sigma_eps: node spacing %.3g", cfg.grid.spacing)
        _emit(cfg, _field_payload(cfg, field_grid, mask), f"sigma{n}_eps.{cfg.fmt}")
        return EXIT_OK
    cloud = sigma_n(n, workers=cfg.workers, cap=cap)
    if cfg.extra.get("zoomed"):
        cloud = _crop(cloud, cfg.grid)
    if cfg.fmt == "csv":
        _emit(cfg, cloud.to_csv(), f"sigma{n}.csv")
    elif cfg.fmt == "svg":
        _emit(cfg, svg_text([Layer(f"sigma{n}", cloud.points)], f"sigma_{n}"), f"sigma{n}.svg")
    else:
        raise ParameterError(f"format {cfg.fmt!r} is not available for point clouds (use csv or svg)")
    return EXIT_OK


def cmd_pi(cfg: RunConfig) -> int:
    n = cfg.n
    cap = cfg.extra["cap"]
    if cfg.fmt == "csv":
        cloud = pi_n(n, cfg.phi_samples, workers=cfg.workers, cap=cap, method=cfg.extra["method"])
        _emit(cfg, cloud.to_csv(), f"pi{n}.csv")
    elif cfg.fmt == "svg":
        branches = pi_n_branches(n, cfg.phi_samples, cap=cap)
        curves = [b for _, b in branches]
        pts = np.concatenate(curves) if curves else np.zeros(0, complex)
        _emit(cfg, svg_text([Layer(f"pi{n}", pts, "#1f77b4", curves=curves)], f"pi_{n}"), f"pi{n}.svg")
    else:
        raise ParameterError(f"format {cfg.fmt!r} is not available for pi (use csv or svg)")
    return EXIT_OK


def _section(cfg: RunConfig) -> np.ndarray:
    return build_finite_matrix(PatternId.from_signs(cfg.extra["pattern"]))


def cmd_pseudo(cfg: RunConfig) -> int:
    if cfg.eps is None:
        raise ParameterError("pseudo needs --eps")
    field_grid, mask = matrix_pseudospectrum(_section(cfg), cfg.grid, cfg.eps, workers=cfg.workers)
    log.info("pseudo: node spacing %.3g", cfg.grid.spacing)
    _emit(cfg, _field_payload(cfg, field_grid, mask), f"pseudo.{cfg.fmt}")
    return EXIT_OK


def cmd_table(cfg: RunConfig) -> int:
    N = cfg.extra["N"]
    if not 1 <= N <= TABLE_CAP:
        raise CapExceeded(f"table: N must lie in [1, {TABLE_CAP}]")
    signs = cfg.extra.get("signs")
    _emit(cfg, format_table(coefficient_table(N, signs)) + "\n", f"table{N}.txt")
    return EXIT_OK


def cmd_epsn(cfg: RunConfig) -> int:
    lo, hi = cfg.extra["n_min"], cfg.extra["n_max"]
    if not 1 <= lo <= hi:
        raise ParameterError("need 1 <= --n-min <= --n-max")
    _emit(cfg, format_eps_table(eps_table(hi, lo)), "epsn.txt")
    return EXIT_OK


def cmd_nrange(cfg: RunConfig) -> int:
    nr = numerical_range_boundary(_section(cfg), cfg.extra["angles"])
    lines = ["theta,support,vertex_re,vertex_im"]
    for t, h, v in zip(nr.theta, nr.support, nr.vertices):
        lines.append(f"{t:.17g},{h + 0.0:.17g},{v.real + 0.0:.17g},{v.imag + 0.0:.17g}")
    _emit(cfg, "\n".join(lines) + "\n", "nrange.csv")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    signs = cfg.extra.get("signs")
    reports = verification_suite(quick=cfg.extra["quick"], signs=signs, workers=cfg.workers)
    text = "".join(r.line() + "\n" for r in reports)
    # write the report before judging, so a failing run still leaves it behind
    _emit(cfg, text, "verify.txt")
    if cfg.out is not None or os.environ.get(ENV_OUT):
        sys.stdout.write(text)
    failed = [r for r in reports if not r.passed]
    for r in failed:
        log.error("check failed: %s", r.line())
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_overlay(cfg: RunConfig) -> int:
    out = cfg.out or (Path(os.environ[ENV_OUT]) if os.environ.get(ENV_OUT) else Path("."))
    if cfg.extra["n_sigma"] > SIGMA_CAP or cfg.extra["n_pi"] > PI_CAP:
        raise CapExceeded(f"overlay: caps are n_sigma <= {SIGMA_CAP}, n_pi <= {PI_CAP}")
    fmt = {"csv": "csv", "svg": "svg"}.get(cfg.fmt, "both")
    res = conjecture_overlay(
        cfg.extra["n_sigma"], cfg.extra["n_pi"], out, cfg.grid if cfg.extra.get("zoomed") else None,
        cfg.phi_samples, cfg.workers, fmt,
    )
    for name, z in res.layers.items():
        sys.stdout.write(f"{name} {len(z)}\n")
    for p in res.files:
        log.info("wrote %s", p)
    return EXIT_OK


COMMANDS = {
    "sigma": cmd_sigma,
    "pi": cmd_pi,
    "pseudo": cmd_pseudo,
    "table": cmd_table,
    "epsn": cmd_epsn,
    "nrange": cmd_nrange,
    "verify": cmd_verify,
    "overlay": cmd_overlay,
}


# -- argument parsing ----------------------------------------------------------


def _common(p: argparse.ArgumentParser, formats: tuple[str, ...], default_fmt: str) -> None:
    p.add_argument("--out", type=Path, help=f"output file (default: ${ENV_OUT}/<name> if set, else stdout)")
    p.add_argument("--format", dest="fmt", choices=formats, default=default_fmt, help=f"output format (default {default_fmt})")
    p.add_argument("--workers", type=int, default=1, help="worker processes (default 1); results do not depend on it")


def _grid_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--grid-size", type=int, default=512, help="nodes per axis (default 512)")
    p.add_argument("--zoom", type=_parse_complex, help="window centre, e.g. 1+1i (default 0)")
    p.add_argument("--window", type=float, help="window half-width (default 2.2)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fzspec",
        description="Spectral sets of the random hopping operator with +-1 subdiagonal.",
        epilog=f"Exit codes: 0 ok, 1 verification failure, 2 refused parameters, 3 I/O error. "
        f"Default output directory: ${ENV_OUT}.",
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("sigma", help="eigenvalues of all finite sections (sigma_n), or the eps-union on a grid")
    p.add_argument("--n", type=int, required=True, help=f"matrix size; 2**(n-1) patterns (cap {SIGMA_CAP})")
    p.add_argument("--eps", type=float, help="with eps: grid of min smallest singular value (csv) or eps-mask (pgm)")
    p.add_argument("--cap", type=int, default=SIGMA_CAP, help=f"refuse n above this (default {SIGMA_CAP})")
    _grid_args(p)
    _common(p, ("csv", "svg", "pgm"), "csv")

    p = sub.add_parser("pi", help="spectra of all n-periodic operators (pi_n), sampled in the Floquet phase")
    p.add_argument("--n", type=int, required=True, help=f"period (cap {PI_CAP})")
    p.add_argument("--phi-samples", type=int, default=512, help="phases 2 pi k / N, k < N (default 512, minimum 16)")
    p.add_argument("--method", choices=("trace", "symbol"), default="trace", help="solver route (default trace)")
    p.add_argument("--cap", type=int, default=PI_CAP, help=f"refuse n above this (default {PI_CAP})")
    _common(p, ("csv", "svg"), "csv")

    p = sub.add_parser("pseudo", help="eps-pseudospectrum of one finite section")
    p.add_argument("--pattern", type=_parse_pattern, required=True, help="subdiagonal signs, e.g. +-+ (n = len + 1)")
    p.add_argument("--eps", type=float, required=True)
    _grid_args(p)
    _common(p, ("pgm", "csv"), "pgm")

    p = sub.add_parser("table", help="coefficient table of the eigenvector polynomials as +/-/blank glyphs")
    p.add_argument("--N", type=int, default=16, help=f"rows (default 16, cap {TABLE_CAP})")
    _common(p, ("txt",), "txt")

    p = sub.add_parser("epsn", help="table of n, theta_n, eps_n, 2 pi/(n+1)")
    p.add_argument("--n-min", type=int, default=1, help="first row (default 1)")
    p.add_argument("--n-max", type=int, default=50, help="last row (default 50)")
    _common(p, ("txt",), "txt")

    p = sub.add_parser("nrange", help="support values and circumscribed polygon of the numerical range of a section")
    p.add_argument("--pattern", type=_parse_pattern, required=True, help="subdiagonal signs, e.g. +-+")
    p.add_argument("--angles", type=int, default=64, help="support directions (default 64, minimum 8)")
    _common(p, ("csv",), "csv")

    p = sub.add_parser("verify", help="run the check suite; exit 1 if any check fails")
    p.add_argument("--quick", action="store_true", help="smaller sweeps")
    p.add_argument(
        "--inject-sign-error", type=int, metavar="I",
        help="flip c_I in the table checks, to confirm the suite catches a corrupted sequence",
    )
    _common(p, ("txt",), "txt")

    p = sub.add_parser("overlay", help="sigma_n, pi_m, unit circle and square as layered csv/svg")
    p.add_argument("--n-sigma", type=int, default=12, help=f"default 12, cap {SIGMA_CAP}")
    p.add_argument("--n-pi", type=int, default=12, help=f"default 12, cap {PI_CAP}")
    p.add_argument("--phi-samples", type=int, default=512, help="default 512")
    _grid_args(p)
    p.add_argument("--out", type=Path, help=f"output directory (default ${ENV_OUT}, else .)")
    p.add_argument("--format", dest="fmt", choices=("csv", "svg", "both"), default="both")
    p.add_argument("--workers", type=int, default=1)
    return ap


def config_from_args(args) -> RunConfig:
    cfg = RunConfig(args.subcommand, out=args.out, fmt=args.fmt, workers=args.workers)
    cfg.n = getattr(args, "n", None)
    cfg.eps = getattr(args, "eps", None)
    cfg.phi_samples = getattr(args, "phi_samples", cfg.phi_samples)
    if hasattr(args, "grid_size"):
        cfg.grid = _grid(args)
        cfg.extra["zoomed"] = args.zoom is not None or args.window is not None
    for key in ("cap", "method", "pattern", "N", "n_min", "n_max", "angles", "quick", "n_sigma", "n_pi"):
        if hasattr(args, key):
            cfg.extra[key] = getattr(args, key)
    if getattr(args, "inject_sign_error", None) is not None:
        i = args.inject_sign_error
        if not 1 <= i <= 512:
            raise ParameterError("--inject-sign-error must lie in [1, 512]")
        signs = sierpinski_signs(1, 513).copy()
        signs[i - 1] = -signs[i - 1]
        cfg.extra["signs"] = signs
    if cfg.subcommand == "pi" and cfg.phi_samples < 16:
        raise ParameterError("--phi-samples must be at least 16")
    if cfg.subcommand == "nrange" and cfg.extra["angles"] < 8:
        raise ParameterError("--angles must be at least 8")
    cfg.validate()
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.subcommand](cfg)
    except ValueError as exc:  # CapExceeded and ParameterError included
        log.error("%s", exc)
        return EXIT_PARAM
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
