"""Command-line front end: eigenvalue sweeps, Landau coefficients, profile tables.

Examples:
  oscoeff eigen --profile exp --nu 1e-30 --alpha0 1.5
  oscoeff landau --profile blasius --nu 1e-30 --alpha0 0.5 --refine --format json
  oscoeff eigen --profile exp --nu 1e-30 --alpha0-range 0.5:1.0:0.1 --out sweep.csv
  oscoeff profile --profile blasius --samples 201 --ymax 10
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from . import __version__
from .nonlinear import landau_with_refinement, run_pipeline
from .profiles import ShearProfile, make_blasius, make_exponential
from .spectrum import adjoint_residual, find_eigenvalue

COLUMNS = (
    "profile", "nu", "alpha0", "c0_re", "c0_im", "lambda_re", "lambda_im", "phi0_re", "phi0_im",
    "A_re", "A_im", "res_eigen", "res_adjoint", "refine_delta", "wall_ms", "status",
)
RES_EIGEN_MAX = 1e-6
RES_ADJOINT_MAX = 1e-3
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RunConfig:
    command: str
    profile: str = "exp"
    delta: float = 1.0
    nu: float = 1e-30
    alpha0: tuple = (1.5,)
    numerics: dict = field(default_factory=dict)
    refine: bool = False
    format: str = "csv"
    out: str | None = None


@lru_cache(maxsize=4)
def build_profile(kind: str, delta: float = 1.0) -> ShearProfile:
    if kind == "exp":
        return make_exponential(delta)
    if kind == "blasius":
        return make_blasius()
    raise ValueError(f"unknown profile {kind!r}")


def parse_range(text: str) -> tuple:
    """``START:STOP:STEP`` to an inclusive tuple of values."""
    try:
        start, stop, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError("expected START:STOP:STEP") from None
    if not (step > 0 and start < stop and start > 0):
        raise argparse.ArgumentTypeError("need 0 < START < STOP and STEP > 0")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(round(start + i * step, 12) for i in range(n))


def _positive(text: str) -> float:
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be positive and finite, got {text}")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return v


# --------------------------------------------------------------------------
# Rows


def _empty_row(cfg: RunConfig, alpha0: float) -> dict:
    row = dict.fromkeys(COLUMNS)
    row.update(profile=cfg.profile, nu=cfg.nu, alpha0=alpha0)
    return row


def compute_row(cfg: RunConfig, alpha0: float) -> dict:
    """One result row; failures are recorded in ``status`` instead of raised."""
    row = _empty_row(cfg, alpha0)
    t0 = time.perf_counter()
    try:
        profile = build_profile(cfg.profile, cfg.delta)
        if cfg.command == "eigen":
            e = find_eigenvalue(profile, cfg.nu, alpha0, numerics=cfg.numerics)
        else:
            if cfg.refine:
                p = landau_with_refinement(profile, cfg.nu, alpha0, numerics=cfg.numerics)
                row["refine_delta"] = p.landau.diagnostics["refine_delta"]
            else:
                p = run_pipeline(profile, cfg.nu, alpha0, numerics=cfg.numerics)
            e = p.eigen
            row.update(phi0_re=p.landau.phi0.real, phi0_im=p.landau.phi0.imag,
                       A_re=p.landau.A.real, A_im=p.landau.A.imag,
                       res_adjoint=adjoint_residual(e, p.adjoint))
        row.update(c0_re=e.c0.real, c0_im=e.c0.imag, lambda_re=e.lam.real, lambda_im=e.lam.imag,
                   res_eigen=abs(e.residual))
        row["status"] = _status(row)
    except Exception as exc:  # per-row isolation: siblings keep running
        row["status"] = f"failed: {type(exc).__name__}: {exc}"
    row["wall_ms"] = int(round(1000 * (time.perf_counter() - t0)))
    return row


def _status(row: dict) -> str:
    values = [v for k, v in row.items() if isinstance(v, float)]
    if not all(math.isfinite(v) for v in values):
        return "failed: non-finite result"
    if row["res_eigen"] > RES_EIGEN_MAX:
        return f"failed: eigen residual {row['res_eigen']:.3e} above {RES_EIGEN_MAX:g}"
    if row["res_adjoint"] is not None and row["res_adjoint"] > RES_ADJOINT_MAX:
        return f"failed: adjoint residual {row['res_adjoint']:.3e} above {RES_ADJOINT_MAX:g}"
    return "ok"


def _compute_star(args):
    return compute_row(*args)


def max_workers(n_rows: int) -> int:
    cap = os.environ.get("OSCOEFF_THREADS")
    n = os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, min(n, n_rows))


def iter_rows(cfg: RunConfig):
    """Rows in input order; with several workers they are computed concurrently."""
    jobs = [(cfg, a) for a in cfg.alpha0]
    workers = max_workers(len(jobs))
    if workers == 1:
        for job in jobs:
            yield _compute_star(job)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(_compute_star, jobs)


# --------------------------------------------------------------------------
# Output


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


class CsvSink:
    def __init__(self, stream):
        self.stream = stream
        self.writer = csv.writer(stream, lineterminator="\n")
        self.writer.writerow(COLUMNS)

    def write(self, row: dict):
        self.writer.writerow([format_value(row[c]) for c in COLUMNS])
        self.stream.flush()

    def close(self):
        pass


class JsonSink:
    def __init__(self, stream, cfg: RunConfig):
        self.stream = stream
        self.cfg = cfg
        self.rows = []

    def write(self, row: dict):
        self.rows.append({c: row[c] for c in COLUMNS})

    def close(self):
        doc = {"schema_version": SCHEMA_VERSION, "version": __version__, "config": config_echo(self.cfg),
               "columns": list(COLUMNS), "rows": self.rows}
        json.dump(doc, self.stream, indent=2)
        self.stream.write("\n")


def config_echo(cfg: RunConfig) -> dict:
    d = asdict(cfg)
    d["alpha0"] = list(cfg.alpha0)
    d.pop("out")
    return d


def run_rows(cfg: RunConfig, stream) -> int:
    sink = JsonSink(stream, cfg) if cfg.format == "json" else CsvSink(stream)
    ok = True
    for row in iter_rows(cfg):
        ok &= row["status"] == "ok"
        sink.write(row)
    sink.close()
    return 0 if ok else 1


def profile_report(kind: str, delta: float, samples: int, ymax: float) -> dict:
    prof = build_profile(kind, delta)
    y = np.linspace(0.0, ymax, samples)
    u, du, d2u = (np.real(v) for v in prof.derivatives(y, 2))
    out = {"profile": kind, "u_plus": prof.u_plus, "slope0": prof.slope0}
    if kind == "blasius":
        out["f2_0"] = prof.wall_curvature
    if kind == "exp":
        out["delta"] = delta
    out["samples"] = [{"y": float(a), "U": float(b), "dU": float(c), "d2U": float(d)}
                      for a, b, c, d in zip(y, u, du, d2u)]
    return out


def write_profile(report: dict, fmt: str, stream):
    if fmt == "json":
        json.dump(report, stream, indent=2)
        stream.write("\n")
        return
    for key in ("profile", "delta", "f2_0", "u_plus", "slope0"):
        if key in report:
            stream.write(f"# {key}: {format_value(report[key])}\n")
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(("y", "U", "dU", "d2U"))
    for s in report["samples"]:
        w.writerow([format_value(s[k]) for k in ("y", "U", "dU", "d2U")])


# --------------------------------------------------------------------------
# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="oscoeff", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--profile", choices=("exp", "blasius"), default="exp")
    common.add_argument("--delta", type=_positive, default=1.0, help="decay rate of the exponential profile")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=None, help="output path (default: stdout)")

    runs = argparse.ArgumentParser(add_help=False)
    runs.add_argument("--nu", type=_positive, required=True, help="viscosity")
    g = runs.add_mutually_exclusive_group(required=True)
    g.add_argument("--alpha0", type=_positive, help="rescaled wavenumber alpha / nu^(1/4)")
    g.add_argument("--alpha0-range", type=parse_range, metavar="START:STOP:STEP")
    runs.add_argument("--sigma", type=_positive, help="series-zone radius")
    runs.add_argument("--h", type=_positive, help="outer grid step")
    runs.add_argument("--Y0", type=_positive, dest="y0", help="outer truncation point")
    runs.add_argument("--theta", type=_positive, help="critical-layer width in units of nu^(1/4)")
    runs.add_argument("--hc-divisor", type=_positive_int, help="layer nodes (h_c = L_c / divisor)")
    runs.add_argument("--n-series", type=_positive_int, help="series truncation order")

    sub.add_parser("eigen", parents=[common, runs], help="eigenvalue rows")
    p = sub.add_parser("landau", parents=[common, runs], help="eigenvalue and Landau coefficient rows")
    p.add_argument("--refine", action="store_true", help="rerun at halved steps and record the change of A")
    p = sub.add_parser("profile", parents=[common], help="profile diagnostics and sampled table")
    p.add_argument("--samples", type=_positive_int, default=101)
    p.add_argument("--ymax", type=_positive, default=10.0)
    return ap


def config_from_args(args) -> RunConfig:
    alpha0 = args.alpha0_range if args.alpha0_range is not None else (args.alpha0,)
    numerics = {k: getattr(args, k) for k in ("sigma", "h", "y0", "theta", "hc_divisor", "n_series")
                if getattr(args, k) is not None}
    return RunConfig(args.command, args.profile, args.delta, args.nu, tuple(alpha0), numerics,
                     getattr(args, "refine", False), args.format, args.out)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    stream = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
    try:
        if args.command == "profile":
            write_profile(profile_report(args.profile, args.delta, args.samples, args.ymax), args.format, stream)
            return 0
        return run_rows(config_from_args(args), stream)
    finally:
        if stream is not sys.stdout:
            stream.close()


if __name__ == "__main__":
    raise SystemExit(main())
