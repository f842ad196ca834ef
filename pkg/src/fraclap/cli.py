"""Command-line front end: asymptotic tables and certified bounds."""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .asymptotics import lambda_tilde
from .eigensolver import DEFAULT_TOL
from .grid import DEFAULT_CELL_CAP, Ball, Interval, Square, exact_eps
from .lower_bounds import lower_bound_sequence
from .specfun import check_alpha
from .upper_bounds import STRATEGIES, lambda1_upper

THREADS_ENV = "FRACLAP_THREADS"
# without --slow, problems are kept to this many cells
DESK_CELL_LIMIT = 2000
DESK_N = 400
DESK_EPS_2D = Fraction(1, 10)
FULL_N = 5000
FULL_EPS_2D = Fraction(1, 25)

SHAPES = {"interval": Interval(), "disk": Ball(2), "square": Square()}

ASYMPTOTIC_COLUMNS = ["alpha", "n", "mu_n", "lambda_tilde", "band", "band_valid"]
BOUNDS_COLUMNS = ["alpha", "n", "lower", "asymptotic", "literature_upper", "upper"]


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    alphas: list[float]
    n_max: int = 3
    eps: Fraction | None = None
    shape: str = "interval"
    tol: float = DEFAULT_TOL
    fmt: str = "plain"
    out: str | None = None
    threads: int = 1
    slow: bool = False
    upper: bool = False
    upper_strategy: str = "monotone"
    refine: int | None = None
    cell_cap: int = DEFAULT_CELL_CAP
    failures: list = field(default_factory=list)

    def validate(self) -> None:
        if not self.alphas:
            raise ConfigError("at least one alpha is required")
        for a in self.alphas:
            try:
                check_alpha(a)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        if self.n_max < 1:
            raise ConfigError("--n-max must be at least 1")
        if self.eps is not None and not self.eps > 0:
            raise ConfigError("--eps must be positive")
        if self.threads < 1:
            raise ConfigError("--threads must be at least 1")
        if self.shape not in SHAPES:
            raise ConfigError(f"unknown shape {self.shape!r}")
        if self.refine is not None and self.refine < 1:
            raise ConfigError("--refine must be at least 1")
        if self.upper and self.shape == "square":
            raise ConfigError("upper bounds are only available for the interval and the disk")


def _parse_alphas(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse alpha list {text!r}") from None


def _parse_eps(text: str) -> Fraction:
    try:
        return exact_eps(Fraction(text)) if "/" in text else exact_eps(float(text))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"cannot parse eps {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fraclap",
        description="Eigenvalue asymptotics and certified bounds for the fractional Laplacian.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--alpha", required=True, help="comma-separated list of alpha in (0, 2)")
        p.add_argument("--n-max", type=int, default=3, help="largest eigenvalue index")
        p.add_argument("--format", choices=["csv", "markdown", "plain"], default="plain")
        p.add_argument("--out", help="write the table to this file instead of stdout")
        p.add_argument("--threads", type=int, help=f"worker threads (default: ${THREADS_ENV} or 1)")

    p_asym = sub.add_parser("asymptotic", help="two-term approximation of the interval eigenvalues")
    common(p_asym)

    p_b = sub.add_parser("bounds", help="certified lower (and optionally upper) bounds")
    common(p_b)
    p_b.add_argument("--shape", choices=sorted(SHAPES), default="interval")
    grp = p_b.add_mutually_exclusive_group()
    grp.add_argument("--eps", help="cell size, e.g. 0.04 or 1/25")
    grp.add_argument("--N", type=int, help="interval shorthand for eps = 2/N")
    p_b.add_argument("--slow", action="store_true", help="allow full-scale runs (N = 5000, eps = 1/25)")
    p_b.add_argument("--upper", action="store_true", help="also compute the upper bound for lambda_1")
    p_b.add_argument(
        "--upper-strategy", choices=STRATEGIES, default="monotone",
        help="cell minorant for the upper bound; only 'monotone' is certified",
    )
    p_b.add_argument("--refine", type=int, help="sub-cells per axis for the monotone minorant")
    p_b.add_argument("--tol", type=float, default=DEFAULT_TOL, help="eigensolver tolerance")
    p_b.add_argument("--cell-cap", type=int, default=DEFAULT_CELL_CAP)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    threads = args.threads
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        try:
            threads = int(env) if env else 1
        except ValueError:
            raise ConfigError(f"${THREADS_ENV} must be an integer, got {env!r}") from None
    cfg = RunConfig(
        command=args.command,
        alphas=_parse_alphas(args.alpha),
        n_max=args.n_max,
        fmt=args.format,
        out=args.out,
        threads=threads,
    )
    if args.command == "bounds":
        cfg.shape = args.shape
        cfg.slow = args.slow
        cfg.upper = args.upper
        cfg.upper_strategy = args.upper_strategy
        cfg.refine = args.refine
        cfg.tol = args.tol
        cfg.cell_cap = args.cell_cap
        if args.N is not None:
            if args.shape != "interval":
                raise ConfigError("--N is only meaningful for the interval")
            if args.N < 1:
                raise ConfigError("--N must be positive")
            cfg.eps = Fraction(2, args.N)
        elif args.eps is not None:
            cfg.eps = _parse_eps(args.eps)
        else:
            if args.shape == "interval":
                cfg.eps = Fraction(2, FULL_N if args.slow else DESK_N)
            else:
                cfg.eps = FULL_EPS_2D if args.slow else DESK_EPS_2D
        if cfg.tol <= 0:
            raise ConfigError("--tol must be positive")
    cfg.validate()
    if cfg.command == "bounds" and not cfg.slow:
        shape = SHAPES[cfg.shape]
        cells = shape.volume / float(cfg.eps) ** shape.d
        if cells > DESK_CELL_LIMIT * 1.05:
            raise ConfigError(
                f"eps = {cfg.eps} needs about {cells:.0f} cells; pass --slow for runs above "
                f"{DESK_CELL_LIMIT} cells"
            )
    return cfg


# computations -----------------------------------------------------------


def asymptotic_rows(cfg: RunConfig) -> list[dict]:
    rows = []
    for a in cfg.alphas:
        for n in range(1, cfg.n_max + 1):
            r = lambda_tilde(a, n)
            rows.append({
                "alpha": a, "n": n, "mu_n": r.mu_n, "lambda_tilde": r.lambda_tilde,
                "band": r.error_band, "band_valid": r.band_valid,
            })
    return rows


def _bounds_for_alpha(cfg: RunConfig, alpha: float) -> list[dict]:
    shape = SHAPES[cfg.shape]
    lower = lower_bound_sequence(alpha, shape, cfg.eps, cfg.n_max, tol=cfg.tol, cell_cap=cfg.cell_cap)
    upper = None
    if cfg.upper:
        upper = lambda1_upper(
            shape, alpha, cfg.eps, strategy=cfg.upper_strategy, subdivisions=cfg.refine,
            cell_cap=cfg.cell_cap,
        ).lambda1_upper
    interval = cfg.shape == "interval"
    rows = []
    for n, lo in enumerate(lower.values, start=1):
        rows.append({
            "alpha": alpha,
            "n": n,
            "lower": float(lo),
            "asymptotic": lambda_tilde(alpha, n).lambda_tilde if interval else None,
            "literature_upper": (n * math.pi / 2.0) ** alpha if interval else None,
            "upper": upper if n == 1 else None,
        })
    return rows


def bounds_rows(cfg: RunConfig) -> list[dict]:
    def job(a):
        try:
            return _bounds_for_alpha(cfg, a)
        except (ArithmeticError, RuntimeError, ValueError) as exc:
            cfg.failures.extend((a, n, str(exc)) for n in range(1, cfg.n_max + 1))
            return []

    if cfg.threads > 1 and len(cfg.alphas) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            chunks = list(pool.map(job, cfg.alphas))
    else:
        chunks = [job(a) for a in cfg.alphas]
    return [row for chunk in chunks for row in chunk]


# formatting -------------------------------------------------------------


def _cell(v, full: bool) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, int):
        return str(v)
    if full:
        return repr(float(v))
    return f"{v:.4f}"


def _alpha_text(v: float) -> str:
    return f"{v:g}"


def format_table(rows: list[dict], columns: Sequence[str], fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_cell(r[c], True) for c in columns])
        return buf.getvalue()
    body = [
        [_alpha_text(r[c]) if c == "alpha" else _cell(r[c], False) for c in columns] for r in rows
    ]
    if fmt == "markdown":
        lines = ["| " + " | ".join(columns) + " |", "|" + "|".join("---:" for _ in columns) + "|"]
        lines += ["| " + " | ".join(b) + " |" for b in body]
        return "\n".join(lines) + "\n"
    widths = [max([len(c)] + [len(b[i]) for b in body]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths))]
    lines += ["  ".join(v.rjust(w) for v, w in zip(b, widths)) for b in body]
    return "\n".join(lines) + "\n"


def parse_csv(text: str) -> list[dict]:
    """Inverse of the CSV output: numbers back to floats, flags to bools."""
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        row = {}
        for k, v in rec.items():
            if v == "":
                row[k] = None
            elif v in ("yes", "no"):
                row[k] = v == "yes"
            elif k == "n":
                row[k] = int(v)
            else:
                row[k] = float(v)
        rows.append(row)
    return rows


def run(cfg: RunConfig) -> tuple[str, int]:
    if cfg.command == "asymptotic":
        rows, cols = asymptotic_rows(cfg), ASYMPTOTIC_COLUMNS
    else:
        rows, cols = bounds_rows(cfg), BOUNDS_COLUMNS
    status = 1 if cfg.failures else 0
    return format_table(rows, cols, cfg.fmt), status


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        parser.error(str(exc))
    text, status = run(cfg)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for a, n, msg in cfg.failures:
        print(f"failed: alpha={a:g} n={n}: {msg}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
