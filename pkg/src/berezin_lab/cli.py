"""Command-line front end.

Usage::

    berezin-lab coeffs  --symbol gv --n-max 1000
    berezin-lab berezin --symbol gv --r-grid 0.9:0.999999:log
    berezin-lab means   --symbol example10 --schedule even-dyadic:4
    berezin-lab density --symbol gv --L 1+0i --eps 1.41421356 --N 1000000
    berezin-lab cluster --kind mellin --symbol gv --n-max 100000 --delta 0.05
    berezin-lab chain   --symbol gv
    berezin-lab verify

Exit codes: 0 success, 1 numerical failure, 2 argument error, 3 verify failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__, numerics
from .cluster import (
    ChainConfig,
    cluster_estimate,
    density_ratio,
    dyadic_gap_schedule,
    boundary_mean,
    mean_phase_schedule,
    sample_quantity,
    verify_chain,
)
from .coefficients import QUADRATURE, coefficient_table, mellin_quadrature
from .errors import LabError, OrderingViolation, ParseError, ValidationError
from .symbols import (
    Constant,
    GrudskyVasilevski,
    Power,
    RadialSymbol,
    RealPart,
    StepExample10,
    parse_complex,
    symbol_from_dict,
)

TOOL = "berezin-lab"


# ---------------------------------------------------------------------------
# symbol ingestion
# ---------------------------------------------------------------------------


def load_symbol(token: str) -> RadialSymbol:
    """Builtin token (``gv``, ``example10``, ``constant:<c>``, ``power:<p>``,
    ``re:<token>``) or a path to a JSON symbol file."""
    token = token.strip()
    if token == "gv":
        return GrudskyVasilevski()
    if token == "example10":
        return StepExample10()
    if token.startswith("constant:"):
        return Constant(parse_complex(token.split(":", 1)[1]))
    if token.startswith("power:"):
        raw = token.split(":", 1)[1]
        try:
            p = float(raw)
        except ValueError:
            raise ParseError(f"not a number: {raw!r}", "power") from None
        return Power(p)
    if token.startswith("re:"):
        return RealPart(load_symbol(token[3:]))
    path = Path(token)
    if path.suffix == ".json" or path.exists():
        try:
            text = path.read_text()
        except OSError as exc:
            raise ParseError(f"cannot read symbol file: {exc}", str(path)) from None
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}", str(path)) from None
        return symbol_from_dict(obj)
    raise ParseError(f"unknown symbol token {token!r}", "symbol")


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------


def parse_r_grid(text: str) -> np.ndarray:
    """``a:b:log[:count]`` (log spacing of 1-R), ``a:b:lin[:count]``,
    ``boundary:k0:k1`` (R = 1-2^-k) or a comma list."""
    parts = text.split(":")
    try:
        if parts[0] == "boundary":
            k0, k1 = int(parts[1]), int(parts[2])
            return np.array([1.0 - math.ldexp(1.0, -k) for k in range(k0, k1 + 1)])
        if len(parts) >= 3:
            a, b = float(parts[0]), float(parts[1])
            count = int(parts[3]) if len(parts) > 3 else 20
            if parts[2] == "log":
                return 1.0 - numerics.log_grid(1.0 - a, 1.0 - b, count)
            if parts[2] == "lin":
                return np.linspace(a, b, count)
            raise ValueError(parts[2])
        return np.array([float(x) for x in text.split(",")])
    except (ValueError, IndexError):
        raise ParseError(f"bad radius grid {text!r}", "--r-grid") from None


def parse_mean_schedule(text: str) -> np.ndarray:
    """Gaps ``1 - eps``: ``even-dyadic:N``, ``odd-dyadic:N``,
    ``gap:a:b[:count]`` (log spaced), ``phase:k0:k1[:count]``."""
    parts = text.split(":")
    try:
        kind = parts[0]
        if kind in ("even-dyadic", "odd-dyadic"):
            return dyadic_gap_schedule(kind.split("-")[0], int(parts[1]))
        if kind == "gap":
            count = int(parts[3]) if len(parts) > 3 else 20
            return numerics.log_grid(float(parts[1]), float(parts[2]), count)
        if kind == "phase":
            count = int(parts[3]) if len(parts) > 3 else 32
            phis = np.linspace(0.0, 2.0 * math.pi, count, endpoint=False)
            return mean_phase_schedule(phis, range(int(parts[1]), int(parts[2]) + 1))
        raise ValueError(kind)
    except (ValueError, IndexError, KeyError):
        raise ParseError(f"bad mean schedule {text!r}", "--schedule") from None


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _fmt(x: Any) -> Any:
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def _jsonable(x: Any) -> Any:
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": float(x.real), "im": float(x.imag)}
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


class Output:
    def __init__(self, args: argparse.Namespace):
        self.args = args

    def emit(self, header: Sequence[str], rows: Sequence[Sequence[Any]], data: Any, config: dict) -> None:
        if self.args.format == "json":
            envelope = {
                "tool": TOOL,
                "version": __version__,
                "subcommand": self.args.command,
                "config": _jsonable(config),
                "data": _jsonable(data),
            }
            text = json.dumps(envelope, indent=2, allow_nan=False) + "\n"
        else:
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(v) for v in row])
            text = buf.getvalue()
        if self.args.output:
            Path(self.args.output).write_text(text)
        else:
            sys.stdout.write(text)


def _complex_row(z: complex) -> list:
    return [z.real, z.imag, abs(z)]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_coeffs(args, out: Output) -> int:
    s = args.symbol_obj
    if args.route == QUADRATURE:
        res = [mellin_quadrature(s, n, args.tol) for n in range(args.n_max + 1)]
        rows = [[n, *_complex_row(r.value), QUADRATURE, r.error_estimate] for n, r in enumerate(res)]
    else:
        table = coefficient_table(s, args.n_max, args.tol, use_cache=not args.no_cache)
        rows = [
            [int(n), v.real, v.imag, m, route, e]
            for n, v, m, route, e in zip(table.n, table.values, table.moduli, table.routes, table.errors)
        ]
    data = [{"n": r[0], "value": complex(r[1], r[2]), "abs": r[3], "route": r[4], "err": r[5]} for r in rows]
    out.emit(["n", "re", "im", "abs", "route", "err"], rows, data, {"symbol": s.to_dict(), "n_max": args.n_max, "tol": args.tol})
    return 0


def cmd_berezin(args, out: Output) -> int:
    s = args.symbol_obj
    radii = parse_r_grid(args.r_grid)
    vals = sample_quantity("berezin", s, radii, args.tol)
    rows = [[R, *_complex_row(v)] for R, v in zip(radii, vals)]
    data = [{"R": float(R), "value": complex(v), "abs": abs(v)} for R, v in zip(radii, vals)]
    out.emit(["R", "re", "im", "abs"], rows, data, {"symbol": s.to_dict(), "r_grid": args.r_grid, "tol": args.tol})
    return 0


def cmd_means(args, out: Output) -> int:
    s = args.symbol_obj
    gaps = parse_mean_schedule(args.schedule)
    vals = [boundary_mean(s, gap=float(g), tol=args.tol) for g in gaps]
    rows = [[g, 1.0 - g, *_complex_row(v)] for g, v in zip(gaps, vals)]
    data = [{"gap": float(g), "eps": 1.0 - float(g), "value": v, "abs": abs(v)} for g, v in zip(gaps, vals)]
    out.emit(["gap", "eps", "re", "im", "abs"], rows, data, {"symbol": s.to_dict(), "schedule": args.schedule, "tol": args.tol})
    return 0


def cmd_density(args, out: Output) -> int:
    s = args.symbol_obj
    L = parse_complex(args.L)
    rep = density_ratio(s, L, args.eps, args.N, levels=args.levels)
    rows = [[N, p, p / (N + 1)] for N, p in rep.counts]
    data = {
        "L": rep.L,
        "eps": rep.eps,
        "counts": [{"N": N, "p_N": p, "ratio": p / (N + 1)} for N, p in rep.counts],
        "ratio_floor": rep.ratio_floor,
    }
    out.emit(["N", "p_N", "ratio"], rows, data, {"symbol": s.to_dict(), "L": L, "eps": args.eps, "N": args.N})
    return 0


def cmd_cluster(args, out: Output) -> int:
    s = args.symbol_obj
    if args.kind == "mellin":
        schedule = np.arange(0, args.n_max + 1, dtype=np.int64)
        desc = f"n=0..{args.n_max}"
    elif args.kind == "berezin":
        schedule = parse_r_grid(args.r_grid)
        desc = f"R:{args.r_grid}"
    else:
        schedule = parse_mean_schedule(args.schedule)
        desc = f"gap:{args.schedule}"
    est = cluster_estimate(args.kind, s, schedule, args.delta, args.tail, args.tol, desc)
    rows = [[i, *_complex_row(z)] for i, z in enumerate(est.cluster_points)]
    data = {
        "kind": est.kind,
        "schedule": est.schedule,
        "samples": len(est.params),
        "tail_start": est.tail_start,
        "tail_limsup_modulus": est.tail_limsup_modulus,
        "tail_liminf_modulus": est.tail_liminf_modulus,
        "delta": est.delta,
        "cluster_points": est.cluster_points,
    }
    out.emit(["index", "re", "im", "abs"], rows, data, {"symbol": s.to_dict(), "kind": args.kind, "delta": args.delta, "tail": args.tail})
    return 0


def cmd_chain(args, out: Output) -> int:
    s = args.symbol_obj
    cfg = ChainConfig(order_tol=args.order_tol, delta=args.delta, tol=args.tol)
    rep = verify_chain(s, cfg)
    rows = [
        ["sup_berezin", rep.sup_berezin],
        ["sup_mellin", rep.sup_mellin],
        ["sup_mean", rep.sup_mean],
        ["sup_modulus", rep.sup_modulus],
        ["ordered", rep.ordered],
        ["nesting_check", "" if rep.nesting_check is None else rep.nesting_check],
    ]
    data = {
        "sup_berezin": rep.sup_berezin,
        "sup_mellin": rep.sup_mellin,
        "sup_mean": rep.sup_mean,
        "sup_modulus": rep.sup_modulus,
        "margins": rep.margins,
        "ordered": rep.ordered,
        "nesting_check": rep.nesting_check,
    }
    out.emit(["quantity", "value"], rows, data, {"symbol": s.to_dict(), **rep.config})
    return 0


def cmd_verify(args, out: Output) -> int:
    from .acceptance import run_all

    results = run_all(stream=sys.stdout)
    failed = [r for r in results if not r.passed]
    print(f"\n{len(results) - len(failed)}/{len(results)} criteria passed")
    return 3 if failed else 0


COMMANDS = {
    "coeffs": cmd_coeffs,
    "berezin": cmd_berezin,
    "means": cmd_means,
    "density": cmd_density,
    "cluster": cmd_cluster,
    "chain": cmd_chain,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=TOOL, description="Mellin coefficients, Berezin transform and boundary means of radial symbols.")
    parser.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, symbol=True):
        if symbol:
            p.add_argument("--symbol", required=True, help="gv | example10 | constant:<c> | power:<p> | re:<token> | file.json")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", "-o", help="write here instead of stdout")
        p.add_argument("--tol", type=float, default=numerics.DEFAULT_TOL)

    p = sub.add_parser("coeffs", help="normalised Mellin coefficient table")
    common(p)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--route", choices=("closed", "quadrature"), default="closed")
    p.add_argument("--no-cache", action="store_true")

    p = sub.add_parser("berezin", help="radial Berezin transform on a radius grid")
    common(p)
    p.add_argument("--r-grid", default="boundary:1:20")

    p = sub.add_parser("means", help="boundary means along a gap schedule")
    common(p)
    p.add_argument("--schedule", default="gap:0.1:1e-12:23")

    p = sub.add_parser("density", help="count eigenvalues far from L")
    common(p)
    p.add_argument("--L", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--levels", type=int, default=10)

    p = sub.add_parser("cluster", help="sampled cluster set of one quantity")
    common(p)
    p.add_argument("--kind", choices=("mellin", "mean", "berezin"), required=True)
    p.add_argument("--n-max", type=int, default=100000)
    p.add_argument("--r-grid", default="boundary:1:20")
    p.add_argument("--schedule", default="phase:1:5:64")
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--tail", type=float, default=0.5, help="fraction of samples treated as the tail")

    p = sub.add_parser("chain", help="sup chain Berezin <= Mellin <= mean")
    common(p)
    p.add_argument("--order-tol", type=float, default=1e-6)
    p.add_argument("--delta", type=float, default=0.05)

    sub.add_parser("verify", help="run the acceptance suite")
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "symbol"):
        try:
            args.symbol_obj = load_symbol(args.symbol)
        except (ParseError, ValidationError) as exc:
            parser.error(f"--symbol: {exc}")
    try:
        if args.command == "density":
            parse_complex(args.L)
        return COMMANDS[args.command](args, Output(args))
    except ValueError as exc:
        # bad input: parse and validation errors, out-of-range radii, eps, schedules
        parser.error(str(exc))
    except OrderingViolation as exc:
        print(f"{TOOL}: {args.command}: ordering violation: {exc}", file=sys.stderr)
        return 1
    except (LabError, ArithmeticError) as exc:
        print(f"{TOOL}: {args.command} failed in {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
