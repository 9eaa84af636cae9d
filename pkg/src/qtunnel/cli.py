"""Command-line interface: ``qtunnel {transmission,eigen,potential,scan,simulate}``.

Exit codes: 0 success, 1 usage error, 2 input/format error, 3 numeric failure.
Machine-readable output goes to stdout (or ``--output``); diagnostics go to
stderr, with verbosity set by ``QTUNNEL_LOG`` (error, warn, info, debug).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from .core_model import MarketParams, lambda_constant
from .detector import DetectorConfig, scan
from .errors import (
    DomainError,
    InputFormatError,
    InsufficientDataError,
    NumericError,
    QTunnelError,
)
from .marketdata import parse_csv, to_csv
from .regime import RegimeParams
from .spectral import DEFAULT_POINTS, Box, eigen_spectrum, resonance_gap
from .synthetic import Breakout, SynthConfig, generate
from .tunneling import DEFAULT_MAX_EVALS, DEFAULT_TOLERANCE, barrier_profile, transmission

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_NUMERIC = 3

_LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING,
               "info": logging.INFO, "debug": logging.DEBUG}

log = logging.getLogger("qtunnel")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; 2 is reserved for input errors here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _configure_logging():
    level = _LOG_LEVELS.get(os.environ.get("QTUNNEL_LOG", "warn").lower(), logging.WARNING)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger("qtunnel")
    root.handlers[:] = [handler]
    root.setLevel(level)
    root.propagate = False


def write_atomic(path, text: str):
    """Write ``text`` to ``path`` via a temp file in the same directory and rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, output):
    if output in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        write_atomic(output, text)
        log.info("wrote %s", output)


def _params(args) -> MarketParams:
    for name in ("rate", "vol"):
        value = getattr(args, name)
        if not value > 0:
            raise UsageError(f"--{name} must be > 0, got {value!r}")
    return MarketParams(args.rate, args.vol)


def _g(x) -> str:
    return repr(float(x))


def cmd_transmission(args) -> int:
    params = _params(args)
    if not args.strike > 0:
        raise UsageError(f"--strike must be > 0, got {args.strike!r}")
    if args.oracle and not 0 < args.tolerance <= 1e-4:
        raise UsageError(f"--tolerance must lie in (0, 1e-4], got {args.tolerance!r}")
    report = transmission(params, args.strike, oracle=args.oracle, tolerance=args.tolerance,
                          max_evals=args.max_evals)
    payload = {"rate": params.rate, "vol": params.vol,
               "lambda": lambda_constant(params), **report.to_dict()}
    _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", None)
    return EXIT_OK


def cmd_eigen(args) -> int:
    params = _params(args)
    if not args.flat_potential and not args.support > 0:
        raise UsageError(f"--support must be > 0 unless --flat-potential, got {args.support!r}")
    try:
        box = Box(args.support, args.resistance, args.grid_points)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    if not 1 <= args.count <= box.points:
        raise UsageError(f"--count must lie in [1, {box.points}], got {args.count}")
    sol = eigen_spectrum(params, box, args.count, flat_potential=args.flat_potential)
    lines = ["n,lambda_n"]
    lines += [f"{n},{_g(v)}" for n, v in enumerate(sol.eigenvalues, start=1)]
    lines.append(f"# resonance_gap={_g(resonance_gap(params, sol))} "
                 f"lambda={_g(lambda_constant(params))}")
    _emit("\n".join(lines) + "\n", args.output)
    if args.eigenfunctions:
        header = "s," + ",".join(f"psi_{n}" for n in range(1, args.count + 1))
        rows = [header]
        for i, s in enumerate(sol.grid):
            rows.append(",".join([_g(s)] + [_g(f[i]) for f in sol.eigenfunctions]))
        write_atomic(args.eigenfunctions, "\n".join(rows) + "\n")
        log.info("wrote eigenfunctions to %s", args.eigenfunctions)
    return EXIT_OK


def cmd_potential(args) -> int:
    if not args.s_min > 0 or not args.s_max > args.s_min:
        raise UsageError(f"need 0 < --s-min < --s-max, got {args.s_min!r}, {args.s_max!r}")
    if args.points < 2:
        raise UsageError(f"--points must be >= 2, got {args.points}")
    if any(not lam > 0 for lam in args.lambda_level):
        raise UsageError("--lambda-level values must be > 0")
    prof = barrier_profile(args.s_min, args.s_max, args.points, args.lambda_level)
    lines = ["s,v"] + [f"{_g(s)},{_g(v)}" for s, v in prof.rows()]
    for lam, tp in prof.levels:
        lines.append(f"# lambda={_g(lam)} turning_point={'' if tp is None else _g(tp)}")
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_scan(args) -> int:
    try:
        config = DetectorConfig(
            rate=args.rate, t_threshold=args.t_threshold, vol_drop_ratio=args.vol_drop_ratio,
            vol_fast_window=args.vol_fast_window, vol_slow_window=args.vol_slow_window,
            normalization=args.normalization, lookahead=args.lookahead)
        regime_params = RegimeParams(
            window=args.window, band_fraction=args.band_fraction,
            containment_min=args.containment_min, min_length=args.min_length)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    path = Path(args.input)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise InputFormatError(f"cannot read {path}: {exc.strerror}") from None
    series = parse_csv(data, symbol=args.symbol or path.stem)
    report = scan(series, config, regime_params)
    log.info("%s: %d regimes, %d events", series.symbol, len(report.regimes),
             len(report.events))
    _emit(report.to_json(), args.output)
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        breakout = None
        if args.breakout_at is not None:
            breakout = Breakout(args.breakout_at, args.vol_damp, args.drift, args.direction)
        config = SynthConfig(seed=args.seed, bars=args.bars, start=args.start,
                             support=args.support, resistance=args.resistance,
                             daily_vol=args.daily_vol, breakout=breakout, symbol=args.symbol)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    _emit(to_csv(generate(config)), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = _Parser(prog="qtunnel", description=__doc__.splitlines()[0], formatter_class=fmt)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("transmission", help="transmission coefficient as JSON",
                       formatter_class=fmt)
    p.add_argument("--rate", type=float, required=True, help="annualized interest rate r")
    p.add_argument("--vol", type=float, required=True, help="annualized volatility sigma")
    p.add_argument("--strike", type=float, required=True, help="normalized strike level K")
    p.add_argument("--oracle", action="store_true", help="also integrate numerically")
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE,
                   help="relative quadrature tolerance")
    p.add_argument("--max-evals", type=int, default=DEFAULT_MAX_EVALS,
                   help="quadrature integrand-evaluation budget")
    p.set_defaults(func=cmd_transmission)

    p = sub.add_parser("eigen", help="box eigenvalues as CSV", formatter_class=fmt)
    p.add_argument("--rate", type=float, required=True, help="annualized interest rate r")
    p.add_argument("--vol", type=float, required=True, help="annualized volatility sigma")
    p.add_argument("--support", type=float, required=True, help="lower wall a")
    p.add_argument("--resistance", type=float, required=True, help="upper wall b")
    p.add_argument("--count", type=int, default=5, help="number of eigenvalues")
    p.add_argument("--grid-points", type=int, default=DEFAULT_POINTS,
                   help="interior grid points N")
    p.add_argument("--flat-potential", action="store_true", help="replace 1/S^2 by 0")
    p.add_argument("--eigenfunctions", metavar="FILE",
                   help="also write grid and eigenfunctions as CSV")
    p.add_argument("--output", default="-", help="output file or - for stdout")
    p.set_defaults(func=cmd_eigen)

    p = sub.add_parser("potential", help="V(S) = 1/S^2 samples as CSV", formatter_class=fmt)
    p.add_argument("--s-min", type=float, required=True, help="smallest price sampled")
    p.add_argument("--s-max", type=float, required=True, help="largest price sampled")
    p.add_argument("--points", type=int, default=200, help="number of samples")
    p.add_argument("--lambda-level", type=float, action="append", default=[],
                   help="lambda level to annotate (repeatable)")
    p.add_argument("--output", default="-", help="output file or - for stdout")
    p.set_defaults(func=cmd_potential)

    d, r = DetectorConfig(), RegimeParams()
    p = sub.add_parser("scan", help="scan an OHLCV CSV for tunneling events",
                       formatter_class=fmt)
    p.add_argument("--input", required=True, help="CSV with date,open,high,low,close,volume")
    p.add_argument("--symbol", help="symbol for the report (default: file stem)")
    p.add_argument("--rate", type=float, default=d.rate, help="annualized interest rate r")
    p.add_argument("--t-threshold", type=float, default=d.t_threshold,
                   help="minimum transmission coefficient for an event")
    p.add_argument("--vol-drop-ratio", type=float, default=d.vol_drop_ratio,
                   help="event needs vol_fast <= ratio * vol_slow")
    p.add_argument("--vol-fast-window", type=int, default=d.vol_fast_window,
                   help="short realized-vol window (returns)")
    p.add_argument("--vol-slow-window", type=int, default=d.vol_slow_window,
                   help="long realized-vol window (returns); also sigma for T")
    p.add_argument("--normalization", choices=["midpoint"], default=d.normalization,
                   help="price-to-strike mapping: K = wall / wall midpoint")
    p.add_argument("--lookahead", type=int, default=d.lookahead,
                   help="bars after a regime still eligible for its breakout")
    p.add_argument("--window", type=int, default=r.window, help="regime window (bars)")
    p.add_argument("--band-fraction", type=float, default=r.band_fraction,
                   help="max (resistance - support) / midpoint")
    p.add_argument("--containment-min", type=float, default=r.containment_min,
                   help="min fraction of closes inside the walls")
    p.add_argument("--min-length", type=int, default=r.min_length,
                   help="shortest regime kept (bars)")
    p.add_argument("--output", default="-", help="output file or - for stdout")
    p.set_defaults(func=cmd_scan)

    s = SynthConfig()
    p = sub.add_parser("simulate", help="seeded synthetic range-bound path as CSV",
                       formatter_class=fmt)
    p.add_argument("--seed", type=int, default=s.seed, help="PCG64 seed")
    p.add_argument("--bars", type=int, default=s.bars, help="number of bars")
    p.add_argument("--start", type=float, default=s.start, help="first close")
    p.add_argument("--support", type=float, default=s.support, help="lower reflecting wall")
    p.add_argument("--resistance", type=float, default=s.resistance,
                   help="upper reflecting wall")
    p.add_argument("--daily-vol", type=float, default=s.daily_vol,
                   help="per-bar log-return volatility")
    p.add_argument("--symbol", default=s.symbol, help="symbol (not written to CSV)")
    p.add_argument("--breakout-at", type=int, help="bar index where the breakout starts")
    p.add_argument("--vol-damp", type=float, default=0.25,
                   help="volatility multiplier from the breakout bar on")
    p.add_argument("--drift", type=float, default=0.004, help="log drift per bar")
    p.add_argument("--direction", choices=["up", "down"], default="up",
                   help="wall whose reflection is switched off")
    p.add_argument("--output", default="-", help="output file or - for stdout")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except (InputFormatError, InsufficientDataError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    except NumericError as exc:
        log.error("%s", exc)
        return EXIT_NUMERIC
    except DomainError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except QTunnelError as exc:
        log.error("%s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
