"""Command-line interface.

Subcommands
-----------
sweep   Run a Monte Carlo BER sweep from a JSON config file.
bound   Print the analytic union-bound BER curve of a (punctured)
        convolutional code over a range of Eb/N0 values.
evm     Compute error-vector magnitude between two symbol files.
plot    Render a record CSV as an SVG line plot (log-scale BER).

Exit codes: 0 success, 1 usage error (bad flags/arguments), 2 runtime
error (bad files, invalid configs, failed computations).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

import numpy as np

from .emit import emit, load_config, read_csv
from .errors import PhylabError, ConfigError
from .fec_conv import (
    build_trellis,
    distance_spectrum,
    punctured_bound_ber,
    puncture_pattern,
)
from .metrics import evm as compute_evm
from .sweep import parse_points, run_sweep

__all__ = ["main"]


class _UsageError(Exception):
    def __init__(self, message: str, parser: argparse.ArgumentParser):
        super().__init__(message)
        self.parser = parser


class _Parser(argparse.ArgumentParser):
    """argparse variant that reports usage problems via exception so the
    CLI can map them to exit code 1 instead of argparse's default 2."""

    def error(self, message):
        raise _UsageError(message, self)


def _build_parser() -> _Parser:
    parser = _Parser(prog="phylab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_sweep = sub.add_parser("sweep", help="run a BER sweep from a config file")
    p_sweep.add_argument("--chain", help="override the chain name from the config")
    p_sweep.add_argument("--config", required=True, help="JSON config file")
    p_sweep.add_argument("--out", required=True, help="output file path")
    p_sweep.add_argument(
        "--format",
        choices=("csv", "json", "plotdata"),
        default="csv",
        help="output format (default csv)",
    )
    p_sweep.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker threads (default: PHYLAB_THREADS or 1)",
    )
    p_sweep.set_defaults(func=_cmd_sweep)

    p_bound = sub.add_parser(
        "bound", help="analytic union-bound BER of a convolutional code"
    )
    p_bound.add_argument("--k", type=int, default=7, help="constraint length")
    p_bound.add_argument(
        "--gens", default="133,171", help="comma-separated octal generators"
    )
    p_bound.add_argument("--puncture", default=None, help="puncture mask, e.g. 111001")
    p_bound.add_argument(
        "--rate",
        default=None,
        help="code rate as a/b (default: derived from the generators and mask)",
    )
    p_bound.add_argument(
        "--ebn0", required=True, help="Eb/N0 range start:step:stop in dB"
    )
    p_bound.set_defaults(func=_cmd_bound)

    p_evm = sub.add_parser("evm", help="error-vector magnitude of a symbol file")
    p_evm.add_argument("--received", required=True, help="two-column re/im text file")
    p_evm.add_argument("--reference", required=True, help="two-column re/im text file")
    p_evm.add_argument("--limit-db", type=float, default=-19.0, help="compliance limit")
    p_evm.set_defaults(func=_cmd_evm)

    p_plot = sub.add_parser("plot", help="render a record CSV as an SVG plot")
    p_plot.add_argument("--in", dest="infile", required=True, help="input CSV")
    p_plot.add_argument("--out", required=True, help="output SVG path")
    p_plot.set_defaults(func=_cmd_plot)

    return parser


def _cmd_sweep(args) -> int:
    chain_cfg, sweep_cfg = load_config(args.config, chain_override=args.chain)
    records = run_sweep(chain_cfg, sweep_cfg, threads=args.threads)
    emit(records, args.format, args.out)
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def _parse_rate(text: str) -> Fraction:
    try:
        num, den = text.split("/")
        rate = Fraction(int(num), int(den))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"rate must look like 3/4, got {text!r}") from exc
    if not 0 < rate <= 1:
        raise ConfigError(f"rate must be in (0, 1], got {text}")
    return rate


def _cmd_bound(args) -> int:
    generators = tuple(g.strip() for g in args.gens.split(","))
    trellis = build_trellis(args.k, generators)
    pattern = puncture_pattern(args.puncture) if args.puncture else None
    if args.rate is not None:
        rate = _parse_rate(args.rate)
    elif pattern is not None:
        rate = pattern.code_rate(trellis.n_out)
    else:
        rate = Fraction(1, trellis.n_out)
    spectrum = distance_spectrum(trellis, None, pattern)
    for ebn0_db in parse_points(args.ebn0):
        pb = punctured_bound_ber(spectrum, rate.numerator, rate.denominator, ebn0_db)
        print(f"{ebn0_db!r} {pb!r}")
    return 0


def _load_symbols(path) -> np.ndarray:
    data = np.loadtxt(path, dtype=np.float64, ndmin=2)
    if data.shape[1] != 2:
        raise ConfigError(
            f"{path}: expected two columns (re, im), got {data.shape[1]}"
        )
    return data[:, 0] + 1j * data[:, 1]


def _cmd_evm(args) -> int:
    received = _load_symbols(args.received)
    reference = _load_symbols(args.reference)
    report = compute_evm(received, reference, args.limit_db)
    doc = {
        "evm_ratio": report.evm_ratio,
        "evm_db": None if math.isinf(report.evm_db) else report.evm_db,
        "limit_db": report.limit_db,
        "compliant": report.compliant,
    }
    print(json.dumps(doc))
    return 0


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _cmd_plot(args) -> int:
    records = read_csv(args.infile)
    svg = _render_svg(records)
    with open(args.out, "w") as fh:
        fh.write(svg)
    print(f"wrote {args.out}")
    return 0


def _render_svg(records) -> str:
    """SVG line plot: x = Eb/N0 (or SNR) in dB, y = BER on a log scale.

    Zero-error points carry no finite log-BER and are omitted, matching
    the plot-data convention.
    """
    x_attr = "ebn0_db" if records[0].ebn0_db is not None else "snr_db"
    series: dict[str, list[tuple[float, float]]] = {}
    for r in records:
        x = getattr(r, x_attr)
        if x is None or not math.isfinite(x) or r.errors == 0:
            continue
        series.setdefault(r.label, []).append((x, r.ber))
    points = [pt for grp in series.values() for pt in grp]
    if not points:
        raise ConfigError("no plottable points (every record has zero errors)")
    xs = [p[0] for p in points]
    lys = [math.log10(p[1]) for p in points]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = math.floor(min(lys)), math.ceil(max(lys))
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 1.0, x_hi + 1.0
    if y_hi == y_lo:
        y_hi += 1
    width, height, margin = 640, 480, 60
    def sx(x):
        return margin + (x - x_lo) / (x_hi - x_lo) * (width - 2 * margin)
    def sy(ly):
        return height - margin - (ly - y_lo) / (y_hi - y_lo) * (height - 2 * margin)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{margin}" y="{margin}" width="{width - 2 * margin}" '
        f'height="{height - 2 * margin}" fill="none" stroke="black"/>',
    ]
    for decade in range(y_lo, y_hi + 1):
        y = sy(decade)
        parts.append(
            f'<line x1="{margin}" y1="{y:.1f}" x2="{width - margin}" y2="{y:.1f}" '
            f'stroke="#dddddd"/>'
        )
        parts.append(
            f'<text x="{margin - 8}" y="{y + 4:.1f}" text-anchor="end" '
            f'font-size="12">1e{decade}</text>'
        )
    n_xticks = 6
    for i in range(n_xticks + 1):
        x = x_lo + (x_hi - x_lo) * i / n_xticks
        parts.append(
            f'<text x="{sx(x):.1f}" y="{height - margin + 18}" text-anchor="middle" '
            f'font-size="12">{x:.3g}</text>'
        )
    parts.append(
        f'<text x="{width / 2}" y="{height - 16}" text-anchor="middle" '
        f'font-size="13">{"Eb/N0" if x_attr == "ebn0_db" else "SNR"} (dB)</text>'
    )
    parts.append(
        f'<text x="16" y="{height / 2}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 16 {height / 2})">BER</text>'
    )
    for idx, (label, pts) in enumerate(series.items()):
        color = _PALETTE[idx % len(_PALETTE)]
        coords = " ".join(f"{sx(x):.1f},{sy(math.log10(y)):.1f}" for x, y in pts)
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        for x, y in pts:
            parts.append(
                f'<circle cx="{sx(x):.1f}" cy="{sy(math.log10(y)):.1f}" r="3" '
                f'fill="{color}"/>'
            )
        parts.append(
            f'<text x="{width - margin - 8}" y="{margin + 16 + 16 * idx}" '
            f'text-anchor="end" font-size="12" fill="{color}">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except _UsageError as exc:
        exc.parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except (PhylabError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
