"""Command-line interface.

Subcommands: tail-table, sample, density, track-sim, price-sim, backtest,
portfolio. Every randomized subcommand takes --seed, falling back to the
GC_SEED environment variable and then to the documented default; a fixed
seed makes output byte-identical across runs. Tabular output is TSV with
`# key=value` comment lines recording the resolved configuration (never a
timestamp). Validation failures print one diagnostic line to stderr and
exit nonzero.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from .data_io import BacktestConfig, emit_report, parse_report, trace_backtest
from .dist import GcParams, density_mc, sample, tail_table
from .errors import DomainError, GchainError
from .filters import sine_tracking_experiment
from .price_model import ModelConfig, StrengthPath, simulate_prices
from .series import load_prices
from .strategy import portfolio_return

DEFAULT_SEED = 20120402


@dataclass(frozen=True)
class RunConfig:
    """Resolved options of one invocation; rendered into the output header."""

    command: str
    options: dict

    def header(self) -> str:
        lines = [f"# gc {self.command}"]
        for key, value in self.options.items():
            lines.append(f"# {key}={value}")
        return "\n".join(lines) + "\n"


def resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("GC_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise DomainError(f"GC_SEED must be an integer, got {env!r}")
    return DEFAULT_SEED


def fnum(value) -> str:
    """Shortest round-trip decimal form of a float (plain, never np.float64)."""
    return repr(float(value))


def parse_int_list(text: str) -> list[int]:
    """Accept `A..B`, `A:B`, or comma-separated values."""
    text = text.strip()
    for sep in ("..", ":"):
        if sep in text and "," not in text:
            lo, hi = text.split(sep, 1)
            a, b = int(lo), int(hi)
            if b < a:
                raise DomainError(f"empty range {text!r}")
            return list(range(a, b + 1))
    return [int(v) for v in text.split(",")]


def parse_float_list(text: str) -> list[float]:
    text = text.strip()
    for sep in ("..", ":"):
        if sep in text and "," not in text:
            lo, hi = text.split(sep, 1)
            a, b = int(lo), int(hi)
            if b < a:
                raise DomainError(f"empty range {text!r}")
            return [float(v) for v in range(a, b + 1)]
    return [float(v) for v in text.split(",")]


def parse_grid(text: str) -> np.ndarray:
    """`lo:hi:step` inclusive of hi up to rounding."""
    parts = text.split(":")
    if len(parts) != 3:
        raise DomainError(f"grid must be lo:hi:step, got {text!r}")
    lo, hi, step = (float(p) for p in parts)
    if step <= 0 or hi < lo:
        raise DomainError(f"bad grid {text!r}")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(count)


def load_strength_segments(path: str) -> list[tuple[int, float, float]]:
    """Whitespace/TSV rows of (t_start, a1, a2); `#` comments allowed."""
    segments = []
    try:
        fh = open(path)
    except OSError as exc:
        raise DomainError(f"cannot open strength path {path}: {exc.strerror}")
    with fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 3:
                raise DomainError(f"{path}:{lineno}: expected `t_start a1 a2`, got {line!r}")
            try:
                segments.append((int(parts[0]), float(parts[1]), float(parts[2])))
            except ValueError:
                raise DomainError(f"{path}:{lineno}: bad segment {line!r}")
    if not segments:
        raise DomainError(f"{path}: no segments")
    return segments


def emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def cmd_tail_table(args) -> str:
    seed = resolve_seed(args.seed)
    orders = parse_int_list(args.orders)
    thresholds = parse_float_list(args.x)
    config = RunConfig(
        "tail-table",
        {"orders": args.orders, "x": args.x, "samples": args.samples, "seed": seed, "workers": args.workers},
    )
    table = tail_table(orders, thresholds, args.samples, np.random.default_rng(seed), workers=args.workers)
    lines = [config.header().rstrip("\n")]
    headers = ["q"] + [
        ("1-2F(1)%" if x == 1 else f"2F({x:g})%") for x in table.thresholds
    ]
    lines.append("\t".join(headers))
    for i, q in enumerate(table.orders):
        cells = []
        for j, x in enumerate(table.thresholds):
            value = table.cells[i, j]
            if x == 1:
                value = 100.0 - value  # x=1 column reports central mass, not tail
            cells.append(f"{value:.4f}")
        lines.append("\t".join([str(q)] + cells))
    return "\n".join(lines) + "\n"


def cmd_sample(args) -> str:
    seed = resolve_seed(args.seed)
    config = RunConfig(
        "sample", {"q": args.q, "m": args.m, "sigma": args.sigma, "n": args.n, "seed": seed}
    )
    values = sample(GcParams(args.q, args.m, args.sigma), np.random.default_rng(seed), size=args.n)
    return config.header() + "".join(fnum(v) + "\n" for v in values)


def cmd_density(args) -> str:
    seed = resolve_seed(args.seed)
    grid = parse_grid(args.grid)
    config = RunConfig(
        "density",
        {"q": args.q, "m": args.m, "sigma": args.sigma, "grid": args.grid,
         "samples": args.samples, "seed": seed},
    )
    values = density_mc(GcParams(args.q, args.m, args.sigma), grid, args.samples, np.random.default_rng(seed))
    lines = [config.header() + "x\tdensity"]
    for x, f in zip(grid, values):
        lines.append(f"{fnum(x)}\t{fnum(f)}")
    return "\n".join(lines) + "\n"


def cmd_track_sim(args) -> str:
    seed = resolve_seed(args.seed)
    config = RunConfig(
        "track-sim",
        {"filter": args.filter, "q": args.q, "sigma": args.sigma, "T": args.T,
         "lambda": args.lam, "seed": seed},
    )
    result = sine_tracking_experiment(
        args.filter, seed=seed, T=args.T, lam=args.lam, noise_sigma=args.sigma, noise_order=args.q
    )
    lines = [config.header() + "t\tr\ta_true\ta_hat"]
    for t, r, at, ah in zip(result.t, result.r, result.a_true, result.a_hat):
        lines.append(f"{int(t)}\t{fnum(r)}\t{fnum(at)}\t{fnum(ah)}")
    lines.append(f"# rmse={fnum(result.rmse)}")
    lines.append(f"# max_jump={fnum(result.max_jump)}")
    return "\n".join(lines) + "\n"


def cmd_price_sim(args) -> str:
    seed = resolve_seed(args.seed)
    segments = load_strength_segments(args.path)
    path = StrengthPath.from_segments(segments, args.T)
    config = RunConfig(
        "price-sim",
        {"q": args.q, "sigma": args.sigma, "n": args.n, "T": args.T,
         "path": args.path, "p0": args.p0, "seed": seed},
    )
    sim = simulate_prices(
        ModelConfig(sigma=args.sigma, q=args.q, n=args.n, p0=args.p0), path, np.random.default_rng(seed)
    )
    lines = [config.header() + "t\tprice\tx_prev\ted1\ted2\tr"]
    for t in range(len(sim)):
        x_prev = sim.x[t - 1] if t > 0 else math.nan
        lines.append(
            f"{t}\t{fnum(sim.prices[t])}\t{fnum(x_prev)}\t{fnum(sim.ed1[t])}\t"
            f"{fnum(sim.ed2[t])}\t{fnum(sim.r[t])}"
        )
    lines.append(f"# snr={fnum(sim.realized_snr)}")
    return "\n".join(lines) + "\n"


def cmd_backtest(args) -> str:
    config = BacktestConfig(kind=args.filter, lam=args.lam, n=args.n)
    series = load_prices(args.prices, symbol=args.symbol)
    trace = trace_backtest(config, series)
    run = RunConfig(
        "backtest",
        {"prices": args.prices, "symbol": series.symbol, "filter": args.filter,
         "lambda": args.lam, "n": args.n, "format": args.format},
    )
    report_text = emit_report(trace.report, args.format).decode()
    plot_lines = ["# plot-data", "date\tclose\tmood\tmood_ma\tposition"]
    for i in range(len(series)):
        plot_lines.append(
            f"{series.dates[i].isoformat()}\t{fnum(series.closes[i])}\t"
            f"{fnum(trace.moods[i])}\t{fnum(trace.mood_avg[i])}\t{trace.position[i]}"
        )
    plot_text = "\n".join(plot_lines) + "\n"
    if args.plot_data is not None:
        with open(args.plot_data, "w", newline="") as fh:
            fh.write(plot_text)
        return run.header() + report_text
    return run.header() + report_text + "\n" + plot_text


def cmd_portfolio(args) -> str:
    run = RunConfig("portfolio", {"reports": ",".join(args.reports)})
    rows = []
    for path in args.reports:
        try:
            data = open(path, "rb").read()
        except OSError as exc:
            raise DomainError(f"cannot open report {path}: {exc.strerror}")
        parsed = parse_report(data, path=path)
        rows.append((parsed.symbol or path, parsed.accumulated_pct, parsed.buy_hold_pct))
    lines = [run.header() + "symbol\taccumulated%\tbuy_hold%"]
    for symbol, acc, bh in rows:
        lines.append(f"{symbol}\t{acc:.2f}\t{bh:.2f}")
    lines.append(
        "portfolio\t%.2f\t%.2f"
        % (portfolio_return([r[1] for r in rows]), portfolio_return([r[2] for r in rows]))
    )
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gc",
        description="Gaussian-Chain distribution, robust filters, and the Ride-the-Mood backtester",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_seed(p):
        p.add_argument("--seed", type=int, default=None,
                       help=f"RNG seed (default: $GC_SEED or {DEFAULT_SEED})")

    def add_out(p):
        p.add_argument("--out", default=None, help="write output to this file instead of stdout")

    p = sub.add_parser("tail-table", help="two-sided tail probabilities per order and threshold")
    p.add_argument("--orders", default="1..20", help="orders, e.g. 1..20 or 1,5,10")
    p.add_argument("--x", default="1..9", help="thresholds in standard deviations, e.g. 1..9")
    p.add_argument("--samples", type=int, default=7_500_000)
    p.add_argument("--workers", type=int, default=1)
    add_seed(p); add_out(p)
    p.set_defaults(run=cmd_tail_table)

    p = sub.add_parser("sample", help="draw chain samples, one per line")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--m", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--n", type=int, default=10)
    add_seed(p); add_out(p)
    p.set_defaults(run=cmd_sample)

    p = sub.add_parser("density", help="Monte-Carlo density estimate over a grid")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--m", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--grid", required=True, help="lo:hi:step")
    p.add_argument("--samples", type=int, default=200_000)
    add_seed(p); add_out(p)
    p.set_defaults(run=cmd_density)

    p = sub.add_parser("track-sim", help="sine-tracking benchmark under heavy-tailed noise")
    p.add_argument("--filter", choices=["gc2", "gc3", "rls"], default="gc2")
    p.add_argument("--q", type=int, default=5)
    p.add_argument("--sigma", type=float, default=40.0)
    p.add_argument("--T", type=int, default=1000)
    p.add_argument("--lambda", dest="lam", type=float, default=0.7)
    add_seed(p); add_out(p)
    p.set_defaults(run=cmd_track_sim)

    p = sub.add_parser("price-sim", help="simulate prices from a strength path file")
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--sigma", type=float, default=0.01)
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--p0", type=float, default=100.0)
    p.add_argument("--path", required=True, help="file of `t_start a1 a2` rows")
    add_seed(p); add_out(p)
    p.set_defaults(run=cmd_price_sim)

    p = sub.add_parser("backtest", help="Ride-the-Mood backtest over a price CSV")
    p.add_argument("--prices", required=True)
    p.add_argument("--symbol", default=None)
    p.add_argument("--filter", choices=["gc2", "gc3"], default="gc2")
    p.add_argument("--lambda", dest="lam", type=float, default=0.95)
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--format", choices=["tsv", "csv"], default="tsv")
    p.add_argument("--plot-data", default=None, help="write the per-bar plot TSV to this file")
    add_out(p)
    p.set_defaults(run=cmd_backtest)

    p = sub.add_parser("portfolio", help="equally weighted aggregate of emitted reports")
    p.add_argument("--reports", nargs="+", required=True)
    add_out(p)
    p.set_defaults(run=cmd_portfolio)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = args.run(args)
    except GchainError as exc:
        print(f"gc {args.command}: {exc}", file=sys.stderr)
        return 1
    emit(text, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
