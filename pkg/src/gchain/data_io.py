"""Backtest orchestration and report rendering.

run_backtest wires the full pipeline over a daily-close series: log-ratio
state -> excess demands -> recursive filter -> mood -> smoothed mood ->
Ride-the-Mood cycles -> accounting. The path is deterministic; no random
numbers are involved.

Reports render in a cycle-table layout: one row per cycle with
"price; date" buy/sell cells and a percent return, then accumulated and
buy-and-hold rows. Percent and price values display rounded half-up to two
decimals; internal math keeps full precision. parse_report inverts the
rendering (to display precision), which is what the portfolio aggregation
command consumes.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

import numpy as np

from .errors import DomainError, ParseError
from .filters import FilterConfig, Observation, run_filter
from .price_model import excess_demands, log_ratio
from .series import PriceSeries
from .strategy import BacktestReport, TradeCycle, accumulate, buy_hold, mood, mood_ma, ride_mood

MOOD_WARMUP = 5


@dataclass(frozen=True)
class BacktestConfig:
    kind: str  # "gc2" or "gc3"
    lam: float = 0.95
    n: int = 20
    v_floor: float = 1e-12

    def __post_init__(self):
        if self.kind not in ("gc2", "gc3"):
            raise DomainError(f"backtest filter must be 'gc2' or 'gc3', got {self.kind!r}")
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"moving-average window n must be an integer >= 1, got {self.n!r}")
        # delegate lam / v_floor range checks
        FilterConfig(kind=self.kind, dim=2, lam=self.lam, v_floor=self.v_floor)


@dataclass(frozen=True)
class BacktestTrace:
    """Per-bar diagnostics alongside the report, for plotting and audits.

    position[t] is 1 from the buy bar through the bar before the sell bar
    (bought and sold at closes), else 0.
    """

    config: BacktestConfig
    series: PriceSeries
    x: np.ndarray
    moods: np.ndarray
    mood_avg: np.ndarray
    position: np.ndarray
    report: BacktestReport


def trace_backtest(config: BacktestConfig, series: PriceSeries) -> BacktestTrace:
    n = config.n
    bars = len(series)
    if bars <= max(n, MOOD_WARMUP) + 1:
        raise DomainError(
            f"series of {bars} bars is too short: need more than {max(n, MOOD_WARMUP) + 1}"
        )
    closes = series.closes
    x = np.full(bars, np.nan)
    for t in range(n - 1, bars):
        x[t] = log_ratio(closes[t - n + 1 : t + 1])
    observations = []
    for t in range(n, bars):
        ed1, ed2 = excess_demands(x[t - 1])
        observations.append(Observation(r=float(np.log(closes[t] / closes[t - 1])), ed=[ed1, ed2]))
    states = run_filter(
        FilterConfig(kind=config.kind, dim=2, lam=config.lam, v_floor=config.v_floor),
        observations,
    )
    moods = np.full(bars, np.nan)
    for t in range(n, bars):
        moods[t] = mood(states[t - n].a_hat)
    mood_avg = mood_ma(moods)
    cycles = ride_mood(mood_avg, series)
    position = np.zeros(bars, dtype=int)
    for c in cycles:
        i = series.dates.index(c.buy_date)
        j = series.dates.index(c.sell_date)
        position[i:j] = 1
    report = BacktestReport(
        symbol=series.symbol,
        cycles=cycles,
        accumulated_return=accumulate(cycles),
        buy_hold_return=buy_hold(series),
    )
    return BacktestTrace(
        config=config,
        series=series,
        x=x,
        moods=moods,
        mood_avg=mood_avg,
        position=position,
        report=report,
    )


def run_backtest(config: BacktestConfig, series: PriceSeries) -> BacktestReport:
    return trace_backtest(config, series).report


def _half_up(value: float, places: int = 2) -> Decimal:
    quantum = Decimal(1).scaleb(-places)
    return Decimal(str(value)).quantize(quantum, rounding=ROUND_HALF_UP)


def format_pct(fraction: float, places: int = 2) -> str:
    """Render a fractional return as a percent string, half-up."""
    return f"{_half_up(100.0 * fraction, places)}%"


def emit_report(report: BacktestReport, format: str = "tsv") -> bytes:
    """Render a report as a cycle table; TSV or CSV."""
    if format not in ("tsv", "csv"):
        raise DomainError(f"format must be 'tsv' or 'csv', got {format!r}")
    rows = [["cycle", "buy", "sell", "return"]]
    for k, c in enumerate(report.cycles, start=1):
        rows.append(
            [
                str(k),
                f"{_half_up(c.buy_price)}; {c.buy_date.isoformat()}",
                f"{_half_up(c.sell_price)}; {c.sell_date.isoformat()}",
                format_pct(c.cycle_return),
            ]
        )
    rows.append(["Accumulated Return", format_pct(report.accumulated_return)])
    rows.append(["Buy&Hold Return", format_pct(report.buy_hold_return)])
    buf = io.StringIO()
    buf.write(f"# symbol={report.symbol}\n")
    buf.write(f"# cycles={len(report.cycles)}\n")
    if format == "csv":
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerows(rows)
    else:
        for row in rows:
            buf.write("\t".join(row) + "\n")
    return buf.getvalue().encode()


@dataclass(frozen=True)
class ParsedReport:
    """Report read back from its rendered form; values at display precision."""

    symbol: str
    cycles: list[TradeCycle]
    accumulated_pct: float
    buy_hold_pct: float


def _parse_trade_cell(cell: str, line: int, path=None) -> tuple[float, dt.date]:
    try:
        price_s, date_s = cell.split(";")
        return float(price_s.strip()), dt.date.fromisoformat(date_s.strip())
    except ValueError:
        raise ParseError(f"bad trade cell {cell!r}", path=path, line=line)


def _parse_pct(cell: str, line: int, path=None) -> float:
    cell = cell.strip()
    if not cell.endswith("%"):
        raise ParseError(f"expected a percent value, got {cell!r}", line=line, path=path)
    try:
        return float(cell[:-1])
    except ValueError:
        raise ParseError(f"bad percent value {cell!r}", line=line, path=path)


def parse_report(data: bytes | str, path: str | None = None) -> ParsedReport:
    """Invert emit_report (either format); tolerant of the comment header."""
    text = data.decode() if isinstance(data, bytes) else data
    symbol = ""
    cycles: list[TradeCycle] = []
    accumulated = None
    bh = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("symbol="):
                symbol = body.split("=", 1)[1]
            if body == "plot-data":  # per-bar diagnostics follow; not report rows
                break
            continue
        cells = next(csv.reader([raw])) if ("," in raw and "\t" not in raw) else raw.split("\t")
        head = cells[0].strip().lower()
        if head == "cycle":
            continue
        if head == "accumulated return":
            accumulated = _parse_pct(cells[1], lineno, path)
        elif head == "buy&hold return":
            bh = _parse_pct(cells[1], lineno, path)
        else:
            if len(cells) != 4:
                raise ParseError(f"expected 4 cells in a cycle row, got {len(cells)}", path=path, line=lineno)
            bp, bd = _parse_trade_cell(cells[1], lineno, path)
            sp, sd = _parse_trade_cell(cells[2], lineno, path)
            cycles.append(TradeCycle(bp, bd, sp, sd))
    if accumulated is None or bh is None:
        raise ParseError("missing Accumulated Return or Buy&Hold Return row", path=path)
    return ParsedReport(symbol=symbol, cycles=cycles, accumulated_pct=accumulated, buy_hold_pct=bh)
