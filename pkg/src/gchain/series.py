"""Dated daily-close price series and CSV ingestion.

Input files carry a `date,close` header, ISO dates, one bar per line.
Parsing is total: a file either loads into a validated series or raises a
ParseError naming the offending line; nothing loads partially.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParseError


@dataclass(frozen=True)
class PriceSeries:
    """Strictly-increasing dated closes, all positive, no duplicate dates."""

    symbol: str
    dates: list[dt.date]
    closes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "closes", np.asarray(self.closes, dtype=float))
        if len(self.dates) != len(self.closes):
            raise DomainError("dates and closes differ in length")
        if not np.all(self.closes > 0):
            raise DomainError("all closes must be > 0")
        for a, b in zip(self.dates, self.dates[1:]):
            if not a < b:
                raise DomainError(f"dates must be strictly increasing, got {a} then {b}")

    def __len__(self) -> int:
        return len(self.closes)

    def log_returns(self) -> np.ndarray:
        """ln(p_t / p_{t-1}); one entry shorter than the series."""
        return np.diff(np.log(self.closes))


def load_prices(path, symbol: str | None = None) -> PriceSeries:
    """Read a `date,close` CSV into a validated PriceSeries.

    Malformed rows (bad date, nonpositive or unparseable close, wrong field
    count, out-of-order or duplicate dates) raise ParseError with the
    1-based line number.
    """
    path = str(path)
    if symbol is None:
        stem = path.rsplit("/", 1)[-1]
        symbol = stem.split(".")[0]
    try:
        fh = open(path, "r", newline="")
    except OSError as exc:
        raise ParseError(f"cannot open: {exc.strerror}", path=path) from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("file is empty, expected a `date,close` header", path=path, line=1)
        if [h.strip().lower() for h in header] != ["date", "close"]:
            raise ParseError(
                f"bad header {','.join(header)!r}, expected `date,close`", path=path, line=1
            )
        dates: list[dt.date] = []
        closes: list[float] = []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue  # ignore blank lines
            if len(row) != 2:
                raise ParseError(f"expected 2 fields, got {len(row)}", path=path, line=lineno)
            try:
                date = dt.date.fromisoformat(row[0].strip())
            except ValueError:
                raise ParseError(f"bad date {row[0]!r}", path=path, line=lineno)
            try:
                close = float(row[1])
            except ValueError:
                raise ParseError(f"bad close {row[1]!r}", path=path, line=lineno)
            if not close > 0:
                raise ParseError(f"close must be > 0, got {row[1]}", path=path, line=lineno)
            if dates:
                if date == dates[-1]:
                    raise ParseError(f"duplicate date {date}", path=path, line=lineno)
                if date < dates[-1]:
                    raise ParseError(
                        f"dates out of order: {date} after {dates[-1]}", path=path, line=lineno
                    )
            dates.append(date)
            closes.append(close)
    if not dates:
        raise ParseError("no data rows", path=path, line=1)
    return PriceSeries(symbol=symbol, dates=dates, closes=np.array(closes))
