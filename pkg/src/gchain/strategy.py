"""Market mood and the Ride-the-Mood trading rule.

The mood of a bar is the estimated buyer strength plus the (negative)
seller strength, a_hat_1 + a_hat_2: positive means buyers have the upper
hand. The raw mood is noisy, so decisions use its 5-bar trailing average.

Ride-the-Mood is long-only with two states. While flat, a crossing of the
smoothed mood from <= 0 to > 0 buys at that bar's close; while long, a
crossing from >= 0 to < 0 sells at that bar's close. An exact zero never
triggers. A position still open at the last bar is liquidated at the final
close; a buy signal on the last bar itself is ignored, since the cycle it
would open cannot span two bars.

Cycle accounting is arithmetic: a cycle's return is
(sell - buy)/buy and a run's accumulated return is the plain sum of
cycle returns, not the compounded product. Portfolio aggregation is the equally
weighted mean of per-symbol returns.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .series import PriceSeries

MOOD_WINDOW = 5


@dataclass(frozen=True)
class TradeCycle:
    """One buy -> sell round trip executed at bar closes."""

    buy_price: float
    buy_date: dt.date
    sell_price: float
    sell_date: dt.date

    def __post_init__(self):
        if not self.buy_price > 0 or not self.sell_price > 0:
            raise DomainError("cycle prices must be > 0")
        if not self.buy_date < self.sell_date:
            raise DomainError(f"buy date {self.buy_date} must precede sell date {self.sell_date}")

    @property
    def cycle_return(self) -> float:
        return (self.sell_price - self.buy_price) / self.buy_price


@dataclass(frozen=True)
class BacktestReport:
    symbol: str
    cycles: list[TradeCycle]
    accumulated_return: float
    buy_hold_return: float


def mood(a_hat) -> float:
    """Buyer-minus-seller strength from a 2-vector of coefficient estimates.

    The seller coefficient is signed negative, so the plain sum is the
    difference of strengths.
    """
    a = np.asarray(a_hat, dtype=float)
    if a.shape != (2,):
        raise DomainError(f"mood needs a 2-vector, got shape {a.shape}")
    return float(a[0] + a[1])


def mood_ma(moods) -> np.ndarray:
    """Trailing 5-bar mean of the mood; NaN where the window is not full.

    ma[t] averages moods[t-4..t]. A NaN inside the window (warmup bars)
    leaves ma[t] NaN, so definedness propagates automatically.
    """
    m = np.asarray(moods, dtype=float)
    out = np.full(m.shape, np.nan)
    for t in range(MOOD_WINDOW - 1, len(m)):
        out[t] = np.mean(m[t - MOOD_WINDOW + 1 : t + 1])
    return out


def ride_mood(mood_avg, prices: PriceSeries) -> list[TradeCycle]:
    """Run the two-state rule over aligned smoothed moods and closes.

    mood_avg must be aligned 1:1 with prices.bars; NaN entries (warmup)
    produce no signals. Crossing detection starts from a reference value of
    0: coefficient estimates initialize at zero, so the mood is neutral
    before the first defined bar, and a first defined value > 0 is already
    a crossing. The decision at bar t sees only values up to t.
    """
    ma = np.asarray(mood_avg, dtype=float)
    if ma.shape != (len(prices),):
        raise DomainError(
            f"mood series length {ma.shape} does not match price series length {len(prices)}"
        )
    closes = prices.closes
    dates = prices.dates
    last = len(prices) - 1
    cycles: list[TradeCycle] = []
    prev = 0.0
    buy_price: float | None = None
    buy_date: dt.date | None = None
    for t in range(len(prices)):
        cur = ma[t]
        if math.isnan(cur):
            continue
        if buy_price is None and prev <= 0.0 < cur and t != last:
            buy_price, buy_date = float(closes[t]), dates[t]
        elif buy_price is not None and prev >= 0.0 > cur:
            cycles.append(TradeCycle(buy_price, buy_date, float(closes[t]), dates[t]))
            buy_price, buy_date = None, None
        prev = cur
    if buy_price is not None:  # forced liquidation at the final close
        cycles.append(TradeCycle(buy_price, buy_date, float(closes[last]), dates[last]))
    return cycles


def accumulate(cycles) -> float:
    """Arithmetic sum of cycle returns (the table convention; no compounding)."""
    return float(sum(c.cycle_return for c in cycles))


def buy_hold(prices: PriceSeries) -> float:
    """(last - first)/first over the full series."""
    if len(prices) < 2:
        raise DomainError("buy-and-hold needs at least two prices")
    first, last = float(prices.closes[0]), float(prices.closes[-1])
    return (last - first) / first


def portfolio_return(per_symbol_returns) -> float:
    """Equally weighted aggregate: the arithmetic mean."""
    returns = list(per_symbol_returns)
    if not returns:
        raise DomainError("portfolio needs at least one return")
    return float(np.mean(returns))
