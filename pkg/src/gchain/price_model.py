"""Big-buyer / big-seller price dynamics.

The state is the log-ratio of the price to its n-bar trailing mean,
x_t = ln(p_t / mean(p_{t-n+1}..p_t)); positive x means the price sits above
its average. Two trader classes react to it: buyers accumulate on dips,
sellers distribute on rallies,

    ed_buy(x)  = |x| if x < 0 else 0
    ed_sell(x) = |x| if x > 0 else 0,

so at most one excess demand is nonzero per bar (the orthogonality the
per-coefficient filters rely on). Returns follow

    r_t = a1(t) ed_buy(x_{t-1}) + a2(t) ed_sell(x_{t-1}) + sigma * eps_t

with eps_t i.i.d. standard Gaussian-Chain noise of order q, and prices
update multiplicatively, p_t = p_{t-1} exp(r_t). Buyer strength a1 is
signed positive, seller strength a2 negative.

Simulations freeze the first n bars at p0 so the moving average is fully
populated before the first generated return; the warmup bars carry NaN in
the emitted x/ed/return columns rather than fabricated values.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass

import numpy as np

from .dist import GcParams, sample
from .errors import DomainError
from .series import PriceSeries


@dataclass(frozen=True)
class ModelConfig:
    sigma: float
    q: int
    n: int = 20
    p0: float = 100.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"moving-average window n must be an integer >= 1, got {self.n!r}")
        if not self.sigma > 0:
            raise DomainError(f"noise scale sigma must be > 0, got {self.sigma!r}")
        if int(self.q) != self.q or self.q < 1:
            raise DomainError(f"noise order q must be an integer >= 1, got {self.q!r}")
        if not self.p0 > 0:
            raise DomainError(f"initial price p0 must be > 0, got {self.p0!r}")

    @property
    def warmup(self) -> int:
        """Bars frozen at p0 before the first generated return."""
        return self.n


@dataclass(frozen=True)
class StrengthPath:
    """Per-bar trader strengths over the generated portion of a simulation."""

    a1: np.ndarray
    a2: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a1", np.asarray(self.a1, dtype=float))
        object.__setattr__(self, "a2", np.asarray(self.a2, dtype=float))
        if self.a1.shape != self.a2.shape or self.a1.ndim != 1:
            raise DomainError("a1 and a2 must be 1-d arrays of equal length")

    def __len__(self) -> int:
        return len(self.a1)

    @classmethod
    def from_segments(cls, segments, T: int) -> "StrengthPath":
        """Piecewise-constant path from (t_start, a1, a2) rows.

        Each segment applies from its t_start (0-based, into the generated
        bars) until the next segment or T. Segments must start at 0 and be
        strictly increasing.
        """
        rows = sorted((int(t), float(v1), float(v2)) for t, v1, v2 in segments)
        if not rows:
            raise DomainError("strength path needs at least one segment")
        if rows[0][0] != 0:
            raise DomainError(f"first segment must start at t=0, got {rows[0][0]}")
        starts = [r[0] for r in rows]
        if len(set(starts)) != len(starts):
            raise DomainError("duplicate segment start times")
        if rows[-1][0] >= T:
            raise DomainError(f"segment start {rows[-1][0]} beyond horizon {T}")
        a1 = np.empty(T)
        a2 = np.empty(T)
        bounds = starts[1:] + [T]
        for (t0, v1, v2), t1 in zip(rows, bounds):
            a1[t0:t1] = v1
            a2[t0:t1] = v2
        return cls(a1=a1, a2=a2)


def log_ratio(window) -> float:
    """x = ln(p_t / mean(window)) for a trailing window ending at p_t."""
    w = np.asarray(window, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise DomainError("window must be a non-empty 1-d sequence of prices")
    if not np.all(w > 0):
        raise DomainError("all prices in the window must be > 0")
    return float(np.log(w[-1] / np.mean(w)))


def excess_demands(x: float) -> tuple[float, float]:
    """(buyer, seller) excess demand at log-ratio x; at most one is nonzero."""
    if x < 0:
        return -x, 0.0
    if x > 0:
        return 0.0, x
    return 0.0, 0.0


def snr(signal, noise) -> float:
    """Root-mean-square ratio of the trader impact to the noise term."""
    s = np.asarray(signal, dtype=float)
    n = np.asarray(noise, dtype=float)
    if s.shape != n.shape or s.ndim != 1:
        raise DomainError("signal and noise must be 1-d arrays of equal length")
    noise_power = float(np.sum(n * n))
    if noise_power == 0.0:
        raise DomainError("noise power is zero")
    return float(math.sqrt(float(np.sum(s * s)) / noise_power))


@dataclass(frozen=True)
class SimulatedSeries:
    """Simulation output; index t runs over warmup + generated bars.

    Warmup entries of x, ed1, ed2, r, signal and noise are NaN (x becomes
    defined one bar before the first generated return, once the moving
    average window fills). realized_snr covers the generated bars only.
    """

    config: ModelConfig
    prices: np.ndarray
    x: np.ndarray
    ed1: np.ndarray
    ed2: np.ndarray
    r: np.ndarray
    signal: np.ndarray
    noise: np.ndarray
    realized_snr: float

    def __len__(self) -> int:
        return len(self.prices)

    def to_price_series(self, symbol: str = "SIM", start: dt.date = dt.date(2012, 4, 2)) -> PriceSeries:
        dates = [start + dt.timedelta(days=i) for i in range(len(self.prices))]
        return PriceSeries(symbol=symbol, dates=dates, closes=self.prices.copy())


def simulate_prices(config: ModelConfig, path: StrengthPath, rng: np.random.Generator) -> SimulatedSeries:
    """Generate a price path driven by the strength path plus chain noise."""
    T = len(path)
    if T < 1:
        raise DomainError("strength path is empty")
    n = config.n
    total = n + T
    eps = sample(GcParams(config.q), rng, size=T)
    prices = np.empty(total)
    prices[:n] = config.p0
    x = np.full(total, np.nan)
    ed1 = np.full(total, np.nan)
    ed2 = np.full(total, np.nan)
    r = np.full(total, np.nan)
    signal = np.full(total, np.nan)
    noise = np.full(total, np.nan)
    for t in range(n, total):
        k = t - n
        x_prev = log_ratio(prices[t - n : t])
        d1, d2 = excess_demands(x_prev)
        s_t = path.a1[k] * d1 + path.a2[k] * d2
        w_t = config.sigma * eps[k]
        r_t = s_t + w_t
        prices[t] = prices[t - 1] * math.exp(r_t)
        ed1[t], ed2[t], r[t], signal[t], noise[t] = d1, d2, r_t, s_t, w_t
    # x over every bar with a full window, including the final one
    for t in range(n - 1, total):
        x[t] = log_ratio(prices[t - n + 1 : t + 1])
    try:
        realized = snr(signal[n:], noise[n:])
    except DomainError:  # degenerate run with zero realized noise power
        realized = math.nan
    return SimulatedSeries(
        config=config,
        prices=prices,
        x=x,
        ed1=ed1,
        ed2=ed2,
        r=r,
        signal=signal,
        noise=noise,
        realized_snr=realized,
    )
