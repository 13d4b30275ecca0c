"""Gaussian-Chain heavy-tailed distribution, robust recursive filters,
the big-buyer/big-seller price model, and the Ride-the-Mood strategy."""

from .data_io import (
    BacktestConfig,
    BacktestTrace,
    ParsedReport,
    emit_report,
    parse_report,
    run_backtest,
    trace_backtest,
)
from .dist import (
    GcMoments,
    GcParams,
    TailTable,
    analytic_moments,
    density_mc,
    sample,
    standardize,
    tail_prob,
    tail_table,
)
from .errors import DomainError, GchainError, ParseError
from .filters import (
    FilterConfig,
    FilterState,
    Observation,
    TrackingResult,
    gc2_latent_scale,
    gc2_step,
    gc3_latent_scales,
    gc3_step,
    initial_state,
    rls_step,
    run_filter,
    sine_tracking_experiment,
)
from .price_model import (
    ModelConfig,
    SimulatedSeries,
    StrengthPath,
    excess_demands,
    log_ratio,
    simulate_prices,
    snr,
)
from .series import PriceSeries, load_prices
from .strategy import (
    BacktestReport,
    TradeCycle,
    accumulate,
    buy_hold,
    mood,
    mood_ma,
    portfolio_return,
    ride_mood,
)

__version__ = "0.1.0"
