"""Gaussian-Chain (GC) distribution: sampling, moments, tails, density.

A q'th-order Gaussian-Chain variable is built from a chain of Gaussians in
which each level's scale is the absolute value of a Gaussian draw from the
level below:

    scale_1 = sigma                      (non-random)
    scale_j ~ N(0, |scale_{j-1}|)        j = 2..q
    X       ~ N(m,  |scale_q|)

Unrolling the chain gives the equivalent one-pass product form

    X = m + sigma * z_1 * |z_2| * ... * |z_q|,   z_j i.i.d. N(0, 1),

which is what :func:`sample` uses. The mean and variance are m and sigma^2
for every order, but the fourth central moment is 3^q * sigma^4, so the
excess kurtosis 3^q - 3 grows exponentially with q: longer chains mean
heavier tails with identical low-order statistics.

Tail probabilities have no closed form for q > 1 and are estimated by
Monte Carlo over independent shards whose counts are merged exactly, so a
fixed seed gives bit-identical results regardless of worker count.
"""

from __future__ import annotations

from dataclasses import dataclass
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import DomainError

# Shard size for Monte-Carlo estimation. Fixed so that (seed, n_samples)
# determines the per-shard streams, and therefore the result, exactly.
MC_SHARD = 1_000_000


@dataclass(frozen=True)
class GcParams:
    """Order q >= 1, location m, scale sigma > 0 of one GC variable."""

    q: int
    m: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if int(self.q) != self.q or self.q < 1:
            raise DomainError(f"order q must be an integer >= 1, got {self.q!r}")
        if not self.sigma > 0:
            raise DomainError(f"scale sigma must be > 0, got {self.sigma!r}")


@dataclass(frozen=True)
class GcMoments:
    mean: float
    variance: float
    third_central: float
    fourth_central: float
    excess_kurtosis: float


@dataclass(frozen=True)
class TailTable:
    """Two-sided tail probabilities, in percent, per (order, threshold) cell.

    cells[i][j] estimates 100 * P(|X| > thresholds[j]) for a standard GC
    variable of order orders[i]. Presentation layers may render the x = 1
    column as the complementary central mass 100 - cell (the conventional
    first column of the conventional table rendering); the stored cell is
    always the tail.
    """

    orders: tuple[int, ...]
    thresholds: tuple[float, ...]
    cells: np.ndarray  # shape (len(orders), len(thresholds)), percent
    sample_count: int


def analytic_moments(params: GcParams) -> GcMoments:
    """Exact central moments of a GC variable; deterministic, no sampling.

    mean = m, variance = sigma^2, third central = 0 (symmetry),
    fourth central = 3^q sigma^4, excess kurtosis = 3^q - 3.
    """
    var = params.sigma**2
    fourth = 3.0**params.q * params.sigma**4
    return GcMoments(
        mean=float(params.m),
        variance=float(var),
        third_central=0.0,
        fourth_central=float(fourth),
        excess_kurtosis=float(3.0**params.q - 3.0),
    )


def _chain_scales(q: int, sigma: float, rng: np.random.Generator, size: int) -> np.ndarray:
    """|scale_q| realized by the product of q-1 absolute standard normals."""
    scales = np.full(size, float(sigma))
    for _ in range(q - 1):
        scales *= np.abs(rng.standard_normal(size))
    return scales


def sample(params: GcParams, rng: np.random.Generator, size: int | None = None):
    """Draw from the GC distribution using the product form.

    Returns a scalar when size is None, else an ndarray of shape (size,).
    Equidistributed with the literal nested chain (scale_j ~ N(0, |scale_{j-1}|));
    the test suite checks the two samplers against each other.
    """
    n = 1 if size is None else int(size)
    z = rng.standard_normal(n)
    values = params.m + _chain_scales(params.q, params.sigma, rng, n) * z
    if size is None:
        return float(values[0])
    return values


def standardize(x, m: float, sigma: float):
    """Map a GC(q, m, sigma) value to its standard GC(q, 0, 1) counterpart."""
    if not sigma > 0:
        raise DomainError(f"scale sigma must be > 0, got {sigma!r}")
    return (x - m) / sigma


def _tail_counts_shard(q: int, thresholds: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    absx = np.abs(sample(GcParams(q), rng, size=n))
    return (absx[:, None] > thresholds[None, :]).sum(axis=0)


def tail_counts(
    q: int,
    thresholds,
    n_samples: int,
    rng: np.random.Generator,
    workers: int = 1,
) -> np.ndarray:
    """Exceedance counts #{|X| > x} over n_samples standard GC(q) draws.

    Samples are generated in fixed-size shards with independent child
    streams spawned from rng; counts are summed, so the result depends only
    on (rng state, n_samples), not on workers.
    """
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    thr = np.asarray(thresholds, dtype=float)
    sizes = [MC_SHARD] * (n_samples // MC_SHARD)
    if n_samples % MC_SHARD:
        sizes.append(n_samples % MC_SHARD)
    streams = rng.spawn(len(sizes))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda sn: _tail_counts_shard(q, thr, sn[0], sn[1]), zip(sizes, streams)))
    else:
        parts = [_tail_counts_shard(q, thr, n, r) for n, r in zip(sizes, streams)]
    return np.sum(parts, axis=0)


def tail_prob(q: int, x: float, n_samples: int, rng: np.random.Generator, workers: int = 1) -> float:
    """Monte-Carlo estimate of the two-sided tail 100 * P(|X| > x), percent."""
    if int(q) != q or q < 1:
        raise DomainError(f"order q must be an integer >= 1, got {q!r}")
    if not x > 0:
        raise DomainError(f"threshold x must be > 0, got {x!r}")
    counts = tail_counts(int(q), [x], n_samples, rng, workers=workers)
    return 100.0 * counts[0] / n_samples


def tail_table(
    orders,
    thresholds,
    n_samples: int,
    rng: np.random.Generator,
    workers: int = 1,
) -> TailTable:
    """Tail-probability table over orders x thresholds, one sample set per order."""
    orders = tuple(int(q) for q in orders)
    thresholds = tuple(float(x) for x in thresholds)
    if not orders or not thresholds:
        raise DomainError("orders and thresholds must be non-empty")
    for q in orders:
        if q < 1:
            raise DomainError(f"order q must be >= 1, got {q}")
    for x in thresholds:
        if not x > 0:
            raise DomainError(f"threshold x must be > 0, got {x}")
    cells = np.empty((len(orders), len(thresholds)))
    for i, q in enumerate(orders):
        counts = tail_counts(q, thresholds, n_samples, rng, workers=workers)
        cells[i] = 100.0 * counts / n_samples
    return TailTable(orders=orders, thresholds=thresholds, cells=cells, sample_count=int(n_samples))


def density_mc(params: GcParams, x, n_samples: int, rng: np.random.Generator):
    """Monte-Carlo density estimate: the chain is sampled, x is not.

    Averages the conditional Gaussian density N(m, |scale_q|) evaluated at x
    over draws of the chain scale, i.e. the marginalization integral done by
    sampling the conditioning levels. For q = 1 the scale is deterministic
    and the estimate is the exact normal density. All grid points share the
    same chain draws, so f(m + d) and f(m - d) agree exactly.

    Note: for q >= 2 the true density diverges (logarithmically) at x = m;
    estimates at the exact center are unstable by nature.
    """
    grid = np.atleast_1d(np.asarray(x, dtype=float))
    dev2 = (grid - params.m) ** 2
    total = np.zeros_like(grid)
    remaining = int(n_samples)
    if remaining < 1:
        raise DomainError("n_samples must be >= 1")
    log_norm = 0.5 * np.log(2.0 * np.pi)
    block = max(1024, 8_000_000 // max(1, grid.size))
    while remaining > 0:
        n = min(remaining, block)
        scales = _chain_scales(params.q, params.sigma, rng, n)
        # log of the conditional density keeps tiny scales from overflowing
        logpdf = -0.5 * dev2[:, None] / scales[None, :] ** 2 - np.log(scales)[None, :] - log_norm
        total += np.exp(logpdf).sum(axis=1)
        remaining -= n
    est = total / n_samples
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(est[0])
    return est
