"""Shared fixtures: reference cycle tables used as accounting oracles."""

import datetime as dt

import pytest

from gchain.strategy import TradeCycle


def _cycle(bp, bd, sp, sd):
    return TradeCycle(bp, dt.date.fromisoformat(bd), sp, dt.date.fromisoformat(sd))


# HK0005, 2nd-order filter: the full reference cycle list (price; date) with
# the reference rounded per-cycle returns alongside.
HK0005_GC2_CYCLES = [
    (_cycle(70.98, "2012-05-03", 68.11, "2012-05-07"), -4.04),
    (_cycle(60.36, "2012-06-01", 66.56, "2012-07-12"), 10.27),
    (_cycle(65.12, "2012-07-31", 73.54, "2012-11-15"), 12.93),
    (_cycle(76.12, "2012-11-22", 84.48, "2013-02-22"), 10.98),
    (_cycle(80.77, "2013-04-15", 80.72, "2013-04-22"), -0.06),
    (_cycle(82.51, "2013-04-25", 86.80, "2013-05-28"), 5.20),
    (_cycle(85.90, "2013-05-31", 83.45, "2013-08-22"), -2.85),
    (_cycle(83.75, "2013-09-03", 84.25, "2013-09-30"), 0.59),
    (_cycle(84.80, "2013-10-16", 84.20, "2013-12-09"), -0.70),
    (_cycle(81.80, "2013-12-16", 82.00, "2013-12-20"), 0.24),
    (_cycle(83.50, "2013-12-24", 82.10, "2014-01-27"), -1.67),
    (_cycle(84.85, "2014-02-19", 78.55, "2014-03-31"), -7.42),
]

# accumulated-return rows (percent) for the five symbols, per filter order
TABLE_GC2_ACCUMULATED = [23.5, 0.3, -11.0, 54.8, 8.2]
TABLE_GC3_ACCUMULATED = [24.4, 10.4, -10.0, 23.3, 22.7]
TABLE_BUY_HOLD = [15.4, -1.1, -8.8, 4.4, 22.9]


@pytest.fixture
def hk0005_gc2_cycles():
    return [c for c, _ in HK0005_GC2_CYCLES]


@pytest.fixture
def hk0005_gc2_reference_returns():
    return [r for _, r in HK0005_GC2_CYCLES]
