"""Seeded range-bound price paths with optional injected breakouts.

Random normals come from NumPy's ``Generator(PCG64(seed))`` via
``standard_normal``; the whole path for one config is drawn in a single call
so the stream layout is fixed.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .marketdata import Bar, PriceSeries

START_DATE = dt.date(2013, 1, 2)
VOLUME = 1000.0
_GUARD = 1e-9


@dataclass(frozen=True)
class Breakout:
    at_bar: int
    vol_damp: float = 0.25
    drift_per_bar: float = 0.004
    direction: str = "up"

    def __post_init__(self):
        if self.at_bar < 1:
            raise DomainError(f"breakout at_bar must be >= 1, got {self.at_bar!r}")
        if not 0 < self.vol_damp < 1:
            raise DomainError(f"vol_damp must lie in (0, 1), got {self.vol_damp!r}")
        if self.direction not in ("up", "down"):
            raise DomainError(f"direction must be 'up' or 'down', got {self.direction!r}")


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 42
    bars: int = 250
    start: float = 100.0
    support: float = 95.0
    resistance: float = 105.0
    daily_vol: float = 0.01
    breakout: Breakout | None = None
    symbol: str = "SYNTH"

    def __post_init__(self):
        if not 0 < self.support < self.start < self.resistance:
            raise DomainError(
                f"need 0 < support < start < resistance, got "
                f"{self.support!r} < {self.start!r} < {self.resistance!r}")
        if self.bars < 2:
            raise DomainError(f"bars must be >= 2, got {self.bars!r}")
        if not self.daily_vol > 0:
            raise DomainError(f"daily_vol must be > 0, got {self.daily_vol!r}")
        if not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")


def trading_dates(count: int, start: dt.date = START_DATE) -> list:
    """``count`` consecutive weekdays starting at ``start`` (rolled forward)."""
    out = []
    day = start
    while len(out) < count:
        if day.weekday() < 5:
            out.append(day)
        day += dt.timedelta(days=1)
    return out


def _reflect(c, support, resistance, reflect_up, reflect_down):
    # repeated geometric reflection; a single huge step may bounce twice
    while True:
        if reflect_up and c > resistance:
            c = resistance * resistance / c
        elif reflect_down and c < support:
            c = support * support / c
        else:
            return c


def simulate_closes(config: SynthConfig) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(config.seed))
    eps = rng.standard_normal(config.bars - 1)
    closes = np.empty(config.bars)
    closes[0] = config.start
    b = config.breakout
    c = config.start
    for t in range(1, config.bars):
        sigma = config.daily_vol
        drift = 0.0
        reflect_up = reflect_down = True
        if b is not None and t >= b.at_bar:
            sigma *= b.vol_damp
            drift = b.drift_per_bar
            if b.direction == "up":
                reflect_up = False
            else:
                reflect_down = False
        c = c * math.exp(sigma * eps[t - 1] - 0.5 * sigma * sigma + drift)
        c = _reflect(c, config.support, config.resistance, reflect_up, reflect_down)
        closes[t] = c
    return closes


def generate(config: SynthConfig) -> PriceSeries:
    """Build the OHLCV series: open = previous close, high/low padded by daily_vol/4."""
    closes = simulate_closes(config)
    pad = config.daily_vol / 4.0
    dates = trading_dates(config.bars)
    bars = []
    prev = config.start
    for date, close in zip(dates, closes):
        o = float(prev)
        c = float(close)
        bars.append(Bar(date, o, max(o, c) * (1 + pad), min(o, c) * (1 - pad), c, VOLUME))
        prev = c
    return PriceSeries(config.symbol, bars)
