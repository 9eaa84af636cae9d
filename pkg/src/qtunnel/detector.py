"""Tunneling-breakout detection inside range-bound regimes.

A breakout close is flagged as a tunneling event when the short-window
volatility has collapsed relative to the long-window volatility and the
transmission coefficient of the breached wall, evaluated at the long-window
volatility, is above threshold.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .core_model import MarketParams
from .errors import DomainError, InsufficientDataError
from .marketdata import PriceSeries, rolling_vol
from .regime import RangeBound, RegimeParams, containment, detect_range
from .regime import walls as window_walls
from .tunneling import transmission_closed_form

logger = logging.getLogger(__name__)

NORMALIZATIONS = ("midpoint",)


@dataclass(frozen=True)
class DetectorConfig:
    rate: float = 0.05
    t_threshold: float = 0.95
    vol_drop_ratio: float = 0.5
    vol_fast_window: int = 5
    vol_slow_window: int = 20
    normalization: str = "midpoint"
    # bars after a regime's last bar still eligible for its breakout
    lookahead: int = 20

    def __post_init__(self):
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise DomainError(f"rate must be > 0, got {self.rate!r}")
        if not 0 < self.t_threshold <= 1:
            raise DomainError(f"t_threshold must lie in (0, 1], got {self.t_threshold!r}")
        if not 0 < self.vol_drop_ratio < 1:
            raise DomainError(f"vol_drop_ratio must lie in (0, 1), got {self.vol_drop_ratio!r}")
        if self.vol_fast_window < 2 or self.vol_slow_window < 2:
            raise DomainError("volatility windows must be >= 2")
        if not self.vol_fast_window < self.vol_slow_window:
            raise DomainError(
                f"vol_fast_window ({self.vol_fast_window}) must be < "
                f"vol_slow_window ({self.vol_slow_window})")
        if self.normalization not in NORMALIZATIONS:
            raise DomainError(f"unknown normalization {self.normalization!r}")
        if self.lookahead < 0:
            raise DomainError(f"lookahead must be >= 0, got {self.lookahead!r}")

    def to_dict(self):
        return {
            "rate": self.rate,
            "t_threshold": self.t_threshold,
            "vol_drop_ratio": self.vol_drop_ratio,
            "vol_fast_window": self.vol_fast_window,
            "vol_slow_window": self.vol_slow_window,
            "normalization": self.normalization,
            "lookahead": self.lookahead,
        }


@dataclass(frozen=True)
class TunnelEvent:
    bar_index: int
    date: object
    direction: str
    regime_index: int
    regime: RangeBound
    walls: RangeBound
    close: float
    level: float
    strike: float
    t_at_event: float
    vol_fast: float
    vol_slow: float
    t_trajectory: tuple = ()

    def to_dict(self):
        return {
            "bar_index": self.bar_index,
            "date": self.date.isoformat(),
            "direction": self.direction,
            "regime_index": self.regime_index,
            "support": self.walls.support,
            "resistance": self.walls.resistance,
            "walls_end_index": self.walls.end_index,
            "close": self.close,
            "level": self.level,
            "strike": self.strike,
            "t_at_event": self.t_at_event,
            "vol_fast": self.vol_fast,
            "vol_slow": self.vol_slow,
            "t_trajectory": [[i, t] for i, t in self.t_trajectory],
        }


@dataclass(frozen=True)
class ScanReport:
    symbol: str
    config: DetectorConfig
    regime_params: RegimeParams
    regimes: list
    events: list
    diagnostics: list = field(default_factory=list)

    def to_dict(self):
        return {
            "symbol": self.symbol,
            "config": {**self.config.to_dict(), "regime": self.regime_params.to_dict()},
            "regimes": [r.to_dict() for r in self.regimes],
            "events": [e.to_dict() for e in self.events],
            "diagnostics": self.diagnostics,
        }

    def to_json(self) -> str:
        """Canonical JSON: sorted keys, fixed separators, no NaN."""
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, allow_nan=False) + "\n"


def wall_snapshot(lows, highs, closes, end: int, window: int) -> RangeBound:
    """Support/resistance of the ``window`` bars ending at ``end``."""
    start = end - window + 1
    sup, res = window_walls(lows[start:end + 1], highs[start:end + 1])
    return RangeBound(start, end, sup, res, containment(closes[start:end + 1], sup, res))


def normalized_strike(regime: RangeBound, level: float, normalization: str = "midpoint") -> float:
    if normalization != "midpoint":
        raise DomainError(f"unknown normalization {normalization!r}")
    return level / regime.midpoint


def evaluate_bar(params: MarketParams, regime: RangeBound, close: float,
                 direction_level: float, normalization: str = "midpoint") -> float:
    """Transmission coefficient for breaching ``direction_level`` of ``regime``."""
    if not close > 0:
        raise DomainError(f"close must be > 0, got {close!r}")
    strike = normalized_strike(regime, direction_level, normalization)
    return transmission_closed_form(params, strike).t_closed


def _t_or_none(rate, vol, regime, level, normalization):
    if not (math.isfinite(vol) and vol > 0):
        return None
    strike = normalized_strike(regime, level, normalization)
    return transmission_closed_form(MarketParams(rate, float(vol)), strike).t_closed


def _opt(x):
    return None if x is None or not math.isfinite(x) else float(x)


def scan(series: PriceSeries, config: DetectorConfig | None = None,
         regime_params: RegimeParams | None = None) -> ScanReport:
    """Detect regimes, then look for at most one event per regime and direction.

    Each bar from a regime's start up to ``config.lookahead`` bars past its
    end (stopping before the next regime) is tested against the walls of the
    ``regime_params.window`` bars ending at the previous bar; past the regime's
    end those walls stay frozen at its last bar. An event fires at the first
    bar where the close is outside those walls, vol_fast <= vol_drop_ratio *
    vol_slow, and the transmission coefficient of the breached wall, with
    sigma = vol_slow and K = wall / wall midpoint, is >= t_threshold.
    """
    config = config or DetectorConfig()
    regime_params = regime_params or RegimeParams()
    n = len(series)
    need = max(regime_params.window, regime_params.min_length, config.vol_slow_window + 1)
    if n < need:
        raise InsufficientDataError(
            f"scan needs at least {need} bars, series has {n}", required=need, available=n)

    regimes = detect_range(series, regime_params)
    closes = series.closes
    dates = series.dates
    fast = rolling_vol(series, config.vol_fast_window)
    slow = rolling_vol(series, config.vol_slow_window)
    norm = config.normalization

    owner = [None] * n
    in_regime = [False] * n
    spans = []
    for j, reg in enumerate(regimes):
        stop = min(reg.end_index + config.lookahead, n - 1)
        if j + 1 < len(regimes):
            stop = min(stop, regimes[j + 1].start_index - 1)
        spans.append((reg.start_index, stop))
        for i in range(reg.start_index, stop + 1):
            owner[i] = j
        for i in range(reg.start_index, reg.end_index + 1):
            in_regime[i] = True

    lows, highs = series.lows, series.highs
    w = regime_params.window

    def walls_before(i, reg):
        # walls of the window ending at the previous bar, frozen at the regime's end
        ref = min(max(i - 1, w - 1), reg.end_index)
        return wall_snapshot(lows, highs, closes, ref, w)

    events = []
    for j, (reg, (lo, hi)) in enumerate(zip(regimes, spans)):
        fired = set()
        for i in range(lo, hi + 1):
            snap = walls_before(i, reg)
            c = closes[i]
            if c > snap.resistance:
                direction, level = "up", snap.resistance
            elif c < snap.support:
                direction, level = "down", snap.support
            else:
                continue
            if direction in fired:
                continue
            vf, vs = fast[i], slow[i]
            if not (math.isfinite(vf) and math.isfinite(vs) and vs > 0):
                continue
            if vf > config.vol_drop_ratio * vs:
                continue
            t = _t_or_none(config.rate, vs, snap, level, norm)
            if t is None or t < config.t_threshold:
                continue
            traj = []
            for k in range(max(lo, i - config.vol_slow_window + 1), i + 1):
                tk = _t_or_none(config.rate, slow[k], snap, level, norm)
                if tk is not None:
                    traj.append((k, tk))
            events.append(TunnelEvent(
                bar_index=i, date=dates[i], direction=direction, regime_index=j, regime=reg,
                walls=snap, close=float(c), level=float(level),
                strike=normalized_strike(snap, level, norm), t_at_event=t,
                vol_fast=float(vf), vol_slow=float(vs), t_trajectory=tuple(traj)))
            fired.add(direction)
            logger.info("%s: %s tunneling event at bar %d (T=%.4f)",
                        series.symbol, direction, i, t)
    events.sort(key=lambda e: (e.bar_index, e.direction))

    diagnostics = []
    for i in range(n):
        t = None
        j = owner[i]
        if j is not None:
            snap = walls_before(i, regimes[j])
            level = snap.resistance if closes[i] >= snap.midpoint else snap.support
            t = _t_or_none(config.rate, slow[i], snap, level, norm)
        diagnostics.append({
            "date": dates[i].isoformat(),
            "close": float(closes[i]),
            "vol_fast": _opt(fast[i]),
            "vol_slow": _opt(slow[i]),
            "t": t,
            "in_regime": in_regime[i],
        })
    return ScanReport(series.symbol, config, regime_params, regimes, events, diagnostics)
