"""Range-bound regime detection with percentile support/resistance walls."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InsufficientDataError
from .marketdata import PriceSeries

DEFAULT_WINDOW = 60
DEFAULT_BAND_FRACTION = 0.10
DEFAULT_CONTAINMENT_MIN = 0.8
DEFAULT_MIN_LENGTH = 40
SUPPORT_PERCENTILE = 5.0
RESISTANCE_PERCENTILE = 95.0
FLAT_WIDEN = 1e-6


@dataclass(frozen=True)
class RegimeParams:
    window: int = DEFAULT_WINDOW
    band_fraction: float = DEFAULT_BAND_FRACTION
    containment_min: float = DEFAULT_CONTAINMENT_MIN
    min_length: int = DEFAULT_MIN_LENGTH

    def __post_init__(self):
        if int(self.window) != self.window or self.window < 2:
            raise DomainError(f"regime window must be an integer >= 2, got {self.window!r}")
        if not 0 < self.band_fraction < 1:
            raise DomainError(f"band_fraction must lie in (0, 1), got {self.band_fraction!r}")
        if not 0 < self.containment_min <= 1:
            raise DomainError(f"containment_min must lie in (0, 1], got {self.containment_min!r}")
        if int(self.min_length) != self.min_length or self.min_length < 1:
            raise DomainError(f"min_length must be a positive integer, got {self.min_length!r}")

    def to_dict(self):
        return {
            "window": self.window,
            "band_fraction": self.band_fraction,
            "containment_min": self.containment_min,
            "min_length": self.min_length,
        }


@dataclass(frozen=True)
class RangeBound:
    start_index: int
    end_index: int
    support: float
    resistance: float
    containment: float

    @property
    def length(self) -> int:
        return self.end_index - self.start_index + 1

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.support + self.resistance)

    @property
    def band(self) -> float:
        return (self.resistance - self.support) / self.midpoint

    def to_dict(self):
        return {
            "start_index": self.start_index,
            "end_index": self.end_index,
            "support": self.support,
            "resistance": self.resistance,
            "containment": self.containment,
        }


def nearest_rank(values: np.ndarray, percentile: float) -> float:
    """Nearest-rank percentile: the ceil(p/100 * n)-th smallest value."""
    ordered = np.sort(np.asarray(values, dtype=float))
    rank = max(1, math.ceil(percentile / 100.0 * ordered.size))
    return float(ordered[rank - 1])


def walls(lows: np.ndarray, highs: np.ndarray) -> tuple:
    """Support and resistance for one window, widened if they coincide."""
    support = nearest_rank(lows, SUPPORT_PERCENTILE)
    resistance = nearest_rank(highs, RESISTANCE_PERCENTILE)
    if resistance <= support:
        mid = 0.5 * (support + resistance)
        support, resistance = mid - FLAT_WIDEN * mid, mid + FLAT_WIDEN * mid
    return support, resistance


def containment(closes: np.ndarray, support: float, resistance: float) -> float:
    closes = np.asarray(closes)
    return float(np.count_nonzero((closes >= support) & (closes <= resistance)) / closes.size)


def detect_range(series: PriceSeries, params: RegimeParams | None = None) -> list:
    """Rolling-window scan for range-bound stretches.

    A window qualifies when its band width (resistance - support) / midpoint
    is at most ``band_fraction`` and at least ``containment_min`` of its
    closes sit inside the walls. Runs of consecutive qualifying windows merge
    into one regime whose walls come from the last window of the run. If the
    merged span then falls below ``containment_min`` against those walls, its
    start is advanced until it does not, and never before the end of the
    previous regime. Regimes shorter than ``min_length``
    bars are dropped.
    """
    params = params or RegimeParams()
    n = len(series)
    need = max(params.window, params.min_length)
    if n < need:
        raise InsufficientDataError(
            f"regime detection needs at least {need} bars, series has {n}",
            required=need, available=n)
    lows, highs, closes = series.lows, series.highs, series.closes
    w = params.window

    qualifying = []
    for end in range(w - 1, n):
        start = end - w + 1
        sup, res = walls(lows[start:end + 1], highs[start:end + 1])
        ok = ((res - sup) / (0.5 * (sup + res)) <= params.band_fraction
              and containment(closes[start:end + 1], sup, res) >= params.containment_min)
        qualifying.append((ok, sup, res))

    regimes = []
    run_start = None
    for k, (ok, sup, res) in enumerate(qualifying + [(False, None, None)]):
        if ok and run_start is None:
            run_start = k
        elif not ok and run_start is not None:
            last = k - 1
            _, sup_last, res_last = qualifying[last]
            # spans of adjacent runs overlap through the window; keep them disjoint
            first = run_start if not regimes else max(run_start, regimes[-1].end_index + 1)
            regime = _close_run(closes, first, last + w - 1, sup_last, res_last,
                                params.containment_min)
            if regime.length >= params.min_length:
                regimes.append(regime)
            run_start = None
    return regimes


def _close_run(closes, start, end, support, resistance, containment_min):
    inside = (closes[start:end + 1] >= support) & (closes[start:end + 1] <= resistance)
    # suffix counts: inside_from[j] = closes inside among indices start+j..end
    inside_from = np.cumsum(inside[::-1])[::-1]
    lengths = np.arange(inside.size, 0, -1)
    frac = inside_from / lengths
    j = int(np.argmax(frac >= containment_min))
    return RangeBound(start + j, end, float(support), float(resistance), float(frac[j]))
