"""Daily OHLCV bars from CSV and close-to-close realized volatility."""

from __future__ import annotations

import datetime as dt
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InputFormatError, InsufficientDataError, IntegrityError

HEADER = ("date", "open", "high", "low", "close", "volume")
TRADING_DAYS = 252


@dataclass(frozen=True)
class Bar:
    date: dt.date
    open: float
    high: float
    low: float
    close: float
    volume: float

    def __post_init__(self):
        for name in ("open", "high", "low", "close"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be a positive price, got {value!r}")
        if not (math.isfinite(self.volume) and self.volume >= 0):
            raise DomainError(f"volume must be >= 0, got {self.volume!r}")
        if self.low > min(self.open, self.close) or self.high < max(self.open, self.close):
            raise DomainError(
                f"bar {self.date}: need low <= min(open, close) and high >= max(open, close)")


@dataclass(frozen=True)
class PriceSeries:
    symbol: str
    bars: tuple

    def __post_init__(self):
        object.__setattr__(self, "bars", tuple(self.bars))
        if not self.bars:
            raise DomainError("a price series needs at least one bar")
        for prev, cur in zip(self.bars, self.bars[1:]):
            if cur.date <= prev.date:
                raise IntegrityError(f"dates must be strictly ascending: {prev.date} then {cur.date}")

    def __len__(self):
        return len(self.bars)

    @property
    def closes(self) -> np.ndarray:
        return np.array([b.close for b in self.bars])

    @property
    def highs(self) -> np.ndarray:
        return np.array([b.high for b in self.bars])

    @property
    def lows(self) -> np.ndarray:
        return np.array([b.low for b in self.bars])

    @property
    def dates(self) -> list:
        return [b.date for b in self.bars]

    def scaled(self, factor: float) -> "PriceSeries":
        """Copy with every price multiplied by ``factor``."""
        return PriceSeries(self.symbol, [
            Bar(b.date, b.open * factor, b.high * factor, b.low * factor, b.close * factor,
                b.volume)
            for b in self.bars
        ])


@dataclass(frozen=True)
class VolPoint:
    date: dt.date
    vol: float


def _number(text, column, line):
    try:
        value = float(text)
    except ValueError:
        raise InputFormatError(f"line {line}: column {column!r} is not a number: {text!r}",
                               line=line, column=column) from None
    if not math.isfinite(value):
        raise InputFormatError(f"line {line}: column {column!r} is not finite: {text!r}",
                               line=line, column=column)
    return value


def parse_csv(data, symbol: str = "") -> PriceSeries:
    """Parse ``date,open,high,low,close,volume`` CSV (bytes or str).

    Rows are sorted by date; duplicate dates raise :class:`IntegrityError`.
    Row-level problems raise :class:`InputFormatError` with the 1-based line.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise InputFormatError(f"input is not UTF-8: {exc}") from None
    if data.startswith("﻿"):
        data = data[1:]
    lines = io.StringIO(data, newline=None).read().split("\n")
    if not lines or not lines[0].strip():
        raise InputFormatError("empty input: missing header line", line=1)
    header = [h.strip() for h in lines[0].split(",")]
    for column in HEADER:
        if column not in header:
            raise InputFormatError(f"missing column {column!r} in header", line=1, column=column)
    if tuple(header) != HEADER:
        raise InputFormatError(
            f"header must be exactly {','.join(HEADER)!r}, got {lines[0]!r}", line=1)

    bars = []
    seen = {}
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        fields = [f.strip() for f in raw.split(",")]
        if len(fields) != len(HEADER):
            raise InputFormatError(
                f"line {lineno}: expected {len(HEADER)} fields, got {len(fields)}", line=lineno)
        try:
            date = dt.date.fromisoformat(fields[0])
        except ValueError:
            raise InputFormatError(f"line {lineno}: bad ISO date {fields[0]!r}",
                                   line=lineno, column="date") from None
        o, h, l, c, v = (_number(f, col, lineno) for f, col in zip(fields[1:], HEADER[1:]))
        if date in seen:
            raise IntegrityError(
                f"line {lineno}: duplicate date {date} (first seen on line {seen[date]})",
                line=lineno, column="date")
        seen[date] = lineno
        try:
            bars.append(Bar(date, o, h, l, c, v))
        except DomainError as exc:
            raise InputFormatError(f"line {lineno}: {exc}", line=lineno) from None
    if not bars:
        raise InputFormatError("no data rows after header", line=2)
    bars.sort(key=lambda b: b.date)
    return PriceSeries(symbol, bars)


def _fmt(x: float) -> str:
    if float(x).is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def to_csv(series: PriceSeries) -> str:
    """Emit the series in the same CSV layout :func:`parse_csv` reads."""
    out = [",".join(HEADER)]
    for b in series.bars:
        out.append(",".join([b.date.isoformat(), _fmt(b.open), _fmt(b.high), _fmt(b.low),
                             _fmt(b.close), _fmt(b.volume)]))
    return "\n".join(out) + "\n"


def _check_window(window):
    if int(window) != window or window < 2:
        raise DomainError(f"window must be an integer >= 2, got {window!r}")


def _window_vol(closes: np.ndarray, end_index: int, window: int) -> float:
    segment = closes[end_index - window:end_index + 1]
    rets = np.log(segment[1:] / segment[:-1])
    return float(np.std(rets, ddof=1)) * math.sqrt(TRADING_DAYS)


def realized_volatility(series: PriceSeries, window: int, end_index: int) -> VolPoint:
    """Annualized sample std (ddof=1) of the ``window`` log returns ending at ``end_index``."""
    _check_window(window)
    if end_index >= len(series) or end_index < 0:
        raise InsufficientDataError(
            f"end_index {end_index} outside series of {len(series)} bars",
            required=end_index + 1, available=len(series))
    if end_index < window:
        raise InsufficientDataError(
            f"window {window} needs {window + 1} bars ending at index {end_index}, "
            f"only {end_index + 1} available",
            required=window + 1, available=end_index + 1)
    return VolPoint(series.bars[end_index].date, _window_vol(series.closes, end_index, window))


def rolling_vol(series: PriceSeries, window: int) -> np.ndarray:
    """Array aligned with bars; NaN where fewer than ``window`` returns exist."""
    _check_window(window)
    closes = series.closes
    out = np.full(len(series), np.nan)
    for i in range(window, len(series)):
        out[i] = _window_vol(closes, i, window)
    return out


def vol_series(series: PriceSeries, window: int) -> list:
    """One :class:`VolPoint` per bar from index ``window`` onward."""
    _check_window(window)
    if len(series) < window + 1:
        raise InsufficientDataError(
            f"window {window} needs at least {window + 1} bars, series has {len(series)}",
            required=window + 1, available=len(series))
    vols = rolling_vol(series, window)
    dates = series.dates
    return [VolPoint(dates[i], float(vols[i])) for i in range(window, len(series))]
