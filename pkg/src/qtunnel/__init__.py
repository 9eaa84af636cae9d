"""Schrodinger-form pricing equation, stock-price tunneling, and breakout scanning."""

__version__ = "0.1.0"

from .core_model import (
    BarrierGeometry,
    MarketParams,
    barrier_geometry,
    lambda_constant,
    planck_coefficient,
    potential,
    turning_point,
)
from .detector import DetectorConfig, ScanReport, TunnelEvent, evaluate_bar, scan
from .marketdata import Bar, PriceSeries, VolPoint, parse_csv, realized_volatility, to_csv, vol_series
from .regime import RangeBound, RegimeParams, detect_range
from .spectral import Box, EigenSolution, discretize, eigen_spectrum, resonance_gap
from .synthetic import Breakout, SynthConfig, generate
from .tunneling import (
    TransmissionReport,
    barrier_profile,
    transmission,
    transmission_closed_form,
    wkb_integral_numeric,
)
