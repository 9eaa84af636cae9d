"""Scalar quantities of the range-bound pricing equation.

All prices entering these formulas are normalized, dimensionless levels.
``rate`` and ``vol`` are annualized fractions (0.05 means 5%).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class MarketParams:
    """Interest rate ``rate`` (r) and stock volatility ``vol`` (sigma)."""

    rate: float
    vol: float

    def __post_init__(self):
        for name in ("rate", "vol"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise DomainError(f"{name} must be a finite number, got {value!r}")
            if value <= 0:
                raise DomainError(f"{name} must be > 0, got {value!r}")


@dataclass(frozen=True)
class BarrierGeometry:
    strike: float
    turning_point: float
    barrier_exists: bool

    def to_dict(self):
        return {
            "strike": self.strike,
            "turning_point": self.turning_point,
            "barrier_exists": self.barrier_exists,
        }


def lambda_constant(params: MarketParams) -> float:
    """Separation constant r / sigma, the 'energy' level of the equation."""
    return params.rate / params.vol


def potential(s: float) -> float:
    """V(S) = 1/S**2, singular at the origin."""
    if not s > 0:
        raise DomainError(f"potential is defined for s > 0 only, got {s!r}")
    return 1.0 / (s * s)


def planck_coefficient(params: MarketParams) -> float:
    """Coefficient sigma^4 / (r (sigma^2 + r)) of the second derivative term."""
    r, v = params.rate, params.vol
    return v**4 / (r * (v * v + r))


def turning_point(params: MarketParams) -> float:
    """Price S* > 0 where V(S*) equals the separation constant."""
    return math.sqrt(params.vol / params.rate)


def barrier_geometry(params: MarketParams, strike: float) -> BarrierGeometry:
    """Classify the level ``strike`` against the turning point.

    A barrier exists iff (r/sigma) K^2 < 1, i.e. the strike lies in the
    classically forbidden region below S*.
    """
    if not strike > 0:
        raise DomainError(f"strike must be > 0, got {strike!r}")
    return BarrierGeometry(
        strike=float(strike),
        turning_point=turning_point(params),
        barrier_exists=lambda_constant(params) * strike * strike < 1.0,
    )
