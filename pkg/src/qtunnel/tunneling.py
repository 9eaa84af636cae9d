"""Stock-price transmission coefficient through the 1/S^2 barrier.

Two independent routes are provided:

* :func:`transmission_closed_form` evaluates the WKB exponent through its
  antiderivative,

      T = exp(-2 sqrt(r (sigma^2 + r) / sigma^4) [artanh(u) - u]),
      u = sqrt(1 - (r/sigma) K^2),

* :func:`wkb_integral_numeric` integrates kappa(S) = sqrt((V(S) - lambda) / h^2)
  over the forbidden region [K, S*] by adaptive quadrature.

The logarithm is written as artanh(u) = 1/2 ln((1 + u) / (1 - u)). A variant
with ln(sqrt(lambda K^2 + 1) / sqrt(lambda K^2 - 1)) circulates in print; its
argument is only real for lambda K^2 > 1, where no barrier exists, so it is not
used here (see docs/transmission.md).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import quadrature
from .core_model import (
    BarrierGeometry,
    MarketParams,
    barrier_geometry,
    lambda_constant,
    planck_coefficient,
    turning_point,
)
from .errors import DomainError

DEFAULT_TOLERANCE = 1e-8
DEFAULT_MAX_EVALS = 1_000_000


@dataclass(frozen=True)
class TransmissionReport:
    t_closed: float
    exponent: float
    geometry: BarrierGeometry
    t_quadrature: float | None = None
    rel_gap: float | None = None
    quad_evaluations: int | None = None

    def to_dict(self):
        out = {
            "t_closed": self.t_closed,
            "exponent": self.exponent,
            "geometry": self.geometry.to_dict(),
        }
        if self.t_quadrature is not None:
            out["t_quadrature"] = self.t_quadrature
            out["rel_gap"] = self.rel_gap
            out["quad_evaluations"] = self.quad_evaluations
        return out


def _inverse_h(params: MarketParams) -> float:
    # sqrt(r (sigma^2 + r) / sigma^4) == 1 / sqrt(planck_coefficient)
    r, v = params.rate, params.vol
    return math.sqrt(r * (v * v + r)) / (v * v)


def transmission_closed_form(params: MarketParams, strike: float) -> TransmissionReport:
    """Closed-form transmission coefficient for strike level ``strike``.

    Returns T = 1 with a zero exponent when (r/sigma) K^2 >= 1.
    """
    geometry = barrier_geometry(params, strike)
    if not geometry.barrier_exists:
        return TransmissionReport(t_closed=1.0, exponent=0.0, geometry=geometry)
    u = math.sqrt(1.0 - lambda_constant(params) * strike * strike)
    # artanh(u) - u loses all digits to cancellation for small u; use its series
    if u < 1e-3:
        u2 = u * u
        width = u * u2 * (1.0 / 3.0 + u2 * (1.0 / 5.0 + u2 * (1.0 / 7.0 + u2 / 9.0)))
    else:
        width = math.atanh(u) - u
    exponent = -2.0 * _inverse_h(params) * width
    return TransmissionReport(t_closed=math.exp(exponent), exponent=exponent, geometry=geometry)


def _action_integral(params, strike, tolerance, max_evals):
    if not 0 < tolerance <= 1e-4:
        raise DomainError(f"tolerance must lie in (0, 1e-4], got {tolerance!r}")
    lam = lambda_constant(params)
    h2 = planck_coefficient(params)
    s_star = turning_point(params)

    def integrand(w):
        s = s_star - w * w
        excess = np.maximum(1.0 / (s * s) - lam, 0.0)
        return 2.0 * w * np.sqrt(excess / h2)

    return quadrature.integrate(integrand, 0.0, math.sqrt(s_star - strike),
                                rtol=tolerance, max_evals=max_evals)


def wkb_integral_numeric(params: MarketParams, strike: float,
                         tolerance: float = DEFAULT_TOLERANCE,
                         max_evals: int = DEFAULT_MAX_EVALS) -> float:
    """T = exp(-2 * integral of kappa over [K, S*]) by adaptive quadrature.

    The integrand vanishes like sqrt(S* - S) at the turning point. The
    substitution S = S* - w^2 turns it into a smooth function of w, and the
    Gauss-Kronrod nodes never touch w = 0, so S* itself is never sampled.
    Raises :class:`~qtunnel.errors.QuadratureError` if ``max_evals`` is spent
    before the relative ``tolerance`` is met.
    """
    geometry = barrier_geometry(params, strike)
    if not 0 < tolerance <= 1e-4:
        raise DomainError(f"tolerance must lie in (0, 1e-4], got {tolerance!r}")
    if not geometry.barrier_exists:
        return 1.0
    return math.exp(-2.0 * _action_integral(params, strike, tolerance, max_evals).value)


def transmission(params: MarketParams, strike: float, oracle: bool = False,
                 tolerance: float = DEFAULT_TOLERANCE,
                 max_evals: int = DEFAULT_MAX_EVALS) -> TransmissionReport:
    """Closed-form report, optionally cross-checked by quadrature."""
    report = transmission_closed_form(params, strike)
    if not oracle:
        return report
    if not report.geometry.barrier_exists:
        return TransmissionReport(report.t_closed, report.exponent, report.geometry,
                                  t_quadrature=1.0, rel_gap=0.0, quad_evaluations=0)
    res = _action_integral(params, strike, tolerance, max_evals)
    t_quad = math.exp(-2.0 * res.value)
    return TransmissionReport(
        t_closed=report.t_closed,
        exponent=report.exponent,
        geometry=report.geometry,
        t_quadrature=t_quad,
        rel_gap=abs(report.t_closed - t_quad) / report.t_closed,
        quad_evaluations=res.evaluations,
    )


@dataclass(frozen=True)
class BarrierProfile:
    s: np.ndarray
    v: np.ndarray
    # (lambda level, turning point or None when outside [s_min, s_max])
    levels: list = field(default_factory=list)

    def rows(self):
        return list(zip(self.s.tolist(), self.v.tolist()))


def barrier_profile(s_min: float, s_max: float, points: int,
                    lambda_levels=()) -> BarrierProfile:
    """Sample V(S) = 1/S^2 on a uniform grid and locate each lambda crossing."""
    if not s_min > 0:
        raise DomainError(f"s_min must be > 0, got {s_min!r}")
    if not s_max > s_min:
        raise DomainError(f"s_max must exceed s_min, got {s_min!r}..{s_max!r}")
    if points < 2:
        raise DomainError(f"points must be >= 2, got {points!r}")
    s = np.linspace(s_min, s_max, int(points))
    v = 1.0 / (s * s)
    levels = []
    for lam in lambda_levels:
        if not lam > 0:
            raise DomainError(f"lambda levels must be > 0, got {lam!r}")
        tp = math.sqrt(1.0 / lam)
        levels.append((float(lam), tp if s_min <= tp <= s_max else None))
    return BarrierProfile(s=s, v=v, levels=levels)
