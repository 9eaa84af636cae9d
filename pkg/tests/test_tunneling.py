import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qtunnel.core_model import MarketParams, turning_point
from qtunnel.errors import DomainError, QuadratureError
from qtunnel.tunneling import (
    barrier_profile,
    transmission,
    transmission_closed_form,
    wkb_integral_numeric,
)

# Frozen from a 30-digit mpmath.quad of sqrt((1/S^2 - r/sigma) / h^2) over [K, S*].
MPMATH_REFERENCE = [
    (0.05, 0.2, 1.0, -1.51247356188801436617888518277404, 0.220364218720112269929761234612827),
    (0.05, 0.18, 1.8, -0.0444650440633120221973744646145149, 0.956509035178515209106429192532608),
    (0.01, 0.6, 0.1, -1.36623787735598651821529703485513, 0.255064741616461074385535701660517),
]


@pytest.mark.parametrize("rate, vol, strike, exponent, t", MPMATH_REFERENCE)
def test_closed_form_against_reference(rate, vol, strike, exponent, t):
    rep = transmission_closed_form(MarketParams(rate, vol), strike)
    assert rep.exponent == pytest.approx(exponent, rel=1e-12)
    assert rep.t_closed == pytest.approx(t, rel=1e-12)
    assert rep.geometry.barrier_exists


@pytest.mark.parametrize("rate, vol, strike, exponent, t", MPMATH_REFERENCE)
def test_quadrature_against_reference(rate, vol, strike, exponent, t):
    assert wkb_integral_numeric(MarketParams(rate, vol), strike, 1e-8) == pytest.approx(t, rel=1e-8)


def test_spot_values():
    assert transmission_closed_form(MarketParams(0.05, 0.2), 1.0).t_closed == pytest.approx(0.2204, abs=1e-4)
    assert transmission_closed_form(MarketParams(0.05, 0.18), 1.8).t_closed == pytest.approx(0.9565, abs=1e-4)


def test_zero_width_barrier():
    p = MarketParams(0.05, 0.2)
    rep = transmission_closed_form(p, 2.0)
    assert rep.t_closed == 1.0 and rep.exponent == 0.0
    assert not rep.geometry.barrier_exists
    assert wkb_integral_numeric(p, 2.0) == 1.0
    assert transmission_closed_form(p, 5.0).t_closed == 1.0


def test_strike_must_be_positive():
    with pytest.raises(DomainError):
        transmission_closed_form(MarketParams(0.05, 0.2), 0.0)
    with pytest.raises(DomainError):
        wkb_integral_numeric(MarketParams(0.05, 0.2), -1.0)


@pytest.mark.parametrize("tol", [0.0, 1e-3, -1e-8])
def test_tolerance_range(tol):
    with pytest.raises(DomainError):
        wkb_integral_numeric(MarketParams(0.05, 0.2), 1.0, tol)


def test_quadrature_budget_error():
    with pytest.raises(QuadratureError) as info:
        wkb_integral_numeric(MarketParams(0.01, 0.6), 1e-6, tolerance=1e-12, max_evals=60)
    assert info.value.estimate > 0


def test_near_threshold_series_branch():
    # u < 1e-3 uses the artanh(u) - u series; compare with the quadrature
    p = MarketParams(0.05, 0.2)
    k = 2.0 * math.sqrt(1 - 1e-7)
    rep = transmission(p, k, oracle=True, tolerance=1e-10)
    assert rep.t_closed > 0.9999
    assert rep.rel_gap <= 1e-9


def test_oracle_report_fields():
    rep = transmission(MarketParams(0.05, 0.2), 1.0, oracle=True)
    assert rep.rel_gap <= 1e-6
    d = rep.to_dict()
    assert {"t_closed", "t_quadrature", "rel_gap", "exponent", "geometry"} <= set(d)


@settings(max_examples=200, deadline=None)
@given(rate=st.floats(1e-3, 0.2), vol=st.floats(0.02, 1.0), frac=st.floats(1e-3, 2.0))
def test_range_and_exponent_sign(rate, vol, frac):
    p = MarketParams(rate, vol)
    rep = transmission_closed_form(p, frac * turning_point(p))
    assert rep.exponent <= 0 and math.isfinite(rep.exponent)
    assert rep.t_closed <= 1
    if rep.exponent > -700:  # below about -745 exp() underflows to 0.0
        assert rep.t_closed > 0
    if frac < 1 - 1e-12:
        assert rep.geometry.barrier_exists


def test_strictly_increasing_in_strike():
    p = MarketParams(0.03, 0.25)
    ks = np.linspace(0.02, 0.999, 50) * turning_point(p)
    ts = [transmission_closed_form(p, k).t_closed for k in ks]
    assert all(a < b for a, b in zip(ts, ts[1:]))


def test_volatility_claim_is_not_global():
    # falling sigma raises T only near threshold; far from it the opposite can hold
    t_low = transmission_closed_form(MarketParams(0.05, 0.1), 1.0).t_closed
    t_high = transmission_closed_form(MarketParams(0.05, 0.2), 1.0).t_closed
    assert t_low < t_high


def test_barrier_profile():
    prof = barrier_profile(1.0, 2.0, 2)
    assert prof.rows() == [(1.0, 1.0), (2.0, 0.25)]
    prof = barrier_profile(1.0, 3.0, 50, [0.25, 4.0])
    assert prof.levels[0] == (0.25, 2.0)
    assert prof.levels[1] == (4.0, None)
    assert np.all(np.diff(prof.v) < 0)
    with pytest.raises(DomainError):
        barrier_profile(0.0, 1.0, 10)
    with pytest.raises(DomainError):
        barrier_profile(2.0, 1.0, 10)
