import numpy as np
import pytest

from qtunnel.errors import DomainError
from qtunnel.marketdata import rolling_vol
from qtunnel.synthetic import Breakout, SynthConfig, generate

from conftest import BREAKOUT


def test_deterministic():
    cfg = SynthConfig(seed=123, bars=200, breakout=BREAKOUT)
    assert generate(cfg) == generate(cfg)


def test_seed_matters():
    assert generate(SynthConfig(seed=1)).closes.tolist() != generate(SynthConfig(seed=2)).closes.tolist()


@pytest.mark.parametrize("seed", range(20))
def test_containment_without_breakout(seed):
    cfg = SynthConfig(seed=seed, bars=300, daily_vol=0.03)
    closes = generate(cfg).closes
    assert np.all(closes >= cfg.support * (1 - 1e-9))
    assert np.all(closes <= cfg.resistance * (1 + 1e-9))


def test_breakout_exits(breakout_series):
    closes = breakout_series.closes
    assert np.all(closes[:200] <= 105 * (1 + 1e-9))
    above = np.flatnonzero(closes[200:] > 105) + 200
    assert above.size > 0
    # drift 0.004 per bar from somewhere in [95, 105] exits within ~ln(105/95)/0.004 = 25 bars
    assert above[0] <= 230


def test_down_breakout_exits_below():
    cfg = SynthConfig(seed=7, bars=300, breakout=Breakout(200, 0.25, -0.004, "down"))
    closes = generate(cfg).closes
    assert np.any(closes[200:] < 95)


def test_bar_invariants():
    for bar in generate(SynthConfig(seed=9, bars=300, breakout=BREAKOUT)).bars:
        assert bar.low <= min(bar.open, bar.close)
        assert bar.high >= max(bar.open, bar.close)
        assert bar.volume == 1000


def test_realized_vol_sanity_over_seeds():
    dv = 0.01
    outside = 0
    for seed in range(100):
        vols = rolling_vol(generate(SynthConfig(seed=seed, bars=250, daily_vol=dv)), 20)
        mean_vol = np.nanmean(vols)
        if not 0.75 * dv * np.sqrt(252) <= mean_vol <= 1.25 * dv * np.sqrt(252):
            outside += 1
    assert outside == 0


@pytest.mark.parametrize("kwargs", [
    dict(support=100.0),
    dict(bars=1),
    dict(daily_vol=0.0),
    dict(seed=-1),
])
def test_invalid_config(kwargs):
    with pytest.raises(DomainError):
        SynthConfig(**kwargs)


def test_invalid_breakout():
    with pytest.raises(DomainError):
        Breakout(200, vol_damp=1.5)
    with pytest.raises(DomainError):
        Breakout(200, direction="sideways")
