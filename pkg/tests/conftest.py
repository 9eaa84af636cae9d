import pytest

from qtunnel.synthetic import Breakout, SynthConfig, generate

# Harness used by the detector tests and the acceptance suite.
BREAKOUT = Breakout(at_bar=200, vol_damp=0.25, drift_per_bar=0.004, direction="up")


@pytest.fixture
def range_series():
    return generate(SynthConfig(seed=42, bars=250))


@pytest.fixture
def breakout_series():
    return generate(SynthConfig(seed=7, bars=300, breakout=BREAKOUT))


ACCEPTANCE_LINES = []


def record(criterion, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
    print(ACCEPTANCE_LINES[-1])
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
