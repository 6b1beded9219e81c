import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from lppl_pm import LpplParams, SynthSpec, TimeSeries, gen_lppl_series

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def noiseless_series():
    """A 60-day LPPL regime after 50 days of a flat level."""
    params = LpplParams(60, 5.0, 0.02, 0.5, 0.01, 0.003, 6.0)
    series, ib = gen_lppl_series(SynthSpec(params, prefix=50, prefix_sigma=0.0))
    return params, series, ib


@pytest.fixture
def ramp():
    return TimeSeries.from_start("2021-01-01", np.linspace(1.0, 2.0, 120))


ACCEPTANCE_LINES = []


def report_criterion(number, passed, detail):
    line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
