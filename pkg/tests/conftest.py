import sys
import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from climhet.distributions import CharacteristicSeries

settings.register_profile(
    "climhet", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("climhet")


def make_series(values, start=1950, name="c"):
    values = np.asarray(values, dtype=float)
    return CharacteristicSeries(name, np.arange(start, start + values.size), values)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(module.RESULTS):
        terminalreporter.write_line(line)
