import contextlib

import numpy as np
import pytest

from hopcpt.basemodel import RegimeSeriesConfig, generate_regime_series, ridge_fit, ridge_predict
from hopcpt.core import SplitSpec

_ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Record a named acceptance criterion as PASS/FAIL for the terminal summary."""

    @contextlib.contextmanager
    def record(label):
        try:
            yield
        except BaseException:
            _ACCEPTANCE.append((label, "FAIL"))
            raise
        _ACCEPTANCE.append((label, "PASS"))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, status in _ACCEPTANCE:
        terminalreporter.write_line(f"{status}  {label}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def synthetic_with_predictions(seed=0, total_steps=1000, lam=1.0):
    ds = generate_regime_series(RegimeSeriesConfig(total_steps=total_steps, seed=seed))
    split = SplitSpec.from_fractions(len(ds))
    model = ridge_fit(ds.features[split.train], ds.targets[split.train], lam)
    return ds.with_predictions(ridge_predict(model, ds.features)), split


@pytest.fixture(scope="session")
def synthetic():
    return synthetic_with_predictions(seed=7)
