import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopcpt.basemodel import (
    REGIME_HIGH,
    REGIME_LOW,
    RegimeSeriesConfig,
    RidgeFitError,
    generate_regime_series,
    ridge_fit,
    ridge_predict,
)


def ridge_oracle(x, y, lam):
    """Minimize ||y - b - Xw||^2 + lam ||w||^2 by solving the augmented system directly."""
    n, m = x.shape
    a = np.hstack([np.ones((n, 1)), x])
    penalty = np.diag([0.0] + [lam] * m)
    sol = np.linalg.solve(a.T @ a + penalty, a.T @ y)
    return sol[1:], sol[0]


def test_ridge_two_points():
    # centered x = [-0.5, 0.5], y = [-0.5, 0.5]: w = 0.5 / (0.5 + 1) = 1/3, b = 1.5 - 1.5/3 = 1
    model = ridge_fit([[1.0], [2.0]], [1.0, 2.0], lam=1.0)
    assert abs(model.coefficients[0] - 1 / 3) <= 1e-12
    assert abs(model.intercept - 1.0) <= 1e-12
    w, b = ridge_oracle(np.array([[1.0], [2.0]]), np.array([1.0, 2.0]), 1.0)
    assert abs(w[0] - 1 / 3) <= 1e-12 and abs(b - 1.0) <= 1e-12


def test_ridge_zero_lambda_is_least_squares():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(40, 3))
    y = x @ np.array([1.0, -2.0, 0.5]) + 4.0
    model = ridge_fit(x, y, lam=0.0)
    np.testing.assert_allclose(model.coefficients, [1.0, -2.0, 0.5], atol=1e-10)
    assert abs(model.intercept - 4.0) <= 1e-10


def test_ridge_singular_raises():
    with pytest.raises(RidgeFitError):
        ridge_fit([[1.0], [1.0], [1.0]], [1.0, 2.0, 3.0], lam=0.0)
    with pytest.raises(ValueError):
        ridge_fit([[1.0, 2.0]], [1.0], lam=1.0)
    with pytest.raises(ValueError):
        ridge_fit([[1.0], [2.0]], [1.0, 2.0], lam=-1.0)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 4), st.floats(0.01, 100))
def test_ridge_matches_oracle_and_normal_equations(seed, m, lam):
    rng = np.random.default_rng(seed)
    n = m + int(rng.integers(1, 30))
    x = rng.normal(size=(n, m)) * rng.uniform(0.1, 10, m)
    y = rng.normal(size=n) * 5
    model = ridge_fit(x, y, lam)
    w, b = ridge_oracle(x, y, lam)
    np.testing.assert_allclose(model.coefficients, w, rtol=1e-8, atol=1e-8)
    assert abs(model.intercept - b) <= 1e-8 * max(1.0, abs(b))
    xc, yc = x - x.mean(axis=0), y - y.mean()
    resid = (xc.T @ xc + lam * np.eye(m)) @ model.coefficients - xc.T @ yc
    assert np.max(np.abs(resid)) <= 1e-8 * max(1.0, np.max(np.abs(xc.T @ yc)))


def test_ridge_predict_shape_check():
    model = ridge_fit([[1.0], [2.0], [4.0]], [1.0, 2.0, 3.0])
    assert ridge_predict(model, [[0.0]]).shape == (1,)
    with pytest.raises(ValueError):
        ridge_predict(model, [[0.0, 1.0]])


def _runs(labels):
    bounds = np.flatnonzero(np.diff(labels)) + 1
    return np.diff(np.concatenate([[0], bounds, [labels.size]]))


def test_generator_structure():
    ds = generate_regime_series(RegimeSeriesConfig(total_steps=2000, seed=4))
    x = ds.features[:, 0]
    assert set(np.unique(x)) == {3.0, 21.0}
    assert ds.regime[0] == REGIME_LOW
    np.testing.assert_array_equal(x == 21.0, ds.regime == REGIME_HIGH)
    runs = _runs(ds.regime)
    assert runs.min() >= 1 and runs[:-1].max() <= 25  # the last run may be truncated
    assert ds.predictions is None and len(ds) == 2000


def test_generator_forced_unit_lengths():
    ds = generate_regime_series(RegimeSeriesConfig(total_steps=3, regime_len_min=1, regime_len_max=1, seed=1))
    np.testing.assert_array_equal(ds.features[:, 0], [3.0, 21.0, 3.0])


def test_generator_noise_moments():
    cfg = RegimeSeriesConfig(total_steps=100_000, seed=11)
    ds = generate_regime_series(cfg)
    x = ds.features[:, 0]
    noise = ds.targets - cfg.base_level - x
    low, high = noise[ds.regime == REGIME_LOW], noise[ds.regime == REGIME_HIGH]
    assert abs(low.mean()) <= 0.05
    assert abs(high.mean()) <= 0.3
    assert abs(low.std() - 1.5) <= 0.05  # sd x/2
    assert abs(high.std() - 21 / np.sqrt(3)) <= 0.2  # uniform on [-21, 21]
    assert np.all(np.abs(high) <= 21)


def test_generator_reproducible():
    a = generate_regime_series(RegimeSeriesConfig(total_steps=300, seed=5))
    b = generate_regime_series(RegimeSeriesConfig(total_steps=300, seed=5))
    c = generate_regime_series(RegimeSeriesConfig(total_steps=300, seed=6))
    assert np.array_equal(a.targets, b.targets)
    assert not np.array_equal(a.targets, c.targets)
