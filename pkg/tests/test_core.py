import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopcpt.core import (
    PredictionInterval,
    SplitSpec,
    TimeSeriesDataset,
    WeightVector,
    compute_errors,
    normalize_weights,
    read_csv,
    write_csv,
)

finite = st.floats(-1e6, 1e6, allow_nan=False)


def test_compute_errors_examples():
    np.testing.assert_array_equal(compute_errors([3.0, 5.0], [2.0, 6.0]), [1.0, -1.0])
    np.testing.assert_array_equal(compute_errors([0.0], [0.0]), [0.0])
    y = np.linspace(-3, 9, 17)
    np.testing.assert_array_equal(compute_errors(y, y), np.zeros(17))


def test_compute_errors_length_mismatch():
    with pytest.raises(ValueError):
        compute_errors([1.0, 2.0], [1.0])


@pytest.mark.parametrize("raw, expected", [
    ([1, 1, 1, 1], [0.25, 0.25, 0.25, 0.25]),
    ([2, 0], [1.0, 0.0]),
    ([1, 3], [0.25, 0.75]),
])
def test_normalize_weights_examples(raw, expected):
    np.testing.assert_array_equal(normalize_weights(raw).weights, expected)


@pytest.mark.parametrize("raw", [[0, 0], [1, -1], [1, np.inf], [np.nan, 1], []])
def test_normalize_weights_rejects(raw):
    with pytest.raises(ValueError):
        normalize_weights(raw)


@settings(max_examples=200)
@given(st.lists(st.floats(0, 1e3, allow_nan=False), min_size=1, max_size=30).filter(lambda v: sum(v) > 1e-3),
       st.floats(1e-3, 1e3))
def test_normalize_weights_scale_invariant(raw, c):
    a = normalize_weights(raw).weights
    b = normalize_weights(np.asarray(raw) * c).weights
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)
    assert abs(a.sum() - 1) <= 1e-9


def test_weight_vector_validates():
    with pytest.raises(ValueError):
        WeightVector([0.5, 0.4])
    with pytest.raises(ValueError):
        WeightVector([1.5, -0.5])
    assert len(WeightVector.uniform(4)) == 4


@settings(max_examples=100)
@given(st.lists(st.tuples(finite, finite), min_size=1, max_size=40))
def test_dataset_errors_recompute_bitwise(pairs):
    y = np.array([p[0] for p in pairs])
    y_hat = np.array([p[1] for p in pairs])
    ds = TimeSeriesDataset(np.zeros((len(pairs), 1)), y, y_hat)
    assert np.array_equal(compute_errors(ds.targets, ds.predictions), ds.errors)


def test_dataset_invariants():
    x = np.arange(4.0)
    with pytest.raises(ValueError):
        TimeSeriesDataset(x, [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        TimeSeriesDataset(x, np.ones(4), timestamps=np.array([0, 2, 2, 3]))
    with pytest.raises(ValueError):
        TimeSeriesDataset(x, np.ones(4), np.zeros(4), errors=np.full(4, 2.0))
    with pytest.raises(ValueError):
        TimeSeriesDataset(x, [1.0, np.nan, 1.0, 1.0])
    ds = TimeSeriesDataset(x, np.ones(4))
    assert ds.predictions is None and ds.errors is None
    np.testing.assert_array_equal(ds.timestamps, np.arange(4))
    with pytest.raises(ValueError):
        ds.targets[0] = 5.0


def test_prediction_interval_invariants():
    iv = PredictionInterval(-1.0, 2.0, 0.1)
    assert iv.width == 3.0 and iv.covers(2.0) and iv.covers(-1.0) and not iv.covers(2.0001)
    with pytest.raises(ValueError):
        PredictionInterval(2.0, 1.0, 0.1)
    with pytest.raises(ValueError):
        PredictionInterval(0.0, 1.0, 1.0)


def test_split_spec():
    sp = SplitSpec.from_fractions(1000)
    assert (sp.train_end, sp.calib_end, sp.test_end) == (333, 667, 1000)
    with pytest.raises(ValueError):
        SplitSpec(0, 5, 10)
    with pytest.raises(ValueError):
        SplitSpec(5, 5, 10)
    with pytest.raises(ValueError):
        sp.validate_for(999)


def test_csv_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    ds = TimeSeriesDataset(rng.normal(size=(6, 2)), rng.normal(size=6), rng.normal(size=6),
                           timestamps=np.arange(10, 16), regime=np.array([0, 0, 1, 1, 0, 1]))
    path = tmp_path / "s.csv"
    write_csv(ds, path)
    back = read_csv(path)
    np.testing.assert_array_equal(back.features, ds.features)
    np.testing.assert_array_equal(back.targets, ds.targets)
    np.testing.assert_array_equal(back.errors, ds.errors)
    np.testing.assert_array_equal(back.timestamps, ds.timestamps)
    np.testing.assert_array_equal(back.regime, ds.regime)
    assert path.read_text().splitlines()[0] == "t,y,y_hat,x0,x1,regime"


def test_csv_rejects_missing_values(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("t,y,y_hat,x0\n0,1.0,,2.0\n")
    with pytest.raises(ValueError, match="missing value"):
        read_csv(path)
    path.write_text("t,y,x0\n0,1.0,2.0\n")
    with pytest.raises(ValueError, match="missing columns"):
        read_csv(path)
