import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays
from scipy import stats

from climhet.distributions import (
    CHARACTERISTICS, QUANTILE_LEVELS, CharacteristicSeries, characteristic_series,
    characteristics, check_aligned, quantile, quantile_series, quantiles, read_matrix,
    read_samples, write_matrix, write_samples,
)
from climhet.errors import DataError
from climhet.ingest import AnnualSample
from climhet.synthetic import synthetic_samples

finite = st.floats(-60, 60, allow_nan=False, allow_infinity=False)
samples = arrays(np.float64, st.integers(4, 80), elements=finite)
taus = st.floats(0.001, 0.999)


def reference_quantile(values, tau):
    # Position (n - 1) tau on the 0-based sorted array, linear between neighbours.
    xs = sorted(values)
    pos = (len(xs) - 1) * tau
    lo = math.floor(pos)
    hi = min(lo + 1, len(xs) - 1)
    return xs[lo] + (pos - lo) * (xs[hi] - xs[lo])


def test_quantile_small_cases():
    assert quantile([1, 2, 3, 4], 0.5) == 2.5
    assert quantile([4, 1, 3, 2], 0.25) == 1.75
    assert quantile([7.0], 0.9) == 7.0
    assert quantile([0.0, 10.0], 0.05) == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("tau", [0.0, 1.0, -0.1, 1.5])
def test_quantile_rejects_tau_outside_open_interval(tau):
    with pytest.raises(ValueError):
        quantile([1, 2, 3], tau)


def test_quantile_empty_sample():
    with pytest.raises(DataError):
        quantile([], 0.5)


@given(samples, taus)
def test_quantile_matches_numpy_linear(x, tau):
    assert quantile(x, tau) == pytest.approx(np.quantile(x, tau, method="linear"), rel=1e-12, abs=1e-12)


@given(samples, st.lists(taus, min_size=2, max_size=8))
def test_quantiles_monotone_in_tau(x, ts):
    ts = sorted(ts)
    q = quantiles(x, ts)
    assert np.all(np.diff(q) >= -1e-12)
    assert x.min() <= q[0] and q[-1] <= x.max()


@given(samples, taus, st.floats(-20, 20), st.floats(0.01, 20))
def test_quantile_location_scale_equivariance(x, tau, a, b):
    lhs = quantile(a + b * x, tau)
    rhs = a + b * quantile(x, tau)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12 * (abs(a) + b * np.abs(x).max() + 1))


@given(samples, taus, st.randoms(use_true_random=False))
def test_quantile_permutation_invariant(x, tau, rnd):
    y = list(x)
    rnd.shuffle(y)
    assert quantile(y, tau) == quantile(x, tau)


def test_characteristics_against_numpy_scipy(rng):
    x = rng.gamma(2.0, 3.0, 240)
    c = characteristics(x)
    assert list(c) == list(CHARACTERISTICS)
    assert c["mean"] == pytest.approx(x.mean(), rel=1e-13)
    assert c["std"] == pytest.approx(x.std(ddof=1), rel=1e-12)
    assert c["max"] == x.max() and c["min"] == x.min()
    assert c["rank"] == pytest.approx(x.max() - x.min(), rel=1e-14)
    assert c["iqr"] == pytest.approx(np.quantile(x, 0.75) - np.quantile(x, 0.25), rel=1e-12)
    assert c["skw"] == pytest.approx(stats.skew(x, bias=True), rel=1e-10)
    assert c["kur"] == pytest.approx(stats.kurtosis(x, fisher=True, bias=True), rel=1e-10)
    for name, tau in QUANTILE_LEVELS.items():
        assert c[name] == pytest.approx(np.quantile(x, tau), rel=1e-12)


def test_characteristics_constant_sample():
    c = characteristics(np.full(12, 3.5))
    assert c["std"] == 0 and c["iqr"] == 0 and c["rank"] == 0
    assert c["skw"] == 0 and c["kur"] == 0
    assert c["q05"] == c["q95"] == 3.5


def test_characteristics_needs_four_values():
    with pytest.raises(DataError):
        characteristics([1.0, 2.0, 3.0])


@given(arrays(np.float64, st.integers(4, 50), elements=st.floats(-30, 30)), st.floats(-5, 5))
def test_shift_moves_location_not_shape(x, a):
    c0, c1 = characteristics(x), characteristics(x + a)
    for name in ("mean", "max", "min", *QUANTILE_LEVELS):
        assert c1[name] == pytest.approx(c0[name] + a, abs=1e-9)
    for name in ("std", "iqr", "rank"):
        assert c1[name] == pytest.approx(c0[name], abs=1e-9)


def test_series_validation():
    with pytest.raises(ValueError):
        CharacteristicSeries("c", [2000, 1999], [1.0, 2.0])
    with pytest.raises(ValueError):
        CharacteristicSeries("c", [2000, 2001], [1.0, np.nan])
    with pytest.raises(ValueError):
        CharacteristicSeries("c", [2000, 2001], [1.0])


def test_series_gaps_and_time_index():
    s = CharacteristicSeries("c", [1950, 1951, 1954], [1.0, 2.0, 3.0])
    assert s.gaps == (1952, 1953)
    np.testing.assert_array_equal(s.t, [1, 2, 5])
    sub = s.between(1951, 1960)
    assert sub.years.tolist() == [1951, 1954] and sub.t.tolist() == [1, 4]


def test_series_difference_requires_alignment():
    a = CharacteristicSeries("a", [1, 2, 3], [1.0, 2.0, 3.0])
    b = CharacteristicSeries("b", [1, 2, 3], [0.5, 0.5, 0.5])
    d = a - b
    assert d.id == "a-b" and d.values.tolist() == [0.5, 1.5, 2.5]
    with pytest.raises(ValueError):
        a - CharacteristicSeries("c", [2, 3, 4], [1.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        check_aligned([a, CharacteristicSeries("c", [1, 2], [1.0, 1.0])])


def test_characteristic_series_needs_ten_years():
    s = synthetic_samples(T=9, n=20)
    with pytest.raises(DataError):
        characteristic_series(s)


def test_series_from_samples_match_pointwise():
    s = synthetic_samples(T=15, n=50, seed=3)
    series = characteristic_series(s)
    assert set(series) == set(CHARACTERISTICS)
    year = 1957
    assert series["q80"].values[year - 1950] == quantile(s[year], 0.8)
    q = quantile_series(s, 0.33)
    assert q.values[0] == quantile(s[1950], 0.33)


def test_matrix_round_trip_is_exact(tmp_path):
    series = characteristic_series(synthetic_samples(T=12, n=30, seed=1))
    write_matrix(series, tmp_path / "m.csv")
    back = read_matrix(tmp_path / "m.csv")
    assert list(back) == list(CHARACTERISTICS)
    for cid in CHARACTERISTICS:
        np.testing.assert_array_equal(back[cid].values, series[cid].values)
        np.testing.assert_array_equal(back[cid].years, series[cid].years)


def test_matrix_requires_year_column(tmp_path):
    (tmp_path / "m.csv").write_text("yr,mean\n1950,1.0\n")
    with pytest.raises(DataError):
        read_matrix(tmp_path / "m.csv")


def test_samples_round_trip(tmp_path):
    s = synthetic_samples(T=11, n=7, seed=2)
    write_samples(s, tmp_path / "s.csv")
    back = read_samples(tmp_path / "s.csv")
    assert sorted(back) == sorted(s)
    for y in s:
        np.testing.assert_array_equal(back[y].values, s[y].values)


def test_annual_sample_is_read_only():
    a = AnnualSample(2000, np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        a.values[0] = 5.0
    with pytest.raises(DataError):
        AnnualSample(2000, np.array([]))
