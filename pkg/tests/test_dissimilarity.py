import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from labordyn import (LaborRecord, Period, ScaleSchedule, build_matrix, load_caged_1996, minkowski_distance,
                      observational_scales, series_from_records)
from labordyn.dissimilarity import pairwise
from labordyn.errors import DimensionMismatch, EmptyInput, InvalidExponent, InvalidLag


def make_records(rows, start=Period(2000, 1)):
    out, p = [], start
    for balance, workers, employers in rows:
        out.append(LaborRecord(p, int(balance), int(workers), int(employers)))
        p = p.next()
    return out


@pytest.fixture(scope="module")
def caged_1996():
    return load_caged_1996().records


@pytest.mark.parametrize("x, y, r, expected", [
    ((0, 0, 0), (3, 4, 0), 2, 5.0),
    ((1, 2), (4, 6), 1, 7.0),
    ((1, 2), (4, 6), math.inf, 4.0),
    ((0, 0), (1, 1), 3, 2 ** (1 / 3)),
])
def test_minkowski_examples(x, y, r, expected):
    assert minkowski_distance(x, y, r) == pytest.approx(expected, rel=1e-15)


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=6), st.floats(1.0, 8.0))
def test_minkowski_identity(x, r):
    assert minkowski_distance(x, x, r) == 0.0


def test_minkowski_errors():
    with pytest.raises(DimensionMismatch):
        minkowski_distance([1, 2], [1, 2, 3])
    with pytest.raises(DimensionMismatch):
        minkowski_distance([], [])
    with pytest.raises(InvalidExponent):
        minkowski_distance([1], [2], r=0.5)


def test_identical_records_give_zero_matrix():
    m = build_matrix(make_records([(5, 100, 10), (5, 100, 10)]))
    np.testing.assert_array_equal(m.values, np.zeros((2, 2)))


def test_caged_1996_first_pair(caged_1996):
    m = build_matrix(caged_1996, r=2, normalize=False)
    assert m.n == 12
    assert m.values[0, 1] == pytest.approx(math.sqrt(8532**2 + 4094**2 + 2597**2), rel=1e-15)


def test_caged_1996_normalized_bound(caged_1996):
    m = build_matrix(caged_1996, normalize=True)
    pairs = [(i, j) for i in range(12) for j in range(i + 1, 12)]
    assert len(pairs) == 66
    assert all(0.0 <= m.values[i, j] <= math.sqrt(3) + 1e-15 for i, j in pairs)


def test_build_matrix_needs_two_records(caged_1996):
    with pytest.raises(EmptyInput):
        build_matrix(caged_1996[:1])


def test_metric_axioms_random(rng):
    for _ in range(10):
        X = rng.normal(size=(15, 3)) * [1e4, 1e7, 1e5]
        r = rng.choice([1.0, 2.0, 3.5, math.inf])
        D = pairwise(X, r)
        assert np.array_equal(D, D.T)
        assert np.all(np.diag(D) == 0) and np.all(D >= 0)
        i, j, k = rng.integers(0, 15, size=(3, 200))
        assert np.all(D[i, k] <= D[i, j] + D[j, k] + 1e-9 * D.max())


def test_permutation_equivariance(caged_1996, rng):
    perm = rng.permutation(12)
    base = build_matrix(caged_1996).values
    shuffled = build_matrix([caged_1996[i] for i in perm]).values
    np.testing.assert_array_equal(shuffled, base[np.ix_(perm, perm)])


@pytest.mark.parametrize("component", ["balance", "workers", "employers"])
def test_single_feature_matrix_matches_series(caged_1996, component):
    m = build_matrix(caged_1996, features=(component,))
    s = series_from_records(caged_1996, component, lag=2)
    np.testing.assert_array_equal(s.values, [m.values[t, t + 2] for t in range(10)])


def test_series_caged_1996_values(caged_1996):
    workers = series_from_records(caged_1996, "workers")
    assert workers.values[0] == 4094
    assert len(workers.values) == 11 and workers.lag == 1
    assert series_from_records(caged_1996, "balance").values[1] == 14097


def test_workers_series_equals_balance_magnitude(caged_1996):
    workers = series_from_records(caged_1996, "workers").values
    np.testing.assert_array_equal(workers, [abs(r.balance) for r in caged_1996[1:]])


@pytest.mark.parametrize("lag", [1, 2, 5])
def test_constant_series_zero(lag):
    recs = make_records([(0, 1000, 50)] * 8)
    s = series_from_records(recs, "employers", lag=lag)
    assert np.all(s.values == 0) and len(s.values) == 8 - lag


def test_series_errors(caged_1996):
    with pytest.raises(InvalidLag):
        series_from_records(caged_1996, "workers", lag=0)
    with pytest.raises(EmptyInput):
        series_from_records(caged_1996, "workers", lag=12)


def test_observational_scales_modes(caged_1996):
    assert observational_scales(caged_1996) == (1.0, 1.0, 1.0)
    raw = observational_scales(caged_1996, normalize=False)
    assert raw[1] == pytest.approx(np.mean([abs(r.balance) for r in caged_1996[1:]]))
    sched = observational_scales(caged_1996, mode="streamed")
    assert isinstance(sched, ScaleSchedule) and len(sched) == 11
    np.testing.assert_allclose(sched.scales.mean(axis=0), 1.0, rtol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.integers(-10**5, 10**5), st.integers(0, 10**8), st.integers(0, 10**6)),
                min_size=2, max_size=12),
       st.sampled_from([1.0, 2.0, 3.0]))
def test_matrix_invariants_property(rows, r):
    m = build_matrix(make_records(rows), r=r)
    assert np.array_equal(m.values, m.values.T)
    assert np.all(np.diag(m.values) == 0) and np.all(m.values >= 0)
