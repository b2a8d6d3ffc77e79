import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from labordyn import (HOLLING, LV, FunctionalResponseKind, ModelParams, ScaleSchedule, StateVector, derivative,
                      derivative_blasius, equilibrium_lv, functional_response)
from labordyn.errors import DegenerateDenominator, InvalidParams

finite = st.floats(-1e6, 1e6, allow_nan=False)


@pytest.mark.parametrize("kind, x, y, k, expected", [
    (HOLLING, 2.0, 3.0, 0.5, 3.0),
    (HOLLING, 2.0, 3.0, 0.0, 6.0),
    (LV, 0.0, 7.25, 3.0, 0.0),
    (LV, 2.0, 3.0, 100.0, 6.0),
])
def test_functional_response_examples(kind, x, y, k, expected):
    assert functional_response(kind, x, y, k) == expected


def test_functional_response_pole():
    with pytest.raises(DegenerateDenominator):
        functional_response(HOLLING, -2.0, 1.0, 0.5)
    # a custom guard widens the forbidden band
    with pytest.raises(DegenerateDenominator):
        functional_response(HOLLING, -1.999, 1.0, 0.5, eps=1e-3)


def test_functional_response_rejects_negative_k():
    with pytest.raises(InvalidParams):
        functional_response(LV, 1.0, 1.0, -0.1)


@pytest.mark.parametrize("alias, kind", [("lv", LV), ("Lotka-Volterra", LV), ("holling", HOLLING),
                                         ("HollingII", HOLLING), (HOLLING, HOLLING)])
def test_kind_parse(alias, kind):
    assert FunctionalResponseKind.parse(alias) is kind


def test_kind_parse_unknown():
    with pytest.raises(InvalidParams):
        FunctionalResponseKind.parse("ivlev")


@given(finite, finite)
def test_holling_k0_is_lv_exactly(x, y):
    assert functional_response(HOLLING, x, y, 0.0) == functional_response(LV, x, y, 0.0)


def test_derivative_decoupled_unit_state():
    p = ModelParams(a=1, b=1, c=1, alpha1=0, alpha2=0, w_dag=0)
    assert derivative(p, StateVector(1, 1, 1)) == (1.0, -1.0, -1.0)


def test_derivative_origin_only_floor_term():
    p = ModelParams(a=3.3, b=0.7, alpha1=1.1, alpha2=0.4, c=10.0, w_dag=0.006)
    du, dv, dw = derivative(p, StateVector(0, 0, 0))
    assert (du, dv) == (0.0, 0.0)
    assert dw == pytest.approx(0.06, rel=1e-15)


def test_derivative_hand_evaluated_defaults(defaults):
    # u' = 1 - 0.2, v' = -1 + 0.2 - 1, w' = -10*(1 - 0.006) + 1
    got = derivative(defaults, StateVector(1, 1, 1))
    np.testing.assert_allclose(got, (0.8, -1.8, -8.94), rtol=1e-14)


def test_derivative_holling_hand_evaluated():
    p = ModelParams(a=1, b=1, c=2, alpha1=0.5, alpha2=0.25, k1=1.0, k2=1.0, w_dag=0.5,
                    response1=HOLLING, response2=HOLLING)
    # f1 = 2*3/3 = 2, f2 = 3*4/4 = 3
    got = derivative(p, StateVector(2, 3, 4))
    np.testing.assert_allclose(got, (2 - 1.0, -3 + 1.0 - 0.75, -2 * 3.5 + 0.75), rtol=1e-14)


def test_blasius_decoupled():
    p = ModelParams(a=1, b=1, c=1, alpha1=0, alpha2=0, w_dag=0, u0=3.0, v0=0.5, w0=7.0)
    assert derivative_blasius(p, StateVector(2, 2, 2)) == (2.0, -2.0, -2.0)


def test_blasius_differs_when_scaled(defaults):
    p = defaults.with_scales(2.0, 1.0, 1.0)
    scaled = derivative(p, StateVector(1, 1, 1))
    plain = derivative_blasius(p, StateVector(1, 1, 1))
    assert plain.u == pytest.approx(0.8)
    assert scaled.u == pytest.approx(1.6)  # a*u*u0 - alpha1*u*u0*v*v0
    assert scaled.u != plain.u


@given(st.tuples(finite, finite, finite),
       st.sampled_from([LV, HOLLING]), st.sampled_from([LV, HOLLING]))
def test_blasius_equals_derivative_at_unit_scales(state, r1, r2):
    p = ModelParams(k1=0.0, k2=0.0, response1=r1, response2=r2)
    assert derivative(p, StateVector(*state)) == derivative_blasius(p, StateVector(*state))


def test_decoupled_linearity(rng):
    for _ in range(5):
        a, u0 = rng.uniform(0.1, 5), rng.uniform(0.1, 5)
        p = ModelParams(a=a, u0=u0, alpha1=0.0, alpha2=0.0)
        state = StateVector(*rng.uniform(-10, 10, 3))
        assert derivative(p, state).u == pytest.approx(a * u0 * state.u, rel=1e-14)


def test_equilibrium_annihilates_derivative(defaults):
    eq = equilibrium_lv(defaults)
    assert derivative(defaults, eq.state).max_norm() < 1e-10


@pytest.mark.parametrize("field, value", [
    ("k1", -0.1), ("k2", -1.0), ("w_dag", -1e-3), ("u0", 0.0), ("v0", -1.0), ("w0", 0.0),
    ("a", math.nan), ("alpha2", math.inf),
])
def test_params_validation_names_field(field, value):
    with pytest.raises(InvalidParams) as exc:
        ModelParams(**{field: value})
    assert exc.value.field == field


def test_params_immutable(defaults):
    with pytest.raises(dataclasses.FrozenInstanceError):
        defaults.a = 2.0


def test_state_vector_helpers():
    s = StateVector(1.0, -4.0, 2.0)
    assert s.max_norm() == 4.0
    assert s.is_finite()
    assert not StateVector(1.0, math.nan, 0.0).is_finite()


def test_scale_schedule_lookup():
    sched = ScaleSchedule(np.array([[1, 1, 1], [2, 3, 4]], dtype=float), t0=0.0, period=5.0)
    assert sched.at(-1.0) == (1.0, 1.0, 1.0)
    assert sched.at(4.999) == (1.0, 1.0, 1.0)
    assert sched.at(5.0) == (2.0, 3.0, 4.0)
    assert sched.at(1e6) == (2.0, 3.0, 4.0)
    with pytest.raises(InvalidParams):
        ScaleSchedule(np.array([[1, 0, 1]], dtype=float))
