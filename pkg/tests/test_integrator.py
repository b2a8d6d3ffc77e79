import math

import numpy as np
import pytest

from labordyn import (IntegrationConfig, ModelParams, ScaleSchedule, StateVector, equilibrium_lv, find_peaks,
                      integrate, order_check, sign_changes)
from labordyn.errors import DegenerateDenominator, InvalidParams, NonFiniteState
from labordyn.model import HOLLING


def final_u(params, dt, t_end=1.0):
    cfg = IntegrationConfig(0.0, t_end, dt, record_every=10**9)
    return integrate(params, (1.0, 1.0, 1.0), cfg).final.u


def test_exponential_growth(decoupled):
    assert abs(final_u(decoupled, 1e-3) - math.e) < 1e-8


def test_decoupled_decay_components(decoupled):
    traj = integrate(decoupled, (1.0, 2.0, 3.0), IntegrationConfig(0.0, 2.0, 1e-3, record_every=100))
    np.testing.assert_allclose(traj.v, 2.0 * np.exp(-traj.times), rtol=1e-10)
    np.testing.assert_allclose(traj.w, 3.0 * np.exp(-traj.times), rtol=1e-10)


def test_equilibrium_is_stationary(defaults):
    eq = equilibrium_lv(defaults).state
    traj = integrate(defaults, eq, IntegrationConfig(0.0, 50.0, 0.01, record_every=1))
    assert np.max(np.abs(traj.states - np.asarray(eq))) < 1e-6


def test_default_run_bounded_and_oscillating(defaults):
    traj = integrate(defaults, (1.0, 1.0, 1.0), IntegrationConfig(0.0, 500.0, 0.01, record_every=1))
    assert np.max(np.abs(traj.states)) < 1e3
    maxima = find_peaks(traj.v, smoothing_window=1, prominence_min=0.0)
    assert len(maxima.indices) >= 20


@pytest.mark.parametrize("case", ["decoupled", "defaults"])
def test_order_check(case, request):
    params = request.getfixturevalue(case)
    p = order_check(params, (1.0, 1.0, 1.0), 1.0)
    assert 3.5 <= p <= 4.5


def test_order_check_blowup(defaults):
    with pytest.raises(NonFiniteState):
        order_check(defaults, (1.0, 1.0, 1.0), 200.0, dt=10.0)


def test_blowup_reports_last_finite(defaults):
    with pytest.raises(NonFiniteState) as exc:
        integrate(defaults, (1.0, 1.0, 1.0), IntegrationConfig(0.0, 200.0, 10.0))
    err = exc.value
    assert math.isfinite(err.last_finite_time) and 0.0 <= err.last_finite_time < 200.0
    assert all(math.isfinite(x) for x in err.last_finite_state)


def test_blowup_guard_is_preemptive():
    # pure growth e^{t}: crosses 1e12 near t = 27.6, long before float overflow
    p = ModelParams(a=1.0, alpha1=0.0, alpha2=0.0, w_dag=0.0)
    with pytest.raises(NonFiniteState) as exc:
        integrate(p, (1.0, 0.0, 0.0), IntegrationConfig(0.0, 100.0, 0.01))
    assert 27.0 < exc.value.last_finite_time < 28.0


def test_degenerate_denominator_carries_time():
    p = ModelParams(response1=HOLLING, k1=1.0, alpha1=0.0, alpha2=0.0, a=-1.0)
    # u decays from -0.5 toward 0 so never hits the pole; start on it instead
    with pytest.raises(DegenerateDenominator) as exc:
        integrate(p, (-1.0, 1.0, 1.0), IntegrationConfig(0.0, 1.0, 0.1))
    assert exc.value.time == 0.0


def test_determinism(defaults):
    cfg = IntegrationConfig(0.0, 20.0, 0.01, record_every=7)
    a = integrate(defaults, (1.0, 1.0, 1.0), cfg)
    b = integrate(defaults, (1.0, 1.0, 1.0), cfg)
    assert a.times.tobytes() == b.times.tobytes()
    assert a.states.tobytes() == b.states.tobytes()


def test_step_refinement(decoupled):
    y = [final_u(decoupled, 0.1 / 2**k) for k in range(3)]
    d1, d2 = abs(y[0] - y[1]), abs(y[1] - y[2])
    assert d1 / d2 >= 8.0


def test_adaptive_matches_fine_fixed(decoupled):
    tol = 1e-8
    cfg = IntegrationConfig(0.0, 1.0, 0.1, adaptive=True, tol=tol)
    adaptive = integrate(decoupled, (1.0, 1.0, 1.0), cfg).final
    fine = integrate(decoupled, (1.0, 1.0, 1.0), IntegrationConfig(0.0, 1.0, 1e-4, record_every=10**9)).final
    assert np.max(np.abs(np.subtract(adaptive, fine))) < 10 * tol


def test_adaptive_chaotic_run_ends_on_t_end(defaults):
    traj = integrate(defaults, (1.0, 1.0, 1.0), IntegrationConfig(0.0, 10.0, 0.05, adaptive=True, tol=1e-6))
    assert traj.times[-1] == 10.0
    assert np.all(np.diff(traj.times) > 0)


@pytest.mark.parametrize("t_end, dt, every", [(1.0, 0.3, 1), (2.0, 0.01, 7), (5.0, 0.5, 100), (0.5, 1.0, 1)])
def test_time_grid_integrity(decoupled, t_end, dt, every):
    traj = integrate(decoupled, (1.0, 1.0, 1.0), IntegrationConfig(0.0, t_end, dt, record_every=every))
    assert len(traj.times) == len(traj.states) >= 2
    assert traj.states.shape == (len(traj.times), 3)
    assert np.all(np.diff(traj.times) > 0)
    assert traj.times[0] == 0.0
    assert abs(traj.times[-1] - t_end) <= dt


def test_trajectory_is_read_only(decoupled):
    traj = integrate(decoupled, (1.0, 1.0, 1.0), IntegrationConfig(0.0, 1.0, 0.1))
    with pytest.raises(ValueError):
        traj.states[0, 0] = 5.0


@pytest.mark.parametrize("kwargs, field", [
    ({"t_end": 0.0}, "t_end"), ({"dt": 0.0}, "dt"), ({"dt": -1.0}, "dt"),
    ({"tol": 0.0}, "tol"), ({"record_every": 0}, "record_every"),
])
def test_config_validation(kwargs, field):
    with pytest.raises(InvalidParams) as exc:
        IntegrationConfig(**kwargs)
    assert exc.value.field == field


def test_constant_schedule_matches_scaled_params(defaults):
    cfg = IntegrationConfig(0.0, 5.0, 0.01, record_every=50)
    scaled = defaults.with_scales(1.5, 0.8, 1.2)
    direct = integrate(scaled, (1.0, 1.0, 1.0), cfg)
    sched = integrate(defaults, (1.0, 1.0, 1.0), cfg, scales=ScaleSchedule(np.array([[1.5, 0.8, 1.2]])))
    np.testing.assert_array_equal(direct.states, sched.states)


def test_schedule_switch_changes_dynamics(defaults):
    cfg = IntegrationConfig(0.0, 4.0, 0.01, record_every=100)
    flat = integrate(defaults, (1.0, 1.0, 1.0), cfg, scales=ScaleSchedule(np.ones((2, 3)), period=2.0))
    stepped = integrate(defaults, (1.0, 1.0, 1.0), cfg,
                        scales=ScaleSchedule(np.array([[1, 1, 1], [2, 1, 1]], dtype=float), period=2.0))
    np.testing.assert_array_equal(flat.states[:3], stepped.states[:3])  # t = 0, 1, 2
    assert not np.array_equal(flat.states[-1], stepped.states[-1])


def test_sign_changes_counts():
    p = ModelParams(a=1.0, b=1.0, c=1.0, alpha1=0.0, alpha2=0.0, w_dag=2.0)
    # w relaxes from -1 toward +2: one crossing; u, v stay positive
    traj = integrate(p, (1.0, 1.0, -1.0), IntegrationConfig(0.0, 3.0, 0.01))
    assert sign_changes(traj) == {"u": 0, "v": 0, "w": 1}
