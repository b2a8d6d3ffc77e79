"""Classic fourth-order Runge-Kutta time stepping with optional step doubling."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDenominator, InvalidParams, NonFiniteState, StepSizeUnderflow
from .model import ModelParams, StateVector, make_rhs

BLOWUP_THRESHOLD = 1e12


@dataclass(frozen=True)
class IntegrationConfig:
    """Time span and step control.

    Attributes:
        t0, t_end (float): integration interval, ``t_end > t0``.
        dt (float): base step; in adaptive mode also the step ceiling.
        adaptive (bool): enable step halving driven by a step-doubling error estimate.
        tol (float): local error tolerance of the adaptive mode.
        record_every (int): keep every n-th step (the final state is always kept).
    """

    t0: float = 0.0
    t_end: float = 200.0
    dt: float = 0.01
    adaptive: bool = False
    tol: float = 1e-8
    record_every: int = 1

    def __post_init__(self):
        for name in ("t0", "t_end", "dt", "tol"):
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise InvalidParams(f"{name} must be a real number, got {value!r}", field=name) from None
            if not math.isfinite(value):
                raise InvalidParams(f"{name} must be finite", field=name)
            object.__setattr__(self, name, value)
        if not self.dt > 0:
            raise InvalidParams(f"dt must be > 0, got {self.dt!r}", field="dt")
        if not self.tol > 0:
            raise InvalidParams(f"tol must be > 0, got {self.tol!r}", field="tol")
        if not self.t_end > self.t0:
            raise InvalidParams(f"t_end ({self.t_end!r}) must exceed t0 ({self.t0!r})", field="t_end")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise InvalidParams(f"record_every must be an integer >= 1, got {self.record_every!r}",
                                field="record_every")
        object.__setattr__(self, "record_every", int(self.record_every))
        object.__setattr__(self, "adaptive", bool(self.adaptive))

    def fixed_grid(self):
        """Step boundaries ``t0 = t_0 < t_1 < ... < t_n = t_end`` of fixed-step mode.

        The last step is shortened when ``dt`` does not divide the span.
        """
        ratio = (self.t_end - self.t0) / self.dt
        n = round(ratio)
        if n < 1 or abs(ratio - n) > 1e-9 * max(1.0, ratio):
            n = math.ceil(ratio)
        grid = self.t0 + self.dt * np.arange(n + 1, dtype=float)
        grid[-1] = self.t_end
        return grid


@dataclass(frozen=True)
class Trajectory:
    """Recorded samples of one integration.

    Attributes:
        times (ndarray): shape (n,), strictly increasing.
        states (ndarray): shape (n, 3), columns ``u, v, w``.
        params (ModelParams or None): the parameters used; None for
            trajectories read back from a file.
        steps (int): accepted integration steps.
    """

    times: np.ndarray
    states: np.ndarray
    params: ModelParams | None = None
    steps: int = 0

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states, dtype=float)
        if times.ndim != 1 or states.shape != (times.shape[0], 3):
            raise ValueError(f"inconsistent shapes {times.shape} and {states.shape}")
        if times.shape[0] >= 2 and not np.all(np.diff(times) > 0):
            raise ValueError("times must be strictly increasing")
        times.setflags(write=False)
        states.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)

    def __len__(self):
        return self.times.shape[0]

    @property
    def u(self):
        return self.states[:, 0]

    @property
    def v(self):
        return self.states[:, 1]

    @property
    def w(self):
        return self.states[:, 2]

    def component(self, name):
        return self.states[:, "uvw".index(name)]

    def state(self, i):
        return StateVector(*(float(x) for x in self.states[i]))

    @property
    def final(self):
        return self.state(-1)


def rk4_step(rhs, y, h):
    """One classic RK4 step of an autonomous scalar-tuple system."""
    u, v, w = y
    k1 = rhs(u, v, w)
    h2 = 0.5 * h
    k2 = rhs(u + h2 * k1[0], v + h2 * k1[1], w + h2 * k1[2])
    k3 = rhs(u + h2 * k2[0], v + h2 * k2[1], w + h2 * k2[2])
    k4 = rhs(u + h * k3[0], v + h * k3[1], w + h * k3[2])
    h6 = h / 6.0
    return (
        u + h6 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        v + h6 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        w + h6 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
    )


def _scheduled_step(params, scales, cache):
    """RK4 step whose right-hand side follows a ScaleSchedule.

    A whole step uses the segment containing its midpoint, so steps on a grid
    aligned with the segment boundaries never mix two sets of scales.
    """

    def step(t, y, h):
        i = scales.index_at(t + 0.5 * h)
        if i not in cache:
            cache[i] = make_rhs(params.with_scales(*(float(s) for s in scales.scales[i])))
        return rk4_step(cache[i], y, h)

    return step


def _blown_up(y):
    u, v, w = y
    # NaN fails every comparison, so test the negation
    return not (abs(u) <= BLOWUP_THRESHOLD and abs(v) <= BLOWUP_THRESHOLD and abs(w) <= BLOWUP_THRESHOLD)


def integrate(params, initial, config=None, scales=None):
    """Advance the system from ``initial`` over ``config``'s interval.

    Args:
        params (ModelParams): model coefficients.
        initial (StateVector or sequence of 3 floats): state at ``config.t0``.
        config (IntegrationConfig): time span and step control (defaults if None).
        scales (ScaleSchedule, optional): time-varying observational scales;
            overrides ``params.u0, v0, w0`` when given.

    Returns:
        Trajectory: every ``record_every``-th step plus the final state.

    Raises:
        NonFiniteState: a component became non-finite or exceeded 1e12 in
            magnitude; carries the last finite time and state.
        DegenerateDenominator: Holling denominator vanished; ``time`` is set.
    """
    config = config or IntegrationConfig()
    y = tuple(float(x) for x in initial)
    if len(y) != 3 or _blown_up(y):
        raise InvalidParams(f"initial state must be 3 finite components, got {initial!r}", field="initial")

    if scales is None:
        rhs = make_rhs(params)
        step = lambda t, y, h: rk4_step(rhs, y, h)  # noqa: E731
    else:
        step = _scheduled_step(params, scales, {})

    if config.adaptive:
        times, states, n_steps = _integrate_adaptive(step, y, config)
    else:
        times, states, n_steps = _integrate_fixed(step, y, config)
    return Trajectory(np.array(times), np.array(states), params, n_steps)


def _advance(step, t, y, h):
    try:
        y_new = step(t, y, h)
    except DegenerateDenominator as exc:
        raise DegenerateDenominator(f"{exc} at t={t!r}", time=t) from exc
    except OverflowError:
        y_new = (math.inf, math.inf, math.inf)
    return y_new


def _integrate_fixed(step, y, config):
    grid = config.fixed_grid().tolist()
    every = config.record_every
    times, states = [grid[0]], [y]
    n = len(grid) - 1
    for i in range(n):
        t = grid[i]
        y_new = _advance(step, t, y, grid[i + 1] - t)
        if _blown_up(y_new):
            raise NonFiniteState(
                f"state left the finite range after t={t!r} (last finite state {y!r})", t, y)
        y = y_new
        if (i + 1) % every == 0 or i + 1 == n:
            times.append(grid[i + 1])
            states.append(y)
    return times, states, n


def _integrate_adaptive(step, y, config):
    t, t_end = config.t0, config.t_end
    h = config.dt
    h_min = 1e-12 * (t_end - config.t0)
    every = config.record_every
    times, states = [t], [y]
    n_accepted = 0
    while t_end - t > 1e-12 * max(1.0, abs(t_end)):
        h_try = min(h, t_end - t)
        y_full = _advance(step, t, y, h_try)
        y_mid = _advance(step, t, y, 0.5 * h_try)
        y_half = y_mid if _blown_up(y_mid) else _advance(step, t + 0.5 * h_try, y_mid, 0.5 * h_try)
        if _blown_up(y_half) or _blown_up(y_full):
            err = math.inf
        else:
            err = max(abs(p - q) for p, q in zip(y_half, y_full))
        if err > config.tol:
            h = 0.5 * h_try
            if h < h_min:
                if err == math.inf:
                    raise NonFiniteState(f"state left the finite range after t={t!r}", t, y)
                raise StepSizeUnderflow(f"adaptive step fell below {h_min!r} at t={t!r}", t, y)
            continue
        last_step = h_try == t_end - t
        t = t_end if last_step else t + h_try
        y = y_half
        n_accepted += 1
        if n_accepted % every == 0 or last_step:
            times.append(t)
            states.append(y)
        h = min(2.0 * h_try, config.dt)
    if times[-1] != t:
        times.append(t)
        states.append(y)
    return times, states, n_accepted


def order_check(params, initial, t_span, dt=None):
    """Empirical convergence order of the fixed-step scheme.

    Integrates over ``[0, t_span]`` with steps ``dt``, ``dt/2`` and ``dt/8``;
    the finest run is the reference. Returns
    ``log2(err(dt) / err(dt/2))`` with max-norm errors at the final time.
    ``dt`` defaults to ``t_span / 40``, small enough for the
    fast employer decay (``c*dt`` well below 1) to be in the asymptotic range.
    """
    dt = t_span / 40.0 if dt is None else dt

    def final(h):
        n_steps = len(IntegrationConfig(0.0, t_span, h).fixed_grid()) - 1
        cfg = IntegrationConfig(0.0, t_span, h, record_every=max(1, n_steps))
        return np.asarray(integrate(params, initial, cfg).states[-1])

    coarse, half, reference = final(dt), final(dt / 2.0), final(dt / 8.0)
    err_coarse = np.max(np.abs(coarse - reference))
    err_half = np.max(np.abs(half - reference))
    if err_half == 0.0:
        return math.inf if err_coarse > 0 else math.nan
    return float(np.log2(err_coarse / err_half))


def sign_changes(traj):
    """Count zero crossings per component: the non-negativity diagnostic.

    Returns:
        dict: ``{"u": n_u, "v": n_v, "w": n_w}``.
    """
    signs = np.sign(traj.states)
    out = {}
    for j, name in enumerate("uvw"):
        s = signs[:, j]
        s = s[s != 0]
        out[name] = int(np.count_nonzero(s[1:] != s[:-1])) if s.size > 1 else 0
    return out
