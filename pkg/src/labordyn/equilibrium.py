"""Stationary points of the system.

Two solution paths are available:

* bilinear (Lotka-Volterra) responses on both links have a closed-form
  interior equilibrium;
* Holling type II responses with ``k2 = 0`` reduce to three relations that
  each give one coordinate from another (``u`` from ``v``, ``w`` from ``u``,
  ``v`` from ``w``). Chaining them is iterated as a fixed-point map.

The general Holling case with ``k2 > 0`` is not handled.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import InvalidResponse, NoConvergence, SingularEquilibrium, UnsupportedCase
from .model import HOLLING, LV, StateVector, derivative

GUARD = 1e-12
RESIDUAL_TOL = 1e-8


class EquilibriumMethod(enum.Enum):
    ANALYTIC_LV = "AnalyticLV"
    FIXED_POINT_HOLLING = "FixedPointHolling"


@dataclass(frozen=True)
class EquilibriumPoint:
    """A stationary state with its residual ``max|d(state)/dt|``.

    Negative coordinates are kept as computed; ``negative_components`` flags
    them.
    """

    state: StateVector
    residual: float
    method: EquilibriumMethod
    iterations: int = 0
    converged: bool = True

    @property
    def negative_components(self):
        return tuple(name for name, x in zip("uvw", self.state) if x < 0)

    @property
    def nonnegative(self):
        return not self.negative_components

    def as_dict(self):
        return {
            "u": self.state.u,
            "v": self.state.v,
            "w": self.state.w,
            "residual": self.residual,
            "method": self.method.value,
            "iterations": self.iterations,
            "converged": self.converged,
            "negative_components": "".join(self.negative_components),
        }


def verify_equilibrium(params, state):
    """Max-norm of the derivative at ``state``; zero at an exact equilibrium."""
    return derivative(params, StateVector(*state)).max_norm()


def _guard(value, what):
    if not abs(value) >= GUARD:
        raise SingularEquilibrium(f"{what} = {value!r} is too close to zero")
    return value


def resource_level_given_prey(params, v):
    """Resource coordinate balancing the prey equation, for a given prey level.

    This is the intermediate form obtained before the prey equilibrium
    ``v* = a / (alpha1*v0)`` is substituted; ``equilibrium_lv`` uses the fully
    substituted expression instead, so the two can be cross-checked.
    """
    p = params
    den = _guard(p.c - p.alpha2 * p.v0 * v, "c - alpha2*v0*v")
    return (p.alpha2 * p.c * p.w_dag + p.b * den) / (p.alpha1 * p.u0 * den)


def equilibrium_lv(params):
    """Closed-form interior equilibrium with bilinear responses on both links.

    ``v* = a/(alpha1*v0)``, ``w* = c*w_dag/(c*w0 - alpha2*v0*w0*v*)`` and
    ``u* = (alpha1*alpha2*c*w_dag + b*D) / (alpha1*u0*D)`` with
    ``D = alpha1*c - alpha2*a``.

    Raises:
        InvalidResponse: either response is not Lotka-Volterra.
        SingularEquilibrium: ``alpha1*v0`` or ``D`` (the resonance
            ``alpha1*c = alpha2*a``) is below 1e-12 in magnitude.
    """
    p = params
    if p.response1 is not LV or p.response2 is not LV:
        raise InvalidResponse("equilibrium_lv needs Lotka-Volterra responses on both links")
    v = p.a / _guard(p.alpha1 * p.v0, "alpha1*v0")
    w = p.c * p.w_dag / _guard(p.c * p.w0 - p.alpha2 * p.v0 * p.w0 * v, "c*w0 - alpha2*v0*w0*v")
    d = _guard(p.alpha1 * p.c - p.alpha2 * p.a, "alpha1*c - alpha2*a")
    u = (p.alpha1 * p.alpha2 * p.c * p.w_dag + p.b * d) / (p.alpha1 * p.u0 * d)
    state = StateVector(u, v, w)
    return EquilibriumPoint(state, verify_equilibrium(p, state), EquilibriumMethod.ANALYTIC_LV)


def _holling_relations(p):
    """Return the three coordinate maps of the k2 = 0 Holling equilibrium."""
    den_u = _guard(p.u0 * p.a * p.k1, "u0*a*k1")
    den_w = _guard(p.alpha2 * p.w0, "alpha2*w0")

    def u_of_v(v):
        return (p.alpha1 * v * p.v0 - p.a) / den_u

    def w_of_u(u):
        sat = _guard(1.0 + p.k1 * u * p.u0, "1 + k1*u*u0")
        return (p.alpha1 * u * p.u0 / sat - p.b) / den_w

    def v_of_w(w):
        den = _guard(p.alpha2 * p.v0 * w * p.w0, "alpha2*v0*w*w0")
        return p.c * (w * p.w0 - p.w_dag) / den

    return u_of_v, w_of_u, v_of_w


def equilibrium_holling_k2zero(params, seed=None, max_iter=1000, tol=1e-12, residual_tol=RESIDUAL_TOL):
    """Equilibrium with Holling type II responses and ``k2 = 0``.

    Iterates ``v -> u(v) -> w(u) -> v(w)`` from ``seed``. Each iterate is the
    triple ``(u(v_k), v_{k+1}, w(u(v_k)))`` and iteration stops once the
    max-norm change between successive triples drops below ``tol``. When the
    change grows the update switches permanently to a damped one,
    ``v_{k+1} = v_k + 0.5*(v(w) - v_k)``.

    Args:
        params (ModelParams): both responses must be Holling type II, ``k2 = 0``.
        seed (StateVector, optional): starting triple; only its ``v`` drives
            the map. Defaults to ``(1, 1, 1)``.
        max_iter (int): iteration budget.
        tol (float): stopping threshold on the state change.
        residual_tol (float): a stopped iterate whose residual is not below
            this is treated as unconverged.

    Returns:
        EquilibriumPoint: with ``iterations`` set.

    Raises:
        InvalidResponse: responses are not both Holling type II.
        UnsupportedCase: ``k2 != 0``.
        SingularEquilibrium: a guarded denominator vanished (includes ``k1 = 0``).
        NoConvergence: budget exhausted; ``best`` holds the lowest-residual iterate.
    """
    p = params
    if p.response1 is not HOLLING or p.response2 is not HOLLING:
        raise InvalidResponse("equilibrium_holling_k2zero needs Holling type II responses on both links")
    if p.k2 != 0:
        raise UnsupportedCase(f"Holling equilibrium is only available for k2 = 0 (got k2={p.k2!r})")
    u_of_v, w_of_u, v_of_w = _holling_relations(p)

    current = StateVector(*((1.0, 1.0, 1.0) if seed is None else (float(x) for x in seed)))
    damping = 1.0
    last_change = math.inf
    best, best_residual = None, math.inf
    for it in range(1, max_iter + 1):
        v = current.v
        u = u_of_v(v)
        w = w_of_u(u)
        v_next = v + damping * (v_of_w(w) - v)
        candidate = StateVector(u, v_next, w)
        if not candidate.is_finite():
            break
        change = max(abs(x - y) for x, y in zip(candidate, current))
        residual = verify_equilibrium(p, candidate)
        if residual < best_residual:
            best, best_residual = EquilibriumPoint(
                candidate, residual, EquilibriumMethod.FIXED_POINT_HOLLING, it, False), residual
        if change < tol:
            if residual < residual_tol:
                return EquilibriumPoint(candidate, residual, EquilibriumMethod.FIXED_POINT_HOLLING, it)
            break
        if change > last_change and damping == 1.0:
            damping = 0.5
        last_change = change
        current = candidate
    raise NoConvergence(
        f"fixed-point iteration did not converge in {it} iterations (best residual {best_residual!r})",
        best=best, residual=best_residual)


def equilibrium(params, **kwargs):
    """Dispatch on the response pair: analytic for LV/LV, fixed point for Holling/Holling."""
    pair = (params.response1, params.response2)
    if pair == (LV, LV):
        return equilibrium_lv(params)
    if pair == (HOLLING, HOLLING):
        return equilibrium_holling_k2zero(params, **kwargs)
    raise InvalidResponse(f"no equilibrium path for responses {pair[0].value}/{pair[1].value}")
