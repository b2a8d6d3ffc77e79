"""Right-hand side of the three-level resources / workers / employers system.

The state ``(u, v, w)`` holds dissimilarities of the balance of workers
(resources), of the worker stock (prey) and of the active employers
(predators).  Each is multiplied by an observational scale ``u0, v0, w0``
before entering the interaction terms::

    du/dt =  a*u*u0 - alpha1*f1(u*u0, v*v0, k1)
    dv/dt = -b*v*v0 + alpha1*f1(u*u0, v*v0, k1) - alpha2*f2(v*v0, w*w0, k2)
    dw/dt = -c*(w*w0 - w_dag) + alpha2*f2(v*v0, w*w0, k2)

``f1`` and ``f2`` are chosen independently between the bilinear
Lotka-Volterra product and the Holling type II saturating response.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, fields, replace
from typing import NamedTuple

import numpy as np

from .errors import DegenerateDenominator, InvalidParams

EPS_DEN = 1e-12


class FunctionalResponseKind(enum.Enum):
    LOTKA_VOLTERRA = "lotka-volterra"
    HOLLING_II = "holling-ii"

    @classmethod
    def parse(cls, name):
        """Accept an enum member or one of its usual spellings ("lv", "holling", ...)."""
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("_", "-").replace(" ", "-")
        aliases = {
            "lv": cls.LOTKA_VOLTERRA,
            "lotka-volterra": cls.LOTKA_VOLTERRA,
            "lotkavolterra": cls.LOTKA_VOLTERRA,
            "holling": cls.HOLLING_II,
            "holling-ii": cls.HOLLING_II,
            "holling2": cls.HOLLING_II,
            "hollingii": cls.HOLLING_II,
        }
        try:
            return aliases[key]
        except KeyError:
            raise InvalidParams(f"unknown functional response {name!r}") from None

    @property
    def short(self):
        return "lv" if self is FunctionalResponseKind.LOTKA_VOLTERRA else "holling"


LV = FunctionalResponseKind.LOTKA_VOLTERRA
HOLLING = FunctionalResponseKind.HOLLING_II


class StateVector(NamedTuple):
    """Instantaneous dissimilarity state. Components may be negative."""

    u: float
    v: float
    w: float

    def is_finite(self):
        return math.isfinite(self.u) and math.isfinite(self.v) and math.isfinite(self.w)

    def max_norm(self):
        return max(abs(self.u), abs(self.v), abs(self.w))


@dataclass(frozen=True)
class ModelParams:
    """Coefficients of the system.

    The numeric defaults are conventional values for the uniform-phase,
    chaotic-amplitude regime of the three-level food chain. They are
    defaults, not values fitted to labor-market data.
    """

    a: float = 1.0
    b: float = 1.0
    c: float = 10.0
    alpha1: float = 0.2
    alpha2: float = 1.0
    k1: float = 0.05
    k2: float = 0.0
    w_dag: float = 0.006
    u0: float = 1.0
    v0: float = 1.0
    w0: float = 1.0
    response1: FunctionalResponseKind = LV
    response2: FunctionalResponseKind = LV
    eps_den: float = EPS_DEN

    def __post_init__(self):
        object.__setattr__(self, "response1", FunctionalResponseKind.parse(self.response1))
        object.__setattr__(self, "response2", FunctionalResponseKind.parse(self.response2))
        for name in ("a", "b", "c", "alpha1", "alpha2", "k1", "k2", "w_dag", "u0", "v0", "w0", "eps_den"):
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise InvalidParams(f"{name} must be a real number, got {value!r}", field=name) from None
            if not math.isfinite(value):
                raise InvalidParams(f"{name} must be finite, got {value!r}", field=name)
            object.__setattr__(self, name, value)
        for name in ("k1", "k2", "w_dag"):
            if getattr(self, name) < 0:
                raise InvalidParams(f"{name} must be >= 0, got {getattr(self, name)!r}", field=name)
        for name in ("u0", "v0", "w0", "eps_den"):
            if getattr(self, name) <= 0:
                raise InvalidParams(f"{name} must be > 0, got {getattr(self, name)!r}", field=name)

    def with_scales(self, u0, v0, w0):
        return replace(self, u0=u0, v0=v0, w0=w0)

    def as_dict(self):
        """Flat mapping of field name to plain value (responses as strings)."""
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            out[f.name] = value.value if isinstance(value, FunctionalResponseKind) else value
        return out


def functional_response(kind, x, y, k, eps=EPS_DEN):
    """Predation rate ``f(x, y)``.

    Args:
        kind (FunctionalResponseKind): bilinear or Holling type II.
        x, y (float): prey-side and predator-side densities.
        k (float): saturation constant, only used by Holling type II.
        eps (float): smallest admissible ``|1 + k*x|``.

    Returns:
        float: ``x*y`` or ``x*y / (1 + k*x)``.

    Raises:
        DegenerateDenominator: when ``|1 + k*x| < eps`` for Holling type II.
    """
    kind = FunctionalResponseKind.parse(kind)
    if k < 0:
        raise InvalidParams(f"saturation constant must be >= 0, got {k!r}", field="k")
    if kind is LV:
        return x * y
    den = 1.0 + k * x
    if abs(den) < eps:
        raise DegenerateDenominator(f"Holling denominator 1 + k*x = {den!r} at x={x!r}, k={k!r}")
    return x * y / den


def make_rhs(params, unit_scales=False):
    """Build a fast scalar right-hand side ``rhs(u, v, w) -> (du, dv, dw)``.

    The closure binds every coefficient as a local; it is what the integrator
    calls in its inner loop. ``unit_scales=True`` ignores ``u0, v0, w0``.
    """
    a, b, c = params.a, params.b, params.c
    al1, al2 = params.alpha1, params.alpha2
    k1, k2, w_dag = params.k1, params.k2, params.w_dag
    u0, v0, w0 = (1.0, 1.0, 1.0) if unit_scales else (params.u0, params.v0, params.w0)
    eps = params.eps_den
    holling1 = params.response1 is HOLLING
    holling2 = params.response2 is HOLLING

    def rhs(u, v, w):
        x = u * u0
        y = v * v0
        z = w * w0
        if holling1:
            den = 1.0 + k1 * x
            if abs(den) < eps:
                raise DegenerateDenominator(f"f1 denominator 1 + k1*u*u0 = {den!r}")
            f1 = x * y / den
        else:
            f1 = x * y
        if holling2:
            den = 1.0 + k2 * y
            if abs(den) < eps:
                raise DegenerateDenominator(f"f2 denominator 1 + k2*v*v0 = {den!r}")
            f2 = y * z / den
        else:
            f2 = y * z
        return (
            a * x - al1 * f1,
            -b * y + al1 * f1 - al2 * f2,
            -c * (z - w_dag) + al2 * f2,
        )

    return rhs


def derivative(params, state):
    """Time derivative of ``state`` under ``params``.

    Returns:
        StateVector: ``(du/dt, dv/dt, dw/dt)``.
    """
    return StateVector(*make_rhs(params)(*state))


def derivative_blasius(params, state):
    """Derivative of the unscaled reference food chain (``u0 = v0 = w0 = 1``)."""
    return StateVector(*make_rhs(params, unit_scales=True)(*state))


@dataclass(frozen=True)
class ScaleSchedule:
    """Piecewise-constant observational scales ``(u0, v0, w0)`` over time.

    Segment ``i`` covers ``[t0 + i*period, t0 + (i+1)*period)``; times past
    the last segment keep its value, times before ``t0`` use the first.
    """

    scales: np.ndarray  # (n, 3)
    t0: float = 0.0
    period: float = 1.0

    def __post_init__(self):
        arr = np.asarray(self.scales, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 3 or arr.shape[0] < 1:
            raise InvalidParams("scales must have shape (n, 3) with n >= 1", field="scales")
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
            raise InvalidParams("scales must be finite and > 0", field="scales")
        if not self.period > 0:
            raise InvalidParams("period must be > 0", field="period")
        arr.setflags(write=False)
        object.__setattr__(self, "scales", arr)

    def __len__(self):
        return self.scales.shape[0]

    def index_at(self, t):
        i = int(math.floor((t - self.t0) / self.period))
        return min(max(i, 0), len(self) - 1)

    def at(self, t):
        return tuple(float(s) for s in self.scales[self.index_at(t)])
