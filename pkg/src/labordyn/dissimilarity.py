"""Pairwise Minkowski dissimilarities between monthly records.

All three features (balance, workers, employers) are numeric counts, so a
Minkowski r-norm covers the distance; no categorical handling is needed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptyInput, InvalidExponent, InvalidLag
from .model import ScaleSchedule

FEATURES = ("balance", "workers", "employers")


def _check_exponent(r):
    if not (r >= 1):
        raise InvalidExponent(f"Minkowski exponent must be >= 1, got {r!r}")


def _pnorm(diff, r, axis=-1):
    diff = np.abs(diff)
    if r == 1:
        return diff.sum(axis=axis)
    if r == 2:
        return np.sqrt((diff * diff).sum(axis=axis))
    if math.isinf(r):
        return diff.max(axis=axis)
    return (diff ** r).sum(axis=axis) ** (1.0 / r)


def minkowski_distance(x, y, r=2.0):
    """``(sum_k |x_k - y_k|^r)^(1/r)``.

    >>> minkowski_distance([0, 0, 0], [3, 4, 0])
    5.0
    """
    _check_exponent(r)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or x.shape != y.shape or x.size == 0:
        raise DimensionMismatch(f"vectors must be 1-D of equal positive length, got {x.shape} and {y.shape}")
    return float(_pnorm(x - y, r))


@dataclass(frozen=True)
class DissimilarityMatrix:
    values: np.ndarray
    r: float
    normalized: bool
    features: tuple = FEATURES

    @property
    def n(self):
        return self.values.shape[0]


@dataclass(frozen=True)
class DissimilaritySeries:
    component: str
    values: np.ndarray
    lag: int

    def __len__(self):
        return self.values.shape[0]


def feature_matrix(records, features=FEATURES):
    """Stack record features into an ``(n, len(features))`` float array."""
    records = list(records)
    if not records:
        raise EmptyInput("no records")
    for name in features:
        if name not in FEATURES:
            raise ValueError(f"unknown feature {name!r}; expected one of {FEATURES}")
    X = np.array([[getattr(rec, f) for f in features] for rec in records], dtype=float)
    if not np.all(np.isfinite(X)):
        raise ValueError("record features must be finite")
    return X


def minmax_scale(X):
    """Scale each column to [0, 1]; constant columns map to 0."""
    X = np.asarray(X, dtype=float)
    lo = X.min(axis=0)
    span = X.max(axis=0) - lo
    safe = np.where(span > 0, span, 1.0)
    return np.where(span > 0, (X - lo) / safe, 0.0)


def pairwise(X, r=2.0):
    """Full symmetric distance matrix between the rows of ``X``.

    ``|x_i - x_j|`` is computed for every ordered pair, so entry ``(i, j)``
    and ``(j, i)`` come from identical floating-point operations and the
    result is exactly symmetric with an exactly zero diagonal.
    """
    _check_exponent(r)
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D feature array, got shape {X.shape}")
    return _pnorm(X[:, None, :] - X[None, :, :], r)


def build_matrix(records, r=2.0, normalize=False, features=FEATURES):
    """Dissimilarity matrix over records.

    Args:
        records: sequence of LaborRecord (or a Dataset).
        r (float): Minkowski exponent, ``>= 1``.
        normalize (bool): min-max scale each feature to [0, 1] first.
        features (tuple of str): subset of ``("balance", "workers", "employers")``.

    Returns:
        DissimilarityMatrix
    """
    records = list(records)
    if len(records) < 2:
        raise EmptyInput(f"need at least 2 records, got {len(records)}")
    X = feature_matrix(records, features)
    if normalize:
        X = minmax_scale(X)
    return DissimilarityMatrix(pairwise(X, r), float(r), bool(normalize), tuple(features))


def series_from_records(records, component, lag=1, r=2.0):
    """Consecutive-register dissimilarities ``|x_{t+lag} - x_t|`` of one feature.

    With a single feature every Minkowski exponent gives the absolute
    difference; ``r`` is only validated.
    """
    _check_exponent(r)
    if component not in FEATURES:
        raise ValueError(f"unknown component {component!r}; expected one of {FEATURES}")
    if int(lag) != lag or lag < 1:
        raise InvalidLag(f"lag must be an integer >= 1, got {lag!r}")
    lag = int(lag)
    records = list(records)
    if len(records) <= lag:
        raise EmptyInput(f"need more than {lag} records, got {len(records)}")
    x = feature_matrix(records, (component,))[:, 0]
    return DissimilaritySeries(component, np.abs(x[lag:] - x[:-lag]), lag)


def observational_scales(records, lag=1, mode="constant", normalize=True, t0=0.0, period=1.0):
    """Observational scales ``(u0, v0, w0)`` from the per-feature series.

    ``u0`` comes from the balance series, ``v0`` from workers and ``w0`` from
    employers.

    Args:
        mode (str): ``"constant"`` returns the series means as a tuple;
            ``"streamed"`` returns a ScaleSchedule holding one triple per
            month, ``period`` time units each, starting at ``t0``.
        normalize (bool): divide each series by its mean so scales fluctuate
            around 1 (the constant mode then returns ``(1.0, 1.0, 1.0)``).
    """
    if mode not in ("constant", "streamed"):
        raise ValueError(f"mode must be 'constant' or 'streamed', got {mode!r}")
    cols = [series_from_records(records, name, lag).values for name in FEATURES]
    S = np.column_stack(cols)
    means = S.mean(axis=0)
    if np.any(means <= 0):
        raise ValueError("a dissimilarity series is identically zero; scales must be > 0")
    if normalize:
        S = S / means
        means = np.ones(3)
    if mode == "constant":
        return tuple(float(m) for m in means)
    # ScaleSchedule requires strictly positive scales
    S = np.where(S > 0, S, np.finfo(float).tiny)
    return ScaleSchedule(S, t0=t0, period=period)
