"""Time-series diagnostics: peaks, phase lag and amplitude relaxation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import detrend, peak_prominences

from .errors import InvalidParams, TooShort, ZeroVariance

DEFAULT_WINDOW = 3
DEFAULT_PROMINENCE_FRACTION = 0.05


@dataclass(frozen=True)
class PeakSet:
    indices: np.ndarray
    prominence_min: float
    prominences: np.ndarray = None

    def __len__(self):
        return int(self.indices.shape[0])


@dataclass(frozen=True)
class RelaxationReport:
    split_index: int
    early_amplitude: float
    late_amplitude: float
    ratio: float

    def as_dict(self):
        return {
            "split_index": self.split_index,
            "early_amplitude": self.early_amplitude,
            "late_amplitude": self.late_amplitude,
            "ratio": self.ratio,
        }


def moving_average(x, window):
    """Centered moving average; the window shrinks symmetrically at the edges."""
    x = np.asarray(x, dtype=float)
    if window < 1 or window % 2 == 0:
        raise InvalidParams(f"smoothing window must be odd and >= 1, got {window!r}", field="smoothing_window")
    if window == 1:
        return x.copy()
    half = window // 2
    n = x.size
    i = np.arange(n)
    reach = np.minimum(np.minimum(i, n - 1 - i), half)
    csum = np.concatenate(([0.0], np.cumsum(x)))
    return (csum[i + reach + 1] - csum[i - reach]) / (2 * reach + 1)


def find_peaks(series, smoothing_window=DEFAULT_WINDOW, prominence_min=None):
    """Strict local maxima of the smoothed series, filtered by prominence.

    Prominence is the height of a peak above the higher of its two bases,
    each base being the lowest point between the peak and the nearest higher
    sample (or the series end) on that side.

    Args:
        series (array_like): 1-D samples, at least 3.
        smoothing_window (int): odd width of the centered moving average.
        prominence_min (float, optional): defaults to 5% of the raw series range.

    Returns:
        PeakSet
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or x.size < 3:
        raise TooShort(f"need at least 3 samples, got {x.size}")
    if prominence_min is None:
        prominence_min = DEFAULT_PROMINENCE_FRACTION * float(np.ptp(x))
    s = moving_average(x, smoothing_window)
    candidates = np.flatnonzero((s[1:-1] > s[:-2]) & (s[1:-1] > s[2:])) + 1
    if candidates.size == 0:
        return PeakSet(candidates, float(prominence_min), np.empty(0))
    prom = peak_prominences(s, candidates)[0]
    keep = prom >= prominence_min
    return PeakSet(candidates[keep], float(prominence_min), prom[keep])


def find_troughs(series, smoothing_window=DEFAULT_WINDOW, prominence_min=None):
    return find_peaks(-np.asarray(series, dtype=float), smoothing_window, prominence_min)


def lagged_correlation(a, b, max_lag):
    """Pearson correlation of ``a[t]`` with ``b[t + lag]`` over the overlap.

    Returns:
        (lags, corr): integer lags ``-max_lag..max_lag`` and their
        coefficients; NaN where an overlap segment is constant.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = a.size
    if a.ndim != 1 or b.shape != a.shape:
        raise ValueError(f"series must be 1-D with equal length, got {a.shape} and {b.shape}")
    if int(max_lag) != max_lag or max_lag < 0:
        raise InvalidParams(f"max_lag must be a non-negative integer, got {max_lag!r}", field="max_lag")
    max_lag = int(max_lag)
    if n <= 2 * max_lag:
        raise TooShort(f"series length {n} must exceed 2*max_lag = {2 * max_lag}")
    if np.ptp(a) == 0 or np.ptp(b) == 0:
        raise ZeroVariance("cross-correlation of a constant series is undefined")
    a = a - a.mean()
    b = b - b.mean()
    lags = np.arange(-max_lag, max_lag + 1)
    corr = np.full(lags.size, np.nan)
    for k, lag in enumerate(lags):
        if lag >= 0:
            x, y = a[: n - lag], b[lag:]
        else:
            x, y = a[-lag:], b[: n + lag]
        x = x - x.mean()
        y = y - y.mean()
        den = np.sqrt(np.dot(x, x) * np.dot(y, y))
        if den > 0:
            corr[k] = np.dot(x, y) / den
    return lags, corr


def phase_lag(series_a, series_b, max_lag=None):
    """Lag (in samples) maximizing the cross-correlation of two series.

    Positive means ``series_b`` trails ``series_a``. Ties go to the smaller
    ``|lag|``, then to the negative side. ``max_lag`` defaults to a quarter
    of the length.
    """
    n = len(series_a)
    if max_lag is None:
        max_lag = max(0, (n - 1) // 4)
    lags, corr = lagged_correlation(series_a, series_b, max_lag)
    order = np.lexsort((lags, np.abs(lags)))
    best_lag, best = 0, -np.inf
    for k in order:
        if corr[k] > best:
            best, best_lag = corr[k], int(lags[k])
    return best_lag


def _amplitude(part):
    if np.ptp(part) == 0:
        return 0.0  # detrend would leave rounding noise
    return float(np.std(detrend(part, type="linear")))


def relaxation_metric(series, split_fraction=0.5):
    """Compare amplitude variability before and after a split point.

    Each part is linearly detrended and its amplitude is the standard
    deviation of the residual. A constant series yields zero amplitudes and
    ratio 0.
    """
    x = np.asarray(series, dtype=float)
    if not 0 < split_fraction < 1:
        raise InvalidParams(f"split_fraction must lie in (0, 1), got {split_fraction!r}", field="split_fraction")
    if x.ndim != 1 or x.size < 8:
        raise TooShort(f"need at least 8 samples, got {x.size}")
    split = int(np.floor(split_fraction * x.size))
    if split < 2 or x.size - split < 2:
        raise TooShort(f"split at {split} leaves a part shorter than 2 samples")
    early, late = _amplitude(x[:split]), _amplitude(x[split:])
    ratio = late / early if early > 0 else (0.0 if late == 0 else np.inf)
    return RelaxationReport(split, early, late, ratio)
