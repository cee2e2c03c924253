"""Operational post-processing: fringe-scan visibility and revival detection."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ZeroIntensity
from .series import VisibilityCurve

# spread below this many truncation bounds counts as a constant curve
_CONSTANT_FACTOR = 10.0


@dataclass(frozen=True, eq=False)
class FringeScan:
    delta_grid: np.ndarray
    i_values: np.ndarray
    i_max: float
    i_min: float
    v_op: float

    @property
    def resolution_bound(self) -> float:
        """Worst-case grid error on v_op for a pure cosine fringe."""
        return math.pi ** 2 / (2.0 * len(self.delta_grid) ** 2) * self.v_op


def fringe_scan(intensity_fn: Callable, n_points: int = 4096,
                vectorized: bool = False) -> FringeScan:
    """Sample ``intensity_fn`` uniformly on [0, 2 pi) and form (max - min)/(max + min).

    Set ``vectorized`` when the function accepts the whole delta array.
    """
    if n_points < 8:
        raise ValueError("n_points must be >= 8")
    grid = 2.0 * math.pi * np.arange(n_points) / n_points
    if vectorized:
        values = np.asarray(intensity_fn(grid), dtype=float)
    else:
        values = np.array([float(intensity_fn(d)) for d in grid])
    i_max, i_min = float(values.max()), float(values.min())
    if i_max + i_min == 0:
        raise ZeroIntensity("fringe scan has zero intensity everywhere")
    return FringeScan(grid, values, i_max, i_min, (i_max - i_min) / (i_max + i_min))


@dataclass(frozen=True)
class RevivalReport:
    revival_times: tuple
    collapse_floor: float
    estimated_period: Optional[float]
    time_independent: bool
    timing_uncertainty: float


def _local_maxima(v: np.ndarray) -> list:
    """Indices of grid-local maxima; plateaus report their middle sample."""
    peaks = []
    i, n = 0, len(v)
    while i < n:
        j = i
        while j + 1 < n and v[j + 1] == v[i]:
            j += 1
        left_ok = i == 0 or v[i - 1] < v[i]
        right_ok = j == n - 1 or v[j + 1] < v[i]
        if left_ok and right_ok:
            peaks.append((i + j) // 2)
        i = j + 1
    return peaks


def detect_revivals(curve: VisibilityCurve, threshold: float = 0.99) -> RevivalReport:
    """Revivals are sampled local maxima of |V| above ``threshold``.

    No sub-grid refinement: ``timing_uncertainty`` is the largest grid step.
    A curve whose spread is within ten truncation bounds is reported as
    time independent, with no revivals and no period.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    t = np.asarray(curve.t, dtype=float)
    v = np.asarray(curve.v_abs, dtype=float)
    if t.size == 0:
        return RevivalReport((), math.nan, None, True, 0.0)
    step = float(np.max(np.diff(t))) if t.size > 1 else 0.0
    floor = float(v.min())
    if float(v.max()) - floor <= _CONSTANT_FACTOR * curve.truncation_bound:
        return RevivalReport((), floor, None, True, step)
    times = tuple(float(t[i]) for i in _local_maxima(v) if v[i] > threshold)
    period = None
    if len(times) >= 2:
        period = (times[-1] - times[0]) / (len(times) - 1)
    return RevivalReport(times, floor, period, False, step)
