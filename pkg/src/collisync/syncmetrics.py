"""Pearson correlation and its sliding-window form for collision series.

The windowed coefficient tracks the local linear association between the
two per-collision expectation series: values near +1 mean the oscillations
are phase-locked, near -1 anti-phase-locked.  A window whose data has zero
variance carries no phase information and yields NaN (the missing marker).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "WindowSpec",
    "PearsonSeries",
    "pearson",
    "sliding_pearson",
    "final_sync_value",
]

_CLAMP_TOL = 1e-12


@dataclass(frozen=True)
class WindowSpec:
    """Sliding-window geometry: ``width`` points per window, consecutive
    windows sharing ``overlap`` points (stride = width - overlap)."""

    width: int
    overlap: int

    def __post_init__(self) -> None:
        if self.width < 2:
            raise ValueError(f"window width must be at least 2, got {self.width}")
        if not 0 <= self.overlap < self.width:
            raise ValueError(
                f"overlap must lie in [0, width), got {self.overlap} for width {self.width}"
            )

    @property
    def stride(self) -> int:
        return self.width - self.overlap


@dataclass(frozen=True, eq=False)
class PearsonSeries:
    """Windowed coefficients, attributed to each window's start collision
    (1-based).  NaN marks a zero-variance (missing) window."""

    starts: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        starts = np.asarray(self.starts, dtype=int)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "starts", starts)
        object.__setattr__(self, "values", values)
        if starts.shape != values.shape or starts.ndim != 1:
            raise ValueError("starts and values must be 1-d arrays of equal length")

    def __len__(self) -> int:
        return len(self.starts)

    def __iter__(self):
        return zip(self.starts.tolist(), self.values.tolist())


def pearson(x, y) -> float:
    """Correlation coefficient of two equal-length series.

    Returns NaN when either series has zero variance; results a rounding
    hair beyond +-1 are clamped back.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 1 or x.shape != y.shape:
        raise ValueError(f"series must be 1-d and equally long, got {x.shape} vs {y.shape}")
    if len(x) < 2:
        raise ValueError(f"need at least 2 points, got {len(x)}")
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(xc @ xc)
    syy = float(yc @ yc)
    if sxx == 0.0 or syy == 0.0:
        return math.nan
    r = float((xc @ yc) / math.sqrt(sxx * syy))
    if abs(r) > 1.0 and abs(r) - 1.0 <= _CLAMP_TOL:
        r = math.copysign(1.0, r)
    return r


def sliding_pearson(x, y, window: WindowSpec) -> PearsonSeries:
    """Pearson coefficient over every complete window.

    Windows start at collision 1 and shift by the window stride; the series
    stops at the last window that fits entirely inside the data.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"series must be 1-d and equally long, got {x.shape} vs {y.shape}")
    if len(x) < window.width:
        raise ValueError(
            f"series of length {len(x)} shorter than one window of {window.width}"
        )
    starts = np.arange(0, len(x) - window.width + 1, window.stride)
    values = np.array(
        [pearson(x[s : s + window.width], y[s : s + window.width]) for s in starts]
    )
    return PearsonSeries(starts + 1, values)


def final_sync_value(series: PearsonSeries) -> float:
    """Last non-missing windowed coefficient; NaN if every window is missing."""
    if len(series) == 0:
        raise ValueError("empty series")
    finite = series.values[~np.isnan(series.values)]
    if len(finite) == 0:
        return math.nan
    return float(finite[-1])
