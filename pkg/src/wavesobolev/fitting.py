"""Log-log least-squares slope fits."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

__all__ = ["SlopeFit", "fit_slope"]


@dataclass(frozen=True)
class SlopeFit:
    """``log value ~ slope * log T + intercept``; ``residual_rms`` is always reported."""

    log_T: tuple[float, ...]
    log_value: tuple[float, ...]
    slope: float
    intercept: float
    residual_rms: float


def fit_slope(pairs: Iterable[tuple[float, float]]) -> SlopeFit:
    pts = [(float(T), float(v)) for T, v in pairs]
    if len(pts) < 3:
        raise ValueError(f"need at least 3 points for a slope fit, got {len(pts)}")
    T, v = np.array(pts).T
    if np.any(T <= 0) or np.any(v <= 0) or not np.all(np.isfinite(v)):
        raise ValueError("slope fit needs positive, finite T and values")
    x, y = np.log(T), np.log(v)
    A = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + intercept)
    return SlopeFit(tuple(x), tuple(y), float(slope), float(intercept),
                    float(np.sqrt(np.mean(resid**2))))
