"""Least-squares slope fits on log-log points, shared by the estimators.

Convention: points are sorted by abscissa and the coarsest and finest scale
are dropped (boundary effects) whenever at least two points would remain;
the root-mean-square residual is reported with every fit, and a residual
above RESIDUAL_UNRELIABLE marks the fit unreliable rather than failing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RESIDUAL_UNRELIABLE = 0.2


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    residual: float
    points_used: int
    dropped_ends: bool

    @property
    def reliable(self) -> bool:
        return self.residual <= RESIDUAL_UNRELIABLE

    def as_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "residual": self.residual,
            "points_used": self.points_used,
            "dropped_ends": self.dropped_ends,
            "reliable": self.reliable,
        }


def loglog_fit(xs, ys, drop_ends: bool = True) -> FitResult:
    """OLS fit of log(y) against log(x).

    xs, ys must be positive; entries with y = 0 are rejected by the caller
    (an all-zero scale is a data error, not a fit problem).
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("xs and ys must be 1-d arrays of equal length")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("log-log fit requires positive data")
    order = np.argsort(xs)
    xs, ys = xs[order], ys[order]
    dropped = False
    if drop_ends and len(xs) >= 4:
        xs, ys = xs[1:-1], ys[1:-1]
        dropped = True
    if len(xs) < 2:
        raise ValueError(f"need at least 2 points to fit a slope, have {len(xs)}")
    lx, ly = np.log(xs), np.log(ys)
    A = np.vstack([lx, np.ones_like(lx)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = float(np.sqrt(np.mean((ly - (slope * lx + intercept)) ** 2)))
    return FitResult(float(slope), float(intercept), resid, len(xs), dropped)
