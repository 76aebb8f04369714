"""Regularity diagnostics and exact exponent formulas.

Two kinds of machinery live here.  The estimators (ahlfors_alpha,
fourier_beta, billingsley_gamma) fit power laws to finite-scale data and are
explicit about their scale window; the exponent calculators (theorem_range,
mockenhaupt_p0, knapp_bound) are exact rational arithmetic with infinity as a
legal value.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .fitting import FitResult, loglog_fit
from .measures import DiscreteMeasure
from .rationals import (
    Exponent,
    conjugate,
    exp_div,
    exp_le,
    exp_mul,
    exp_str,
    validate_exponent,
)
from .spectral import Spectrum


# ---------------------------------------------------------------------------
# Ball-mass scans (sliding-window prefix sums, wrap-around metric)
# ---------------------------------------------------------------------------

def _windowed_sums_1d(values: np.ndarray, halfwidth: int) -> np.ndarray:
    """Circular sums over windows [x - h, x + h] for every center x."""
    n = len(values)
    h = min(halfwidth, (n - 1) // 2)
    ext = np.concatenate([values, values[: 2 * h]])
    cs = np.concatenate([[0.0], np.cumsum(ext)])
    sums = cs[2 * h + 1:] - cs[: n]
    return np.roll(sums, h)


def ball_masses(mu: DiscreteMeasure, radius: float) -> np.ndarray:
    """mu(B(x, radius)) for every grid center x, torus metric.

    Balls are intervals in dim 1 and squares (sup metric) in dim 2; the
    half-width in cells is floor(radius * N).
    """
    if not (0 < radius <= 0.5):
        raise ValueError(f"radius {radius} outside (0, 1/2]")
    h = int(np.floor(radius * mu.N))
    grid = mu.dense_weights()
    if mu.dim == 1:
        return _windowed_sums_1d(grid, h)
    rows = np.stack([_windowed_sums_1d(row, h) for row in grid])
    return np.stack([_windowed_sums_1d(col, h) for col in rows.T]).T


def default_scales(N: int, count: int = 6) -> list[float]:
    """Dyadic radii in (1/N, 1/4], coarsest first."""
    scales = []
    r = 0.25
    while len(scales) < count and r > 1.0 / N:
        scales.append(r)
        r /= 2
    return scales


@dataclass(frozen=True)
class ScanReport:
    """Power-law fit of ball masses over a declared scale window."""

    estimate: float
    scales: list[float]
    values: list[float]
    fit: FitResult
    window: tuple[float, float]
    center: tuple[int, ...] | None = None

    def as_dict(self) -> dict:
        d = {
            "estimate": self.estimate,
            "scales": list(self.scales),
            "values": list(self.values),
            "window": list(self.window),
            **self.fit.as_dict(),
        }
        if self.center is not None:
            d["center"] = list(self.center)
        return d


def _check_scales(mu: DiscreteMeasure, scales) -> list[float]:
    if scales is None:
        scales = default_scales(mu.N)
    scales = sorted(float(s) for s in scales)
    if len(scales) < 3:
        raise ValueError(f"need at least 3 scales, got {len(scales)}")
    for s in scales:
        if not (1.0 / mu.N < s <= 0.25):
            raise ValueError(f"scale {s} outside (1/N, 1/4]")
    return scales


def ahlfors_alpha(mu: DiscreteMeasure, scales=None) -> ScanReport:
    """Upper-regularity exponent: slope of log max-ball-mass against log r."""
    scales = _check_scales(mu, scales)
    maxima = [float(ball_masses(mu, r).max()) for r in scales]
    fit = loglog_fit(scales, maxima)
    return ScanReport(fit.slope, scales, maxima, fit, (min(scales), max(scales)))


def billingsley_gamma(mu: DiscreteMeasure, scales=None) -> ScanReport:
    """Local dimension at the most concentrated point.

    The center is the arg-max of ball mass at the finest scale; the exponent
    is fitted to the masses at that fixed center, which seeds Knapp-type
    tests with a genuinely heavy point.
    """
    scales = _check_scales(mu, scales)
    finest_masses = ball_masses(mu, scales[0])
    # argmax is flat over window-width plateaus; break ties toward the cell
    # carrying the most atomic mass so the center is a genuine support point
    flat_masses = finest_masses.ravel()
    plateau = np.flatnonzero(flat_masses >= flat_masses.max() * (1 - 1e-12))
    cell_mass = mu.dense_weights().ravel()[plateau]
    center_flat = int(plateau[np.argmax(cell_mass)])
    if mu.dim == 1:
        center = (center_flat,)
    else:
        center = (center_flat // mu.N, center_flat % mu.N)
    values = [float(ball_masses(mu, r)[center if mu.dim == 2 else center_flat])
              for r in scales]
    fit = loglog_fit(scales, values)
    return ScanReport(fit.slope, scales, values, fit, (min(scales), max(scales)), center=center)


# ---------------------------------------------------------------------------
# Fourier decay
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecayReport:
    """Fourier decay exponents over dyadic annuli: sup and average variants."""

    beta_sup: float
    beta_avg: float
    annuli: list[tuple[float, float]]
    sup_values: list[float]
    avg_values: list[float]
    fit_sup: FitResult
    fit_avg: FitResult

    @property
    def estimate(self) -> float:
        return self.beta_sup

    def as_dict(self) -> dict:
        return {
            "beta_sup": self.beta_sup,
            "beta_avg": self.beta_avg,
            "annuli": [list(a) for a in self.annuli],
            "sup_values": self.sup_values,
            "avg_values": self.avg_values,
            "fit_sup": self.fit_sup.as_dict(),
            "fit_avg": self.fit_avg.as_dict(),
        }


def fourier_beta(spec: Spectrum, annulus_base: float = 2.0,
                 k_min: float = 4.0) -> DecayReport:
    """Decay exponent of |mu_hat|^2: negative slope over dyadic annuli.

    The sup variant fits sup_{|k| in annulus} |mu_hat(k)|^2; the average
    variant fits the annulus mean, the quantity controlling averaged-decay
    arguments.  Annuli start at k_min: the first couple of octaves say
    nothing about asymptotic decay and would bias the fit.
    """
    if spec.K < 16:
        raise ValueError("need K >= 16 for a meaningful decay fit")
    if annulus_base <= 1:
        raise ValueError("annulus base must exceed 1")
    ks = spec.frequencies().astype(float)
    if spec.dim == 1:
        radii = np.abs(ks)
    else:
        radii = np.hypot(*np.meshgrid(ks, ks, indexing="ij"))
    power = np.abs(spec.coefficients) ** 2
    annuli, sups, avgs, mids = [], [], [], []
    lo = float(k_min)
    while lo * annulus_base <= spec.K + 0.5:
        hi = lo * annulus_base
        mask = (radii >= lo) & (radii < hi)
        if mask.any():
            vals = power[mask]
            if float(vals.max()) == 0.0:
                raise ValueError(f"annulus [{lo}, {hi}) is identically zero")
            annuli.append((lo, hi))
            sups.append(float(vals.max()))
            avgs.append(float(vals.mean()))
            mids.append(float(np.sqrt(lo * hi)))
        lo = hi
    if len(annuli) < 3:
        raise ValueError("fewer than 3 usable annuli; increase K")
    fit_sup = loglog_fit(mids, sups)
    fit_avg = loglog_fit(mids, avgs)
    return DecayReport(-fit_sup.slope, -fit_avg.slope, annuli, sups, avgs, fit_sup, fit_avg)


# ---------------------------------------------------------------------------
# Exact exponent calculators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExponentParams:
    """Exact exponent bookkeeping for one instance of the main estimate.

    q defaults to the endpoint p'/(n r') and s is always p'/n; all derived
    values are exact rationals (or inf).
    """

    d: int
    n: int
    p: Exponent
    r: Exponent
    q: Exponent = None

    def __post_init__(self):
        object.__setattr__(self, "p", validate_exponent(self.p, "p"))
        object.__setattr__(self, "r", validate_exponent(self.r, "r"))
        q = self.q if self.q is not None else endpoint_q(self.n, self.r, self.p)
        object.__setattr__(self, "q", validate_exponent(q, "q"))
        if self.n < 1 or self.d < 1:
            raise ValueError("need n >= 1 and d >= 1")

    @property
    def p_prime(self) -> Exponent:
        return conjugate(self.p)

    @property
    def q_prime(self) -> Exponent:
        return conjugate(self.q)

    @property
    def r_prime(self) -> Exponent:
        return conjugate(self.r)

    @property
    def s(self) -> Exponent:
        return exp_div(self.p_prime, self.n)

    @property
    def s_prime(self) -> Exponent:
        return conjugate(validate_exponent(self.s, "s"))

    def as_dict(self) -> dict:
        return {k: exp_str(v) for k, v in [
            ("p", self.p), ("q", self.q), ("r", self.r), ("s", self.s),
            ("p_prime", self.p_prime), ("q_prime", self.q_prime),
            ("r_prime", self.r_prime), ("s_prime", self.s_prime),
        ]} | {"n": self.n, "d": self.d}


def endpoint_q(n: int, r: Exponent, p: Exponent) -> Exponent:
    """q = p'/(n r'), the largest q the convolution-power estimate allows."""
    r = validate_exponent(r, "r")
    p = validate_exponent(p, "p")
    if r == 1:
        return Fraction(0)
    return exp_div(conjugate(p), exp_mul(n, conjugate(r)))


@dataclass(frozen=True)
class ExponentRange:
    """Admissible (p, q) region for given convolution order n and density exponent r."""

    n: int
    r: Exponent
    p_max: Exponent
    feasible: bool

    def q_max(self, p: Exponent) -> Exponent:
        return endpoint_q(self.n, self.r, p)

    def contains(self, p: Exponent, q: Exponent) -> bool:
        """Closed region: 1 <= p <= p_max and 1 <= q <= p'/(n r')."""
        p = validate_exponent(p, "p")
        q = validate_exponent(q, "q")
        return exp_le(p, self.p_max) and exp_le(q, self.q_max(p))

    def as_dict(self) -> dict:
        return {"n": self.n, "r": exp_str(self.r), "p_max": exp_str(self.p_max),
                "q_max_at_p_max": exp_str(self.q_max(self.p_max)), "feasible": self.feasible}


def theorem_range(n: int, r: Exponent) -> ExponentRange:
    """Admissible exponent range of the convolution-power restriction estimate.

    p_max is 2n/(2n-1) when r >= 2 and nr'/(nr'-1) when 1 <= r <= 2 (the
    branches agree at r = 2); the range is infeasible when even the endpoint
    q drops below 1.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    r = validate_exponent(r, "r")
    if exp_le(2, r):
        p_max: Exponent = Fraction(2 * n, 2 * n - 1)
    elif r == 1:
        p_max = Fraction(1)
    else:
        nrp = exp_mul(n, conjugate(r))
        p_max = exp_div(nrp, nrp - 1)
    q_at_pmax = endpoint_q(n, r, p_max)
    feasible = exp_le(1, q_at_pmax)
    return ExponentRange(n, r, p_max, feasible)


def mockenhaupt_p0(d: int, alpha, beta) -> Fraction:
    """Critical p of the decay-plus-regularity restriction range.

    p0 = (4(d - alpha) + 2 beta) / (4(d - alpha) + beta), exact rationals;
    alpha and beta may sit at the boundary 0 (degenerate full-decay case).
    """
    alpha, beta = Fraction(alpha), Fraction(beta)
    if not (0 <= alpha < d and 0 <= beta < d):
        raise ValueError(f"need 0 <= alpha, beta < d, got alpha={alpha}, beta={beta}, d={d}")
    return (4 * (d - alpha) + 2 * beta) / (4 * (d - alpha) + beta)


def knapp_bound(d: int, gamma, p: Exponent) -> Exponent:
    """Necessary upper bound q <= (gamma/d) p' from concentrated bump examples."""
    gamma = Fraction(gamma)
    if not (0 < gamma <= d):
        raise ValueError(f"need 0 < gamma <= d, got {gamma}")
    p = validate_exponent(p, "p")
    return exp_mul(Fraction(gamma) / d, conjugate(p))


def stein_tomas_p(d: int) -> Fraction:
    """Classical sphere endpoint 2(d+1)/(d+3)."""
    return Fraction(2 * (d + 1), d + 3)
