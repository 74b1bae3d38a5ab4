"""Estimators and inverse problems on recorded shot series.

Forward statistics (correlation function, correlation coefficient with
instrument-noise subtraction, difference-photocurrent variance) mirror how
boxcar records are reduced in the lab.  The inverse problems recover what
the forward model cannot pin down directly:

* fit_multithermal: number of modes and mean of a bright thermal channel,
* imbalance_bounds: how unbalanced the two quantum efficiencies would have
  to be for imbalance alone to explain a measured difference variance,
* solve_pump_noise: the pump excess-noise fraction x that closes the noise
  budget at given efficiencies,
* noise_surface: x and the corrected variance over a whole efficiency grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar
from scipy.special import gammaln

from .errors import (
    InconsistentDataError,
    NoiseDominatedError,
    UndefinedMarkerError,
    ValidationError,
)
from .montecarlo import ShotSeries
from .sources import SPLIT_THERMAL, TWIN_BEAM, multithermal_pdf


def correlation_function(series: ShotSeries, lag: int) -> float:
    """Normalized cross-correlation of the two channels at a shot lag.

    The sum runs over the shots where both samples exist (no circular
    indexing); means and standard deviations are taken over the full series.
    """
    v1 = np.asarray(series.ch1, dtype=float)
    v2 = np.asarray(series.ch2, dtype=float)
    k = len(v1)
    if k <= abs(lag) + 1:
        raise ValidationError(f"lag {lag} needs more than {abs(lag) + 1} shots, got {k}")
    s1, s2 = v1.std(), v2.std()
    if s1 == 0.0 or s2 == 0.0:
        raise UndefinedMarkerError("correlation undefined: a channel has zero variance")
    d1 = v1 - v1.mean()
    d2 = v2 - v2.mean()
    if lag >= 0:
        num = (d1[: k - lag] * d2[lag:]).mean()
    else:
        num = (d1[-lag:] * d2[: k + lag]).mean()
    return float(num / (s1 * s2))


def measured_correlation(series: ShotSeries) -> float:
    """Zero-lag correlation with instrument noise removed from the variances.

    Each channel's variance is reduced by its recorded instrument-noise
    variance before normalizing; the covariance itself needs no correction
    because the noise of the two channels is independent.
    """
    v1 = np.asarray(series.ch1, dtype=float)
    v2 = np.asarray(series.ch2, dtype=float)
    nv1, nv2 = series.instrument_noise_var
    var1 = v1.var() - nv1
    var2 = v2.var() - nv2
    if var1 <= 0.0 or var2 <= 0.0:
        raise NoiseDominatedError(
            "instrument noise exceeds a channel's measured variance")
    cov = ((v1 - v1.mean()) * (v2 - v2.mean())).mean()
    return float(cov / (math.sqrt(var1) * math.sqrt(var2)))


def measured_difference_variance(series: ShotSeries) -> float:
    """Variance of the per-shot detected-count difference, noise subtracted.

    Voltage records are first mapped back to counts (v/alpha); the additive
    instrument-noise variance propagates as nv1/alpha1**2 + nv2/alpha2**2
    and is removed.
    """
    c1, c2 = series.counts()
    d = c1 - c2
    nv1, nv2 = series.instrument_noise_var
    if series.unit == "volts":
        a1, a2 = series.conv
        noise = nv1 / a1**2 + nv2 / a2**2
    else:
        noise = nv1 + nv2
    return float(d.var() - noise)


@dataclass(frozen=True)
class MultithermalFit:
    """Maximum-likelihood multithermal fit of one channel."""

    mu_hat: float
    v_mean_hat: float
    goodness: float  # chi-square per bin on Freedman-Diaconis bins
    n_clipped: int = 0


def fit_multithermal(values, integer_mu: bool = True, mu_max: int = 200) -> MultithermalFit:
    """Fit the mode count and mean of a multithermal (Gamma-shaped) channel.

    The mean is the maximum-likelihood estimate for every fixed mode count,
    so only the shape is searched: over the integers 1..mu_max when
    integer_mu, else by continuous one-dimensional maximization.  Values at
    or below zero (possible in voltage records) are clipped to zero, counted,
    and excluded from the likelihood.
    """
    v = np.asarray(values, dtype=float)
    if v.size < 1000:
        raise ValidationError(f"need at least 1000 samples, got {v.size}")
    clipped = int((v <= 0.0).sum())
    v = v[v > 0.0]
    if v.size == 0:
        raise ValidationError("no positive samples to fit")
    v_mean = v.mean()
    mean_log = np.log(v).mean()

    def mean_loglik(mu):
        # profile log-likelihood per sample at the ML mean
        return ((mu - 1.0) * mean_log - mu - gammaln(mu)
                - mu * math.log(v_mean / mu))

    if integer_mu:
        grid = np.arange(1, mu_max + 1, dtype=float)
        ll = (grid - 1.0) * mean_log - grid - gammaln(grid) - grid * np.log(v_mean / grid)
        mu_hat = float(grid[np.argmax(ll)])
    else:
        res = minimize_scalar(lambda m: -mean_loglik(m), bounds=(1.0, float(mu_max)),
                              method="bounded", options={"xatol": 1e-8})
        mu_hat = float(res.x)
    goodness = _chi2_per_bin(v, mu_hat, v_mean)
    return MultithermalFit(mu_hat, float(v_mean), goodness, clipped)


def _chi2_per_bin(v, mu, v_mean):
    """Chi-square per bin against the fitted density, Freedman-Diaconis bins."""
    q75, q25 = np.percentile(v, [75, 25])
    width = 2.0 * (q75 - q25) * v.size ** (-1.0 / 3.0)
    if width <= 0.0:
        return float("nan")
    edges = np.arange(0.0, v.max() + width, width)
    if len(edges) < 3:
        return float("nan")
    observed, edges = np.histogram(v, bins=edges)
    centers = 0.5 * (edges[:-1] + edges[1:])
    expected = multithermal_pdf(centers, mu, v_mean) * np.diff(edges) * v.size
    keep = expected > 5.0
    if keep.sum() < 2:
        return float("nan")
    chi2 = ((observed[keep] - expected[keep]) ** 2 / expected[keep]).sum()
    return float(chi2 / keep.sum())


def _difference_variance_model(delta, eta_bar, n_of_eta, mu, kind):
    """sigma2(d) with efficiencies eta_bar +- delta/2 and N = n_of_eta."""
    if kind == TWIN_BEAM:
        # (e1+e2-2e1e2) N = 2 eb(1-eb) N + delta**2 N / 2
        return delta**2 * (n_of_eta**2 / mu + n_of_eta / 2.0) \
            + 2.0 * eta_bar * (1.0 - eta_bar) * n_of_eta
    if kind == SPLIT_THERMAL:
        return delta**2 * n_of_eta**2 / mu + 2.0 * eta_bar * n_of_eta
    raise ValidationError(f"kind: expected twin_beam or split_thermal, got {kind!r}")


def imbalance_bounds(sigma2_measured, m1, m2, mu, eta_nominal, kind=TWIN_BEAM,
                     window=0.2):
    """Efficiency-imbalance interval compatible with a measured variance.

    Solves the unbalanced difference-variance model for |eta1 - eta2| with
    the mean photon number tied to the detected means, N = (m1+m2)/(2 eta),
    while the mean efficiency eta scans eta_nominal * (1 -+ window) (clamped
    so both efficiencies stay <= 1).  The solution is monotone in the mean
    efficiency, so the interval is spanned by the two endpoints.

    Returns (0.0, 0.0) when the measurement does not exceed the balanced
    model at the nominal efficiency; raises InconsistentDataError when no
    admissible solution exists anywhere in the scan.
    """
    if min(m1, m2) <= 0:
        raise ValidationError("m1, m2: detected means must be > 0")
    if not (0.0 < eta_nominal <= 1.0):
        raise ValidationError(f"eta_nominal: must lie in (0, 1], got {eta_nominal}")
    m_bar = 0.5 * (m1 + m2)
    floor = _difference_variance_model(0.0, eta_nominal, m_bar / eta_nominal, mu, kind)
    if sigma2_measured <= floor:
        return (0.0, 0.0)

    def delta_at(eta_bar):
        n = m_bar / eta_bar
        if kind == TWIN_BEAM:
            rhs = sigma2_measured - 2.0 * eta_bar * (1.0 - eta_bar) * n
            den = n * n / mu + n / 2.0
        else:
            rhs = sigma2_measured - 2.0 * eta_bar * n
            den = n * n / mu
        if rhs <= 0.0:
            return None
        return math.sqrt(rhs / den)

    lo_eta = eta_nominal * (1.0 - window)
    hi_eta = min(eta_nominal * (1.0 + window), 1.0)

    def overshoot(eta_bar):
        d = delta_at(eta_bar)
        return (eta_bar + d / 2.0) - 1.0 if d is not None else -1.0

    # keep eta_bar + delta/2 <= 1 at the upper end of the scan
    if overshoot(hi_eta) > 0.0:
        if overshoot(lo_eta) > 0.0:
            raise InconsistentDataError(
                "no admissible efficiency pair reproduces the measured variance")
        hi_eta = brentq(overshoot, lo_eta, hi_eta, xtol=1e-12)

    candidates = [d for d in (delta_at(lo_eta), delta_at(hi_eta)) if d is not None]
    if not candidates:
        raise InconsistentDataError(
            "no admissible efficiency pair reproduces the measured variance")
    return (min(candidates) if len(candidates) == 2 else 0.0, max(candidates))


@dataclass(frozen=True)
class PumpFit:
    """Pump excess-noise fraction solving the noise budget, with round trip."""

    x: float
    at_floor: bool
    base_sigma2: float         # model variance at x = 0 (the corrected value)
    excess_coefficient: float  # d sigma2 / d x**2

    def predicted_sigma2(self) -> float:
        return self.base_sigma2 + self.x**2 * self.excess_coefficient


def solve_pump_noise(sigma2_measured, eta1, eta2, m1, m2, mu,
                     kind=TWIN_BEAM) -> PumpFit:
    """Pump-noise fraction x reproducing a measured difference variance.

    The budget equation is affine in x**2, so the root is closed-form:

        sigma2_measured = sigma2_model(eta1, eta2, N) + x**2 * coefficient

    with N = mean of m_j / eta_j and per-beam excess terms

        twin beam:  (N_j**2 / mu) arcsinh(sqrt(N_j / mu))**2,  N_j = m_j/eta_j
        thermal:    2 N_j**2

    Measurements at or below the x = 0 model return x = 0 with at_floor set.
    """
    for name, eta in (("eta1", eta1), ("eta2", eta2)):
        if not (0.0 < eta <= 1.0):
            raise ValidationError(f"{name}: must lie in (0, 1], got {eta}")
    if min(m1, m2) <= 0:
        raise ValidationError("m1, m2: detected means must be > 0")
    n1, n2 = m1 / eta1, m2 / eta2
    n_bar = 0.5 * (n1 + n2)
    if kind == TWIN_BEAM:
        base = (eta1 - eta2) ** 2 * n_bar**2 / mu \
            + (eta1 + eta2 - 2.0 * eta1 * eta2) * n_bar
        coef = sum(nj**2 / mu * math.asinh(math.sqrt(nj / mu)) ** 2 for nj in (n1, n2))
    elif kind == SPLIT_THERMAL:
        base = (eta1 - eta2) ** 2 * n_bar**2 / mu + (eta1 + eta2) * n_bar
        coef = 2.0 * (n1**2 + n2**2)
    else:
        raise ValidationError(f"kind: expected twin_beam or split_thermal, got {kind!r}")
    if sigma2_measured <= base:
        return PumpFit(0.0, True, base, coef)
    return PumpFit(math.sqrt((sigma2_measured - base) / coef), False, base, coef)


@dataclass(frozen=True)
class NoiseBudget:
    """Noise-budget surface over an efficiency grid."""

    eta1: np.ndarray
    eta2: np.ndarray
    x: np.ndarray                 # shape (len(eta1), len(eta2))
    corrected_sigma2: np.ndarray
    at_floor: np.ndarray
    shot_noise_plane: float       # (eta1 + eta2) N = m1 + m2, constant
    imbalance_interval: tuple[float, float]


def noise_surface(sigma2_measured, m1, m2, mu, eta1_grid, eta2_grid,
                  kind=TWIN_BEAM, eta_nominal=None) -> NoiseBudget:
    """Solve the pump-noise budget at every point of an efficiency grid.

    The corrected variance at a grid point is the x = 0 model value there
    (the measurement minus the solved excess); where the measurement sits
    below the model no correction is possible and the measured value is
    kept, flagged at_floor.  The shot-noise plane (eta1 + eta2) N equals
    m1 + m2 for every efficiency choice, hence a single number.
    """
    e1 = np.asarray(eta1_grid, dtype=float)
    e2 = np.asarray(eta2_grid, dtype=float)
    if e1.min() <= 0 or e1.max() > 1 or e2.min() <= 0 or e2.max() > 1:
        raise ValidationError("efficiency grids must lie in (0, 1]")
    x = np.zeros((e1.size, e2.size))
    corrected = np.zeros_like(x)
    floor = np.zeros(x.shape, dtype=bool)
    for i, a in enumerate(e1):
        for j, b in enumerate(e2):
            fit = solve_pump_noise(sigma2_measured, a, b, m1, m2, mu, kind)
            x[i, j] = fit.x
            floor[i, j] = fit.at_floor
            corrected[i, j] = sigma2_measured if fit.at_floor else fit.base_sigma2
    if eta_nominal is None:
        eta_nominal = 0.5 * (float(e1.mean()) + float(e2.mean()))
    interval = imbalance_bounds(sigma2_measured, m1, m2, mu, eta_nominal, kind)
    return NoiseBudget(e1, e2, x, corrected, floor, float(m1 + m2), interval)
