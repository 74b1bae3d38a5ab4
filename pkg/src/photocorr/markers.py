"""Discrimination markers for correlated beams.

Two markers separate twin-beam light from classically correlated light of
the same intensity:

* the correlation coefficient of the two detected photocurrents, which
  saturates toward 1 for every correlated source once the beams are bright,
  and therefore stops discriminating, and
* the distribution (and variance) of the difference photocurrent
  d = m1 - m2, which for a twin beam drops below the coherent-pair
  shot-noise level (eta1 + eta2) * N as long as the efficiencies are not
  too unbalanced.

Every analytic form here has a distribution-derived counterpart so the two
routes can be checked against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .detection import EfficiencyPair, analytic_moments, detected_moments, thin_joint
from .errors import TailToleranceError, UndefinedMarkerError, ValidationError
from .sources import (
    COHERENT_PAIR,
    DEFAULT_TAIL_TOL,
    SPLIT_THERMAL,
    TWIN_BEAM,
    JointCountDistribution,
    SourceSpec,
    source_joint,
)


@dataclass(frozen=True)
class DifferenceDistribution:
    """Probability mass over the signed count difference d = m1 - m2.

    probs[i] is the probability of d = d_min + i; tail_mass is whatever was
    lost to truncation of the underlying joint distribution or window.
    """

    probs: np.ndarray
    d_min: int
    tail_mass: float = field(default=0.0)

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1:
            raise ValidationError("probs: expected a 1-d array")
        if p.min() < -1e-14:
            raise ValidationError(f"probs: negative entry {p.min()}")
        object.__setattr__(self, "probs", p)
        total = p.sum() + self.tail_mass
        if abs(total - 1.0) > 1e-12:
            raise ValidationError(f"probs + tail_mass sum to {total}, expected 1")

    @property
    def support(self) -> tuple[int, int]:
        return self.d_min, self.d_min + len(self.probs) - 1

    @property
    def d_values(self) -> np.ndarray:
        return np.arange(self.d_min, self.d_min + len(self.probs))

    def prob(self, d: int) -> float:
        i = d - self.d_min
        if 0 <= i < len(self.probs):
            return float(self.probs[i])
        return 0.0

    def mean(self) -> float:
        return float(self.d_values @ self.probs)

    def variance(self) -> float:
        m = self.mean()
        return float((self.d_values - m) ** 2 @ self.probs)


@dataclass(frozen=True)
class VarianceReport:
    """Difference-photocurrent variance next to its shot-noise benchmark."""

    sigma2_d: float
    shot_noise_level: float
    below_shot_noise: bool


def bessel_i(order: int, z: float, term_tol: float = 1e-15) -> float:
    """Modified Bessel function of the first kind, by its ascending series.

    Accurate for the moderate arguments that occur here (z up to a few tens);
    terms are added until they fall below term_tol relative to the sum.
    """
    if order < 0:
        order = -order
    if z == 0.0:
        return 1.0 if order == 0 else 0.0
    half = z / 2.0
    term = math.exp(order * math.log(half) - math.lgamma(order + 1))
    total = term
    k = 0
    while True:
        k += 1
        term *= half * half / (k * (order + k))
        total += term
        if term < term_tol * total:
            return total


def correlation_coefficient(src: SourceSpec, eff: EfficiencyPair) -> float:
    """Correlation coefficient of the two detected photocurrents.

    For a coherent pair this is exactly zero.  For twin-beam and balanced
    split-thermal light, with per-mode mean n = N / mu,

        twb:      (1 + n) sqrt(eta1 eta2) / sqrt((1 + eta1 n)(1 + eta2 n))
        thermal:       n  sqrt(eta1 eta2) / sqrt((1 + eta1 n)(1 + eta2 n))

    Summing over independent mode pairs scales covariance and variances by
    the same factor mu, so the coefficient keeps the single-pair form at the
    per-mode mean.
    """
    e1, e2 = eff.eta1, eff.eta2
    if src.kind == COHERENT_PAIR:
        return 0.0
    n = src.per_mode_mean
    if src.kind == TWIN_BEAM:
        return (1.0 + n) * math.sqrt(e1 * e2) / math.sqrt((1.0 + e1 * n) * (1.0 + e2 * n))
    if src.tau == 0.5:
        return n * math.sqrt(e1 * e2) / math.sqrt((1.0 + e1 * n) * (1.0 + e2 * n))
    m = analytic_moments(src, eff)
    if m.var1 <= 0.0 or m.var2 <= 0.0:
        raise UndefinedMarkerError("correlation undefined: a beam has zero variance")
    return m.cov / math.sqrt(m.var1 * m.var2)


def correlation_from_joint(dist: JointCountDistribution) -> float:
    """Correlation coefficient computed from a joint count distribution."""
    m = detected_moments(dist)
    if m.var1 <= 0.0 or m.var2 <= 0.0:
        raise UndefinedMarkerError("correlation undefined: a beam has zero variance")
    return m.cov / math.sqrt(m.var1 * m.var2)


def difference_from_joint(dist: JointCountDistribution) -> DifferenceDistribution:
    """Distribution of d = m1 - m2 obtained by summing joint anti-diagonals."""
    c = dist.cutoff
    probs = np.array([np.trace(dist.probs, offset=-d) for d in range(-c, c + 1)])
    return DifferenceDistribution(probs, -c, dist.tail_mass)


def difference_variance(src: SourceSpec, eff: EfficiencyPair) -> VarianceReport:
    """Closed-form variance of the difference photocurrent.

    With per-beam total mean N over mu modes (quadratic term scales as 1/mu):

        coherent:  (eta1 + eta2) N
        thermal:   (eta1 - eta2)**2 N**2 / mu + (eta1 + eta2) N
        twb:       (eta1 - eta2)**2 N**2 / mu + (eta1 + eta2 - 2 eta1 eta2) N

    The shot-noise benchmark is the coherent-pair value (eta1 + eta2) N.
    """
    e1, e2 = eff.eta1, eff.eta2
    n_tot = src.n_mean
    shot = (e1 + e2) * n_tot
    if src.kind == COHERENT_PAIR:
        s2 = shot
    elif src.kind == SPLIT_THERMAL:
        if src.tau == 0.5:
            s2 = (e1 - e2) ** 2 * n_tot**2 / src.mu + (e1 + e2) * n_tot
        else:
            m = analytic_moments(src, eff)
            s2 = m.var1 + m.var2 - 2.0 * m.cov
    elif e1 == e2:
        # balanced twin beam, kept in the textbook form so the identity is exact
        s2 = 2.0 * e1 * (1.0 - e1) * n_tot
    else:
        s2 = (e1 - e2) ** 2 * n_tot**2 / src.mu + (e1 + e2 - 2.0 * e1 * e2) * n_tot
    return VarianceReport(s2, shot, bool(s2 < shot))


def variance_threshold(eff: EfficiencyPair):
    """Mean photon number below which the twin-beam difference variance
    stays under the coherent-pair benchmark.

    Equals 2 eta1 eta2 / (eta1 - eta2)**2.  For equal efficiencies the twin
    beam wins at every intensity; that case returns None rather than a
    numeric infinity.
    """
    if eff.eta1 == eff.eta2:
        return None
    return 2.0 * eff.eta1 * eff.eta2 / (eff.eta1 - eff.eta2) ** 2


def _auto_window(src: SourceSpec, eff: EfficiencyPair) -> int:
    """Symmetric half-width expected to capture all but ~1e-10 of p(d)."""
    rep = difference_variance(src, eff)
    drift = abs(eff.eta1 - eff.eta2) * src.n_mean
    return int(math.ceil(drift + 12.0 * math.sqrt(max(rep.sigma2_d, 0.0)))) + 2


def difference_analytic(src: SourceSpec, eff: EfficiencyPair, d_range=None,
                        tail_tol: float = DEFAULT_TAIL_TOL) -> DifferenceDistribution:
    """Analytic single-mode-pair distribution of the difference photocurrent.

    coherent pair
        Skellam law: p(d) = exp(-(eta1+eta2) N) (eta1/eta2)**(d/2)
        I_|d|(2 N sqrt(eta1 eta2)).
    twin beam
        Double geometric series evaluated adaptively (see _twb_diff_prob).
    split thermal
        Evaluated through the exact thinned joint distribution; the direct
        triple series buys nothing over that route numerically.

    d_range may be a (d_min, d_max) pair; by default the smallest symmetric
    window holding 1 - tail_tol of the mass is used (12-sigma estimate,
    then verified and widened if needed).
    """
    if src.mu != 1:
        raise ValidationError("difference_analytic handles a single mode pair; "
                              "use multimode_difference for mu > 1")
    if src.kind == SPLIT_THERMAL:
        joint = source_joint(src, tail_tol=min(tail_tol, 1e-12))
        return difference_from_joint(thin_joint(joint, eff))
    if d_range is not None:
        d_lo, d_hi = int(d_range[0]), int(d_range[1])
        probs = np.array([_diff_point(d, src, eff) for d in range(d_lo, d_hi + 1)])
        return DifferenceDistribution(probs, d_lo, max(0.0, 1.0 - probs.sum()))
    half = max(_auto_window(src, eff), 1)
    for _ in range(6):
        probs = np.array([_diff_point(d, src, eff) for d in range(-half, half + 1)])
        missing = 1.0 - probs.sum()
        if missing <= tail_tol:
            return DifferenceDistribution(probs, -half, max(0.0, missing))
        half = 2 * half
    raise TailToleranceError(
        f"difference window +-{half // 2} still misses {missing:g} probability")


def _diff_point(d, src, eff):
    if src.n_mean == 0.0:
        return 1.0 if d == 0 else 0.0
    if src.kind == COHERENT_PAIR:
        return _skellam_prob(d, src.n_mean, eff.eta1, eff.eta2)
    return _twb_diff_prob(d, src.n_mean, eff.eta1, eff.eta2)


def _skellam_prob(d, n_mean, eta1, eta2):
    lam1, lam2 = eta1 * n_mean, eta2 * n_mean
    if lam1 == 0.0 and lam2 == 0.0:
        return 1.0 if d == 0 else 0.0
    if lam2 == 0.0:
        return _poisson_prob(d, lam1)
    if lam1 == 0.0:
        return _poisson_prob(-d, lam2)
    return (
        math.exp(-(lam1 + lam2))
        * (eta1 / eta2) ** (d / 2.0)
        * bessel_i(abs(d), 2.0 * n_mean * math.sqrt(eta1 * eta2))
    )


def _poisson_prob(k, lam):
    if k < 0:
        return 0.0
    return math.exp(k * math.log(lam) - lam - math.lgamma(k + 1))


def _twb_diff_prob(d, n_mean, eta1, eta2, term_tol=1e-16):
    """p(d) for a thinned twin beam, as a double series.

    With y = N/(1+N), a = |d| (efficiencies swapped for d < 0):

        p(d) = (eta1 (1-eta2) y)**a / (1+N)
               * sum_n (eta1 eta2 y)**n
               * sum_j ((1-eta1)(1-eta2) y)**j C(q, n) C(q, n+a),  q = n+a+j.

    Both ratios are strict geometric factors, so the block is evaluated on a
    rectangle that is doubled until the border rows contribute less than
    term_tol of the running sum.
    """
    if d < 0:
        return _twb_diff_prob(-d, n_mean, eta2, eta1, term_tol)
    a = d
    y = n_mean / (1.0 + n_mean)
    outer = eta1 * eta2 * y
    inner = (1.0 - eta1) * (1.0 - eta2) * y
    pref = (eta1 * (1.0 - eta2) * y) ** a / (1.0 + n_mean)
    if pref == 0.0:
        return 0.0
    n_cap = _series_cap(outer)
    j_cap = _series_cap(inner) + 4 * a + 8
    for _ in range(40):
        n = np.arange(n_cap, dtype=float)[:, None]
        j = np.arange(j_cap, dtype=float)[None, :]
        q = n + a + j
        log_binoms = (
            2.0 * gammaln(q + 1.0)
            - gammaln(n + 1.0) - gammaln(a + j + 1.0)
            - gammaln(n + a + 1.0) - gammaln(j + 1.0)
        )
        with np.errstate(divide="ignore"):
            log_geo = (
                n * (np.log(outer) if outer > 0 else -np.inf)
                + j * (np.log(inner) if inner > 0 else -np.inf)
            )
        terms = np.exp(log_binoms + log_geo)
        if outer == 0.0:
            terms[1:, :] = 0.0
        if inner == 0.0:
            terms[:, 1:] = 0.0
        total = terms.sum()
        edge = terms[-1, :].sum() + terms[:, -1].sum()
        if edge <= term_tol * max(total, 1e-300):
            return pref * total
        n_cap = n_cap if outer == 0.0 else 2 * n_cap
        j_cap = j_cap if inner == 0.0 else 2 * j_cap
    raise TailToleranceError("difference series did not converge")


def _series_cap(ratio):
    if ratio <= 0.0:
        return 1
    return max(8, int(math.log(1e-18) / math.log(ratio)) + 16)


def multimode_difference(dd: DifferenceDistribution, mu: int,
                         tail_tol: float = DEFAULT_TAIL_TOL) -> DifferenceDistribution:
    """Difference distribution for mu independent mode pairs.

    The total difference is the sum of the per-pair differences, so this is
    the mu-fold self-convolution of the single-pair law.
    """
    if int(mu) != mu or mu < 1:
        raise ValidationError(f"mu: must be an integer >= 1, got {mu}")
    if mu == 1:
        return dd
    probs = dd.probs
    d_min = dd.d_min
    for _ in range(mu - 1):
        probs = np.convolve(probs, dd.probs)
        d_min += dd.d_min
    np.maximum(probs, 0.0, out=probs)
    probs, d_min = _trim_ends(probs, d_min, tail_tol / 2)
    return DifferenceDistribution(probs, d_min, max(0.0, 1.0 - probs.sum()))


def _trim_ends(p, d_min, budget):
    lo, hi = 0, len(p)
    dropped = 0.0
    while hi - lo > 1:
        head, tail = p[lo], p[hi - 1]
        nxt = min(head, tail)
        if dropped + nxt > budget:
            break
        if head <= tail:
            lo += 1
        else:
            hi -= 1
        dropped += nxt
    return np.ascontiguousarray(p[lo:hi]), d_min + lo
