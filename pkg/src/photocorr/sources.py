"""Photon-number statistics of two-beam light sources.

Three benchmark sources are covered, all parametrized by the per-beam mean
photon number N (the total over all populated modes):

* twin beam: pairwise-correlated beams from parametric downconversion, with
  identical photon numbers in the two beams of each mode pair,
* coherent pair: two independent coherent beams (Poissonian, uncorrelated),
* split thermal: a thermal beam of mean 2N divided on a beam splitter of
  transmissivity tau (classically correlated outputs).

Joint distributions are exact but truncated; every constructor records the
probability mass left outside the truncation window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import TailToleranceError, ValidationError

TWIN_BEAM = "twin_beam"
COHERENT_PAIR = "coherent_pair"
SPLIT_THERMAL = "split_thermal"

_KINDS = (TWIN_BEAM, COHERENT_PAIR, SPLIT_THERMAL)

#: Default bound on the probability mass allowed outside the truncation window.
DEFAULT_TAIL_TOL = 1e-10

#: Hard cap on automatically chosen cutoffs; larger requirements raise
#: TailToleranceError instead of allocating huge matrices.
MAX_AUTO_CUTOFF = 20000


@dataclass(frozen=True)
class SourceSpec:
    """Which two-beam source to model.

    n_mean is the mean photon number of each beam, totalled over the mu
    identically populated mode pairs.  tau applies to split thermal light
    only (transmissivity of the splitter; 1/2 gives balanced beams).
    """

    kind: str
    n_mean: float
    mu: int = 1
    tau: float = 0.5

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValidationError(f"kind: expected one of {_KINDS}, got {self.kind!r}")
        if not (self.n_mean >= 0.0):
            raise ValidationError(f"n_mean: must be >= 0, got {self.n_mean}")
        if int(self.mu) != self.mu or self.mu < 1:
            raise ValidationError(f"mu: must be an integer >= 1, got {self.mu}")
        if not (0.0 <= self.tau <= 1.0):
            raise ValidationError(f"tau: must lie in [0, 1], got {self.tau}")

    @classmethod
    def twin_beam(cls, n_mean, mu=1):
        return cls(TWIN_BEAM, n_mean, mu)

    @classmethod
    def coherent_pair(cls, n_mean, mu=1):
        return cls(COHERENT_PAIR, n_mean, mu)

    @classmethod
    def split_thermal(cls, n_mean, mu=1, tau=0.5):
        return cls(SPLIT_THERMAL, n_mean, mu, tau)

    @property
    def per_mode_mean(self) -> float:
        return self.n_mean / self.mu


@dataclass(frozen=True)
class JointCountDistribution:
    """Truncated joint probability matrix over photon (or count) pairs.

    probs[n1, n2] is the probability of n1 counts on beam 1 and n2 on
    beam 2, for n1, n2 = 0..cutoff.  tail_mass is the probability left
    outside the window, so probs.sum() + tail_mass == 1.
    """

    probs: np.ndarray
    tail_mass: float = field(default=0.0)

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ValidationError(f"probs: expected a square matrix, got shape {p.shape}")
        if p.min() < -1e-14:
            raise ValidationError(f"probs: negative entry {p.min()}")
        object.__setattr__(self, "probs", p)
        total = p.sum() + self.tail_mass
        if abs(total - 1.0) > 1e-12:
            raise ValidationError(f"probs + tail_mass sum to {total}, expected 1")

    @property
    def cutoff(self) -> int:
        return self.probs.shape[0] - 1

    def marginal(self, beam: int) -> np.ndarray:
        if beam not in (1, 2):
            raise ValidationError("beam: must be 1 or 2")
        return self.probs.sum(axis=2 - beam)


def thermal_pmf(k, mean):
    """Bose-Einstein (geometric) pmf with the given mean, in log space."""
    k = np.asarray(k)
    if mean < 0:
        raise ValidationError(f"mean: must be >= 0, got {mean}")
    if mean == 0.0:
        return np.where(k == 0, 1.0, 0.0)
    # (1/(1+m)) * (m/(1+m))**k, evaluated as exp() of logs for large k
    return np.exp(k * (math.log(mean) - math.log1p(mean)) - math.log1p(mean))


def _geometric_cutoff(mean, tail_tol):
    """Smallest C with sum_{k>C} thermal_pmf <= tail_tol (tail = r**(C+1))."""
    if mean == 0.0:
        return 0
    r = mean / (1.0 + mean)
    return max(0, math.ceil(math.log(tail_tol) / math.log(r)) - 1)


def _check_cutoff(required, cutoff, tail_tol):
    if cutoff is not None:
        return int(cutoff)
    if required > MAX_AUTO_CUTOFF:
        raise TailToleranceError(
            f"cutoff {required} needed for tail tolerance {tail_tol:g} "
            f"exceeds the cap {MAX_AUTO_CUTOFF}",
            required_cutoff=required,
        )
    return required


def twin_beam_joint(n_mean, cutoff=None, tail_tol=DEFAULT_TAIL_TOL):
    """Joint photon-number distribution of a single twin-beam mode pair.

    The matrix is diagonal: both beams carry exactly the same photon number,
    distributed thermally with mean n_mean.  If cutoff is omitted it is
    chosen so the recorded tail mass is at most tail_tol.
    """
    if n_mean < 0:
        raise ValidationError(f"n_mean: must be >= 0, got {n_mean}")
    c = _check_cutoff(_geometric_cutoff(n_mean, tail_tol), cutoff, tail_tol)
    n = np.arange(c + 1)
    probs = np.zeros((c + 1, c + 1))
    probs[n, n] = thermal_pmf(n, n_mean)
    if n_mean == 0.0:
        tail = 0.0
    else:
        r = n_mean / (1.0 + n_mean)
        tail = r ** (c + 1)
    return JointCountDistribution(probs, tail)


def coherent_pair_joint(n_mean, cutoff=None, tail_tol=DEFAULT_TAIL_TOL):
    """Joint distribution of two independent coherent beams of mean n_mean."""
    if n_mean < 0:
        raise ValidationError(f"n_mean: must be >= 0, got {n_mean}")
    if n_mean == 0.0:
        required = 0
    elif cutoff is None and n_mean > MAX_AUTO_CUTOFF:
        required = int(n_mean)  # already over the cap; skip the cdf walk
    else:
        # Poisson tail bound via Chernoff is loose; walk the cdf directly.
        required = int(np.searchsorted(_poisson_cdf_grid(n_mean), 1.0 - tail_tol / 2) + 1)
    c = _check_cutoff(required, cutoff, tail_tol)
    k = np.arange(c + 1)
    pk = _poisson_pmf(k, n_mean)
    probs = np.outer(pk, pk)
    return JointCountDistribution(probs, max(0.0, 1.0 - probs.sum()))


def split_thermal_joint(n_mean, tau=0.5, cutoff=None, tail_tol=DEFAULT_TAIL_TOL):
    """Joint distribution of a thermal beam of mean 2*n_mean split at tau.

    probs[n1, n2] = Binom(n1+n2, n1; tau) * thermal_pmf(n1+n2, 2*n_mean).
    Each marginal is thermal, with means 2*n_mean*tau and 2*n_mean*(1-tau).
    """
    if n_mean < 0:
        raise ValidationError(f"n_mean: must be >= 0, got {n_mean}")
    if not (0.0 <= tau <= 1.0):
        raise ValidationError(f"tau: must lie in [0, 1], got {tau}")
    m1, m2 = 2.0 * n_mean * tau, 2.0 * n_mean * (1.0 - tau)
    required = max(_geometric_cutoff(m1, tail_tol / 2), _geometric_cutoff(m2, tail_tol / 2))
    c = _check_cutoff(required, cutoff, tail_tol)
    n1 = np.arange(c + 1)[:, None]
    n2 = np.arange(c + 1)[None, :]
    tot = n1 + n2
    with np.errstate(divide="ignore"):
        log_split = (
            gammaln(tot + 1) - gammaln(n1 + 1) - gammaln(n2 + 1)
            + n1 * np.log(tau if tau > 0 else 1.0)
            + n2 * np.log1p(-tau if tau < 1 else 0.0)
        )
    if n_mean == 0.0:
        probs = np.zeros((c + 1, c + 1))
        probs[0, 0] = 1.0
    else:
        log_nu = tot * (math.log(2 * n_mean) - math.log1p(2 * n_mean)) - math.log1p(2 * n_mean)
        probs = np.exp(log_split + log_nu)
        if tau == 0.0:
            probs[1:, :] = 0.0
            probs[0, :] = thermal_pmf(np.arange(c + 1), m2)
        elif tau == 1.0:
            probs[:, 1:] = 0.0
            probs[:, 0] = thermal_pmf(np.arange(c + 1), m1)
    return JointCountDistribution(probs, max(0.0, 1.0 - probs.sum()))


def source_joint(src: SourceSpec, cutoff=None, tail_tol=DEFAULT_TAIL_TOL):
    """Single-mode-pair joint distribution for a SourceSpec."""
    if src.kind == TWIN_BEAM:
        return twin_beam_joint(src.n_mean, cutoff, tail_tol)
    if src.kind == COHERENT_PAIR:
        return coherent_pair_joint(src.n_mean, cutoff, tail_tol)
    return split_thermal_joint(src.n_mean, src.tau, cutoff, tail_tol)


def multithermal_pdf(v, mu, v_mean):
    """Density of the sum of mu equally populated thermal modes.

    This is the high-intensity (continuous) law: a Gamma density with shape
    mu and mean v_mean, variance v_mean**2 / mu.  Non-integer mu >= 1 is
    accepted; the factorial generalizes through the Gamma function.
    """
    if mu < 1:
        raise ValidationError(f"mu: must be >= 1, got {mu}")
    if v_mean <= 0:
        raise ValidationError(f"v_mean: must be > 0, got {v_mean}")
    v = np.asarray(v, dtype=float)
    if np.any(v < 0):
        raise ValidationError("v: negative values are outside the support")
    scalar = v.ndim == 0
    v = np.atleast_1d(v)
    out = np.zeros_like(v)
    pos = v > 0
    out[pos] = np.exp(
        -v[pos] * mu / v_mean
        + (mu - 1) * np.log(v[pos])
        - gammaln(mu)
        - mu * math.log(v_mean / mu)
    )
    if mu == 1:
        out[~pos] = 1.0 / v_mean
    return out[0] if scalar else out


def _poisson_pmf(k, lam):
    k = np.asarray(k)
    if lam == 0.0:
        return np.where(k == 0, 1.0, 0.0)
    return np.exp(k * math.log(lam) - lam - gammaln(k + 1))


def _poisson_cdf_grid(lam):
    top = int(lam + 20 * math.sqrt(lam) + 40)
    return np.cumsum(_poisson_pmf(np.arange(top), lam))
