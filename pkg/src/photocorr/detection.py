"""Detection model: binomial thinning with quantum efficiency.

A detector of quantum efficiency eta registers each incident photon
independently with probability eta and produces no dark counts, so a photon
number n yields a detected count m ~ Binomial(n, eta).  This module applies
that map to joint distributions and provides detected-count moments in both
distribution-derived and closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import convolve2d
from scipy.stats import binom

from .errors import TailToleranceError, ValidationError
from .sources import (
    COHERENT_PAIR,
    DEFAULT_TAIL_TOL,
    MAX_AUTO_CUTOFF,
    SPLIT_THERMAL,
    TWIN_BEAM,
    JointCountDistribution,
    SourceSpec,
)


@dataclass(frozen=True)
class EfficiencyPair:
    """Quantum efficiencies of the two detection branches."""

    eta1: float
    eta2: float

    def __post_init__(self):
        for name, eta in (("eta1", self.eta1), ("eta2", self.eta2)):
            if not (0.0 <= eta <= 1.0):
                raise ValidationError(f"{name}: must lie in [0, 1], got {eta}")


@dataclass(frozen=True)
class MomentSet:
    """First and second moments of the two detected photocurrents."""

    mean1: float
    mean2: float
    var1: float
    var2: float
    cov: float


def loss_matrix(eta, cutoff):
    """L[m, n] = Binomial(n, eta) pmf at m, for m, n = 0..cutoff."""
    n = np.arange(cutoff + 1)
    return binom.pmf(n[:, None], n[None, :], eta)


def thin_joint(dist: JointCountDistribution, eff: EfficiencyPair) -> JointCountDistribution:
    """Apply independent binomial thinning to both beams of a joint distribution.

    Total probability is preserved exactly (every photon pattern maps to some
    count pattern at or below it); the recorded tail mass carries over.
    """
    c = dist.cutoff
    l1 = loss_matrix(eff.eta1, c)
    l2 = loss_matrix(eff.eta2, c)
    thinned = l1 @ dist.probs @ l2.T
    np.maximum(thinned, 0.0, out=thinned)
    return JointCountDistribution(thinned, dist.tail_mass)


def detected_moments(dist: JointCountDistribution) -> MomentSet:
    """Exact moments of the (truncated) joint distribution."""
    p = dist.probs
    n = np.arange(p.shape[0], dtype=float)
    p1 = p.sum(axis=1)
    p2 = p.sum(axis=0)
    m1 = p1 @ n
    m2 = p2 @ n
    v1 = p1 @ n**2 - m1**2
    v2 = p2 @ n**2 - m2**2
    cov = n @ p @ n - m1 * m2
    return MomentSet(m1, m2, v1, v2, cov)


def analytic_moments(src: SourceSpec, eff: EfficiencyPair) -> MomentSet:
    """Closed-form detected moments for a source measured with efficiencies eff.

    The mu mode pairs are independent and identically populated, so photon
    moments are mu times the per-mode values; detection maps a photon-number
    variance s2 and mean nb to eta**2 * s2 + eta * (1 - eta) * nb.
    """
    e1, e2 = eff.eta1, eff.eta2
    n = src.per_mode_mean
    mu = src.mu
    if src.kind == TWIN_BEAM:
        nb1 = nb2 = mu * n
        s1 = s2 = mu * n * (1.0 + n)  # thermal marginal per mode, summed
        cov_n = s1  # identical photon numbers per mode pair
    elif src.kind == COHERENT_PAIR:
        nb1 = nb2 = mu * n
        s1 = s2 = mu * n
        cov_n = 0.0
    else:
        a = 2.0 * n * src.tau
        b = 2.0 * n * (1.0 - src.tau)
        nb1, nb2 = mu * a, mu * b
        s1 = mu * a * (1.0 + a)
        s2 = mu * b * (1.0 + b)
        cov_n = mu * 4.0 * n * n * src.tau * (1.0 - src.tau)
    v1 = e1**2 * s1 + e1 * (1.0 - e1) * nb1
    v2 = e2**2 * s2 + e2 * (1.0 - e2) * nb2
    return MomentSet(e1 * nb1, e2 * nb2, v1, v2, e1 * e2 * cov_n)


def multimode_convolve(dist: JointCountDistribution, mu: int,
                       tail_tol: float = DEFAULT_TAIL_TOL) -> JointCountDistribution:
    """Distribution of per-beam count sums over mu independent mode pairs.

    Computed as the mu-fold two-dimensional self-convolution of the
    single-pair distribution, by direct summation.  The support grows to
    mu * cutoff and is then trimmed back while the discarded mass stays
    within tail_tol.
    """
    if int(mu) != mu or mu < 1:
        raise ValidationError(f"mu: must be an integer >= 1, got {mu}")
    if mu == 1:
        return dist
    if mu * dist.cutoff > MAX_AUTO_CUTOFF:
        raise TailToleranceError(
            f"convolved support {mu * dist.cutoff} exceeds the cap {MAX_AUTO_CUTOFF}",
            required_cutoff=mu * dist.cutoff,
        )
    out = dist.probs
    for _ in range(mu - 1):
        out = convolve2d(out, dist.probs)
    np.maximum(out, 0.0, out=out)
    out, trimmed = _trim_square(out, tail_tol / 2)
    tail = max(0.0, 1.0 - out.sum())
    return JointCountDistribution(out, tail)


def _trim_square(p, budget):
    """Drop trailing rows/columns whose combined mass stays below budget."""
    c = p.shape[0]
    dropped = 0.0
    while c > 1:
        edge = p[c - 1, :c].sum() + p[:c - 1, c - 1].sum()
        if dropped + edge > budget:
            break
        dropped += edge
        c -= 1
    return np.ascontiguousarray(p[:c, :c]), dropped
