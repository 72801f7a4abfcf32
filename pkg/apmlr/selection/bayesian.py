"""This script defines the information-maximizing policies InfoGain and
BALD.

InfoGain estimates I(theta; Y | L) by Monte Carlo over s posterior samples,

    h_b(1/s sum_i f(theta_i^T x)) - 1/s sum_i h_b(f(theta_i^T x)),

with one sample batch per selection round shared by all candidates. BALD
replaces f by the probit Phi(k l) and uses the closed-form approximation

    h_b(Phi(k m / sqrt(k^2 v + 1))) - D exp(-k^2 m^2 / (2 (k^2 v + D^2)))
                                      / sqrt(k^2 v + D^2)

with k = sqrt(pi / 8) and D = sqrt(pi ln 2 / 2).
"""

import logging
import math

import numpy as np
from scipy import linalg
from scipy.special import expit, ndtr
from scipy.stats import spearmanr

from apmlr.infotheory import binary_entropy
from apmlr.posterior import channel_moments
from apmlr.selection.policy import SelectionPolicy

log = logging.getLogger(__name__)

PROBIT_K = math.sqrt(math.pi / 8.0)
BALD_D = math.sqrt(math.pi * math.log(2.0) / 2.0)

INFOGAIN_TIE_ATOL = 1e-12


def bald_score(mean, var):
    """Closed-form BALD information estimate; accepts arrays."""
    mean = np.asarray(mean, dtype=float)
    var = np.asarray(var, dtype=float)
    if np.any(var < 0):
        raise ValueError("bald_score needs var >= 0.")
    k2v = PROBIT_K * PROBIT_K * var
    d2 = BALD_D * BALD_D
    entropy = binary_entropy(ndtr(PROBIT_K * mean / np.sqrt(k2v + 1.0)))
    expected = BALD_D * np.exp(-PROBIT_K * PROBIT_K * mean * mean /
                               (2.0 * (k2v + d2))) / np.sqrt(k2v + d2)
    score = entropy - expected
    return float(score) if np.ndim(score) == 0 else score


def posterior_samples(post, s, rng):
    """s draws theta_i ~ N(mu, Sigma) as rows; Sigma may be singular."""
    w, V = linalg.eigh(post.sigma)
    root = V * np.sqrt(np.maximum(w, 0.0))
    return post.mu + rng.standard_normal((s, post.d)).dot(root.T)


def infogain_scores(X, thetas):
    """Monte Carlo information gain of every row of X for the posterior
    samples thetas (one per row)."""
    p = expit(np.asarray(X, dtype=float).dot(np.asarray(thetas).T))
    marginal = np.clip(p.mean(axis=1), 0.0, 1.0)
    return binary_entropy(marginal) - binary_entropy(p).mean(axis=1)


def bald_infogain_rank_agreement(post, X, s, rng):
    """Spearman rank correlation between BALD and s-sample InfoGain scores
    over the rows of X."""
    mean, var = channel_moments(post, X)
    mc = infogain_scores(X, posterior_samples(post, s, rng))
    rho = float(spearmanr(bald_score(mean, var), mc)[0])
    log.info("BALD and InfoGain (s = %d) rank correlation: %.4f.", s, rho)
    return rho


class InfoGain(SelectionPolicy):
    """Largest Monte Carlo information gain."""
    tieAtol = INFOGAIN_TIE_ATOL

    def __init__(self, spec):
        super(InfoGain, self).__init__(spec)
        self.lastSamples = None

    @property
    def name(self):
        return "InfoGain"

    @property
    def scoreSign(self):
        return 1

    def scores(self, ctx):
        if self.spec.rng is None:
            raise ValueError("InfoGain selection needs an RngStream.")
        self.lastSamples = posterior_samples(ctx.posterior, self.spec.s,
                                             self.spec.rng)
        return infogain_scores(ctx.candidates, self.lastSamples)


class BALD(SelectionPolicy):
    """Largest probit BALD approximation."""
    @property
    def name(self):
        return "BALD"

    @property
    def scoreSign(self):
        return 1

    def scores(self, ctx):
        mean, var = channel_moments(ctx.posterior, ctx.candidates)
        return bald_score(mean, var)
