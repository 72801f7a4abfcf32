"""This script defines the approximate posterior matching policies.

APM_LR selects the example whose channel input distribution
N(mu^T x, x^T Sigma x) is closest in 2-Wasserstein distance to the
capacity-achieving two-point distribution at power P, i.e. it minimizes

    (mu^T x)^2 + (sqrt(x^T Sigma x) - sqrt(2 P / pi))^2

with P = B^2 lambda_1(Sigma). APM_LR_U keeps only the first term and
APM_LR_V only the second one.
"""

import logging
import math

import numpy as np

from apmlr.posterior import channel_moments
from apmlr.selection.policy import POWER_MODES, SelectionPolicy
from apmlr.utils.numkit import dominant_eigenvalue

log = logging.getLogger(__name__)

POWER_TOL = 1e-8


def power_constraint(post, B, mode=POWER_MODES[0]):
    """Per-iteration power constraint.

        mode 'covariance'   : B^2 lambda_1(Sigma)
        mode 'second-moment': B^2 lambda_1(Sigma + mu mu^T), the largest
                              E[L^2] over the ball ||x|| <= B.
    """
    if not B > 0:
        raise ValueError("The pool bound B must be positive, got "
                         "{0}.".format(B))
    if mode == "covariance":
        M = post.sigma
    elif mode == "second-moment":
        M = post.secondMoment()
    else:
        errMsg = "Unknown power mode {0!r}; choose from {1}.".format(
            mode, POWER_MODES)
        log.error(errMsg)
        raise ValueError(errMsg)
    return B * B * dominant_eigenvalue(M, tol=POWER_TOL)


def _targetScale(P):
    if not P > 0:
        raise ValueError("The power constraint must be positive, got "
                         "{0}.".format(P))
    return math.sqrt(2.0 * P / math.pi)


def apm_score_from_moments(mean, var, P):
    """APM objective from channel input moments; accepts arrays."""
    target = _targetScale(P)
    mean = np.asarray(mean, dtype=float)
    std = np.sqrt(np.maximum(np.asarray(var, dtype=float), 0.0))
    return mean * mean + (std - target) ** 2


def apm_score(x, post, P):
    """APM objective of a single example x; lower is better."""
    x = np.asarray(x, dtype=float)
    mean = float(post.mu.dot(x))
    var = float(x.dot(post.sigma).dot(x))
    return float(apm_score_from_moments(mean, var, P))


class APM(SelectionPolicy):
    """APM_LR: both terms active."""
    def __init__(self, spec):
        super(APM, self).__init__(spec)
        self.lastPower = None

    @property
    def name(self):
        return "APM_LR"

    @property
    def scoreSign(self):
        return -1

    def _power(self, ctx):
        P = power_constraint(ctx.posterior, ctx.B, self.spec.powerMode)
        self.lastPower = P
        log.debug("%s: power constraint P = %.6g.", self.name, P)
        return P

    def _score(self, mean, var, P):
        return apm_score_from_moments(mean, var, P)

    def scores(self, ctx):
        P = self._power(ctx)
        mean, var = channel_moments(ctx.posterior, ctx.candidates)
        return self._score(mean, var, P)


class APM_LR_U(APM):
    """Exploitation term only: (mu^T x)^2."""
    @property
    def name(self):
        return "APM_LR_U"

    def scores(self, ctx):
        # P does not enter the score.
        mean = ctx.candidates.dot(ctx.posterior.mu)
        return mean * mean


class APM_LR_V(APM):
    """Exploration term only: (sqrt(x^T Sigma x) - sqrt(2P/pi))^2."""
    @property
    def name(self):
        return "APM_LR_V"

    def _score(self, mean, var, P):
        return (np.sqrt(var) - _targetScale(P)) ** 2
