"""This script defines the channel quantities of the logistic label channel
Y | L ~ f(L): binary entropy, mutual information of Gaussian and discrete
inputs, capacity under a power constraint, 2-Wasserstein distances to the
capacity-achieving two-point distribution and a verifier of the bound

    C(P) - I(p_L, f) <= K_P W_2(p_L, B_sqrt(P))

for Gaussian inputs with E[L^2] <= P.
"""

import json
import logging
import math

import numpy as np
from scipy.special import entr, expit

from apmlr.utils.numkit import (QUADRATURE_NODES, gauss_quadrature_expectation,
                                gaussian_abs_deviation)

log = logging.getLogger(__name__)

LOG2E = 1.0 / math.log(2.0)

# K_P = K1 log2(f(sqrt P) / (1 - f(sqrt P))) + K2 = K1 sqrt(P) log2(e) + K2
K1 = 0.25
K2 = 0.32

SLACK_TOL = 1e-9
WEIGHT_SUM_TOL = 1e-9


class TwoPointDist(object):
    """B_t: mass 1/2 at -t and at +t."""
    def __init__(self, t):
        if not t > 0:
            errMsg = "A two-point distribution needs t > 0, got {0}.".format(t)
            log.error(errMsg)
            raise ValueError(errMsg)
        self.t = float(t)

    @property
    def secondMoment(self):
        return self.t * self.t

    @property
    def absDeviation(self):
        """E|L - med| with the median taken at 0."""
        return self.t

    def mi(self):
        """I(B_t, f) = 1 - h_b(f(t))."""
        return capacity_logistic(self.secondMoment)


class ScalarGaussian(object):
    """N(mean, var)."""
    def __init__(self, mean, var):
        if not var >= 0:
            errMsg = "A Gaussian needs var >= 0, got {0}.".format(var)
            log.error(errMsg)
            raise ValueError(errMsg)
        self.mean = float(mean)
        self.var = float(var)

    @property
    def std(self):
        return math.sqrt(self.var)

    @property
    def secondMoment(self):
        return self.mean * self.mean + self.var

    @property
    def absDeviation(self):
        """E|L - med| = sigma sqrt(2 / pi); the median equals the mean."""
        return gaussian_abs_deviation(self.std)

    def __repr__(self):
        return "ScalarGaussian(mean={0!r}, var={1!r})".format(
            self.mean, self.var)


class GridDistribution(object):
    """Finite distribution: weights[i] at support[i]."""
    def __init__(self, support, weights):
        support = np.asarray(support, dtype=float).ravel()
        weights = np.asarray(weights, dtype=float).ravel()
        if support.shape != weights.shape:
            raise ValueError("Support and weights differ in length.")
        if np.any(weights < 0):
            raise ValueError("Weights must be non-negative.")
        total = float(np.sum(weights))
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            errMsg = "Weights must sum to 1, got {0!r}.".format(total)
            log.error(errMsg)
            raise ValueError(errMsg)
        self.support = support
        self.weights = weights

    def symmetrized(self):
        """p~(l) = p(l) / 2 + p(-l) / 2."""
        return GridDistribution(np.concatenate([self.support, -self.support]),
                                0.5 * np.concatenate([self.weights,
                                                      self.weights]))


def binary_entropy(p):
    """h_b(p) in bits, 0 log 0 = 0. Accepts scalars and arrays."""
    arr = np.asarray(p, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0) or np.any(arr > 1):
        errMsg = "binary_entropy needs p in [0, 1], got {0!r}.".format(p)
        log.error(errMsg)
        raise ValueError(errMsg)
    h = (entr(arr) + entr(1.0 - arr)) * LOG2E
    return float(h) if h.ndim == 0 else h


def _hbLogistic(ell):
    """h_b(f(l)); symmetric in l."""
    return binary_entropy(expit(np.abs(ell)))


def capacity_logistic(P):
    """C(P) = 1 - h_b(f(sqrt P)), the capacity of the logistic channel under
    E[L^2] <= P."""
    if P < 0:
        raise ValueError("The power P must be non-negative, got "
                         "{0}.".format(P))
    return 1.0 - binary_entropy(float(expit(math.sqrt(P))))


def mi_gaussian_logistic(g, nodes=QUADRATURE_NODES):
    """I(N(mean, var), f) = h_b(E f(L)) - E h_b(f(L)) in bits, both
    expectations by Gauss-Hermite quadrature."""
    pOne = gauss_quadrature_expectation(expit, g.mean, g.std, nodes)
    conditional = gauss_quadrature_expectation(_hbLogistic, g.mean, g.std,
                                               nodes)
    pOne = min(max(pOne, 0.0), 1.0)
    return min(max(binary_entropy(pOne) - conditional, 0.0), 1.0)


def mi_discrete(p):
    """I(p, f) in bits for a GridDistribution p, by summation."""
    pOne = float(np.clip(p.weights.dot(expit(p.support)), 0.0, 1.0))
    return binary_entropy(pOne) - float(p.weights.dot(_hbLogistic(p.support)))


def w2sq_to_two_point(moments, t):
    """W_2^2(p_L, B_t) = E[L^2] - 2 t E|L - med(L)| + t^2.

        Input:
            moments: (E[L^2], E|L - med(L)|) of p_L
            t      : > 0
    """
    secondMoment, absDeviation = moments
    if not t > 0:
        raise ValueError("t must be positive, got {0}.".format(t))
    if secondMoment < 0:
        raise ValueError("E[L^2] must be non-negative.")
    return secondMoment - 2.0 * t * absDeviation + t * t


def w2sq_gaussian_to_two_point(g, t):
    """W_2^2(N(mu, sigma^2), B_t)
    = mu^2 + (sigma - sqrt(2/pi) t)^2 + (1 - 2/pi) t^2."""
    if not t > 0:
        raise ValueError("t must be positive, got {0}.".format(t))
    c = math.sqrt(2.0 / math.pi)
    return (g.mean * g.mean + (g.std - c * t) ** 2 +
            (1.0 - 2.0 / math.pi) * t * t)


def continuity_constant(P):
    """K_P = K1 sqrt(P) log2(e) + K2; log2 of the logistic odds at sqrt(P)
    is sqrt(P) log2(e)."""
    return K1 * math.sqrt(P) * LOG2E + K2


class ContinuityReport(object):
    """Outcome of verify_info_continuity at one power P.

    slack = K_P W_2 - (C - I); a violation is slack < -SLACK_TOL.
    """
    def __init__(self, P, trials, violations, maxSlack, minSlack, K,
                 capacity):
        self.P = P
        self.trials = trials
        self.violations = violations
        self.maxSlack = maxSlack
        self.minSlack = minSlack
        self.K = K
        self.capacity = capacity

    def toDict(self):
        return {"P": self.P,
                "trials": self.trials,
                "violations": self.violations,
                "max_slack": self.maxSlack,
                "min_slack": self.minSlack,
                "K_P": self.K,
                "capacity": self.capacity}

    def toJson(self):
        return json.dumps(self.toDict(), indent=2, sort_keys=True)


def _sampleGaussian(P, rng):
    """A Gaussian with E[L^2] = E, E ~ U(0, P], split randomly between the
    squared mean and the variance."""
    power = P * (1.0 - rng.uniform())
    u = rng.uniform()
    sign = 1.0 if rng.uniform() < 0.5 else -1.0
    return ScalarGaussian(sign * math.sqrt((1.0 - u) * power), u * power)


def verify_info_continuity(P, trials, rng):
    """Check C(P) - I(g, f) <= K_P W_2(g, B_sqrt(P)) + 1e-9 on `trials`
    random Gaussians g with E[L^2] <= P. The first trial is the boundary
    Gaussian N(0, P).

        Output:
            ContinuityReport
    """
    if not P > 0:
        raise ValueError("P must be positive, got {0}.".format(P))
    if trials < 1:
        raise ValueError("trials must be >= 1, got {0}.".format(trials))
    capacity = capacity_logistic(P)
    K = continuity_constant(P)
    t = math.sqrt(P)
    violations = 0
    slacks = np.empty(trials)
    for i in range(trials):
        g = ScalarGaussian(0.0, P) if i == 0 else _sampleGaussian(P, rng)
        gap = capacity - mi_gaussian_logistic(g)
        w2 = math.sqrt(max(w2sq_gaussian_to_two_point(g, t), 0.0))
        slacks[i] = K * w2 - gap
        if slacks[i] < -SLACK_TOL:
            violations += 1
            log.warning("Continuity bound violated at P = %g by %r "
                        "(slack %.3e).", P, g, slacks[i])
    report = ContinuityReport(P, trials, violations, float(slacks.max()),
                              float(slacks.min()), K, capacity)
    log.info("P = %g: %d trials, %d violations, slack in [%.3e, %.3e].",
             P, trials, violations, report.minSlack, report.maxSlack)
    return report


def mi_symmetrization_check(p):
    """Return (I(p, f), I(p~, f)) for a GridDistribution p and its
    symmetrization p~. Symmetrizing never decreases the information."""
    return mi_discrete(p), mi_discrete(p.symmetrized())
