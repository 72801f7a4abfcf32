"""This script defines PolicySpec, SelectionContext and the virtual class
SelectionPolicy shared by all example selection policies."""

import logging

import numpy as np

log = logging.getLogger(__name__)

# The first candidate 'APM_LR' is the default.
POLICY_KINDS = ("APM_LR", "APM_LR_U", "APM_LR_V", "Uncertainty", "Random",
                "MaxVar", "InfoGain", "BALD")

# InfoGain posterior sample count.
DEFAULT_SAMPLES = 100

# The first candidate 'covariance' is the default.
POWER_MODES = ("covariance", "second-moment")


def canonicalKind(name):
    """Return the canonical spelling of a policy kind, matched
    case-insensitively; '-' and '_' are interchangeable."""
    key = str(name).strip().upper().replace("-", "_")
    for kind in POLICY_KINDS:
        if kind.upper() == key:
            return kind
    errMsg = "Unknown selection policy {0!r}; choose from {1}.".format(
        name, ", ".join(POLICY_KINDS))
    log.error(errMsg)
    raise ValueError(errMsg)


class PolicySpec(object):
    """Tagged choice of a selection policy plus its hyperparameters.

        kind      : one of POLICY_KINDS (any case)
        s         : InfoGain sample count, >= 1
        rng       : RngStream used by Random and InfoGain
        powerMode : one of POWER_MODES, used by the APM policies
    """
    def __init__(self, kind, s=DEFAULT_SAMPLES, rng=None,
                 powerMode=POWER_MODES[0]):
        self.kind = canonicalKind(kind)
        if int(s) < 1:
            errMsg = "The InfoGain sample count must be >= 1, got " \
                     "{0}.".format(s)
            log.error(errMsg)
            raise ValueError(errMsg)
        if powerMode not in POWER_MODES:
            errMsg = "Unknown power mode {0!r}; choose from {1}.".format(
                powerMode, POWER_MODES)
            log.error(errMsg)
            raise ValueError(errMsg)
        self.s = int(s)
        self.rng = rng
        self.powerMode = powerMode

    def withRng(self, rng):
        """Return a copy of this spec using rng."""
        return PolicySpec(self.kind, self.s, rng, self.powerMode)

    def __repr__(self):
        return "PolicySpec(kind={0}, s={1})".format(self.kind, self.s)


class SelectionContext(object):
    """State a policy selects from.

        pool      : Dataset (normalized pool)
        available : unlabeled pool indices, stored sorted ascending
        posterior : GaussianPosterior of the labeled set
        map_model : MapModel of the labeled set
        B         : pool bound
    """
    def __init__(self, pool, available, posterior, map_model, B):
        available = np.unique(np.asarray(available, dtype=int))
        if available.size == 0:
            errMsg = "No unlabeled pool examples are available to select."
            log.error(errMsg)
            raise ValueError(errMsg)
        if not B > 0:
            raise ValueError("The pool bound B must be positive.")
        self.pool = pool
        self.available = available
        self.posterior = posterior
        self.map_model = map_model
        self.B = float(B)

    @property
    def candidates(self):
        """Feature rows of the available examples."""
        return self.pool.X[self.available]


def argbest(scores, scoreSign, atol=0.0):
    """Position of the best score, scoreSign -1 meaning lower is better.

    Scores within atol of the best are ties, resolved to the first
    position."""
    oriented = scoreSign * np.asarray(scores, dtype=float)
    best = np.max(oriented)
    return int(np.flatnonzero(oriented >= best - atol)[0])


class SelectionPolicy(object):
    """Super class for all selection policies.

        Non-abstract subclasses should define the following properties.
            name      : policy kind
            scoreSign : -1 if lower scores are better, 1 otherwise
        and override scores(ctx), unless select(ctx) is overridden.
    """
    # Absolute tolerance under which two scores tie.
    tieAtol = 0.0

    def __init__(self, spec):
        self._spec = spec

    @property
    def name(self):
        """Policy name."""
        raise NotImplementedError(
            "Virtual property name() for {0} must be overwritten.".
            format(type(self)))

    @property
    def scoreSign(self):
        """Score sign can be -1 or 1.
           -1: lower scores are better than higher ones.
           1: higher scores are better than lower ones.
        """
        raise NotImplementedError(
            "Virtual property scoreSign() for {0} must be overwritten.".
            format(type(self)))

    @property
    def spec(self):
        return self._spec

    def scores(self, ctx):
        """Score every example of ctx.available, in order."""
        raise NotImplementedError(
            "scores() method for {0} must be overridden.".format(type(self)))

    def select(self, ctx):
        """Return the pool index of the best available example."""
        position = argbest(self.scores(ctx), self.scoreSign, self.tieAtol)
        return int(ctx.available[position])


def exploit_metric(x, theta_hat):
    """Euclidean distance |x^T theta| / ||theta|| from x to the homogeneous
    hyperplane of theta_hat."""
    theta_hat = np.asarray(theta_hat, dtype=float)
    norm = np.linalg.norm(theta_hat)
    if norm == 0:
        errMsg = "The distance to a hyperplane needs a non-zero normal."
        log.error(errMsg)
        raise ValueError(errMsg)
    return float(abs(np.dot(x, theta_hat)) / norm)
