"""This script defines the numerical substrate shared by all apmlr modules:
power iteration for the dominant eigenvalue of a symmetric matrix,
Gauss-Hermite expectations under a normal distribution, Cholesky solves and
the seedable random stream RngStream."""

import functools
import logging
import math
import zlib

import numpy as np
from scipy import linalg

log = logging.getLogger(__name__)

# Default number of Gauss-Hermite nodes.
QUADRATURE_NODES = 64
MIN_QUADRATURE_NODES = 16

# Relative tolerance used when checking symmetry.
SYMMETRY_RTOL = 1e-12

_STALL_EPS = 4 * np.finfo(float).eps


class ConvergenceError(RuntimeError):
    """An iterative routine did not converge.

    last: the last iterate (or whatever the routine reports as its state)
    residual: the last convergence measure
    """
    def __init__(self, msg, last=None, residual=None):
        super(ConvergenceError, self).__init__(msg)
        self.last = last
        self.residual = residual


class NotPositiveDefiniteError(ValueError):
    """A matrix expected to be positive definite is not."""
    pass


class NonFiniteIntegrandError(ValueError):
    """An integrand returned NaN or Inf at a quadrature node."""
    def __init__(self, msg, node=None, value=None):
        super(NonFiniteIntegrandError, self).__init__(msg)
        self.node = node
        self.value = value


def isSymmetric(M, rtol=SYMMETRY_RTOL):
    """Return True if M is square and symmetric within rtol (relative to the
    largest entry)."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        return False
    scale = max(np.max(np.abs(M)), 1.0) if M.size else 1.0
    return bool(np.all(np.abs(M - M.T) <= rtol * scale))


def _startVectors(d):
    """Deterministic start vectors: the normalized all-ones vector, then an
    alternating vector with entries +-sqrt(i + 1)."""
    ones = np.ones(d) / math.sqrt(d)
    alternating = np.sqrt(np.arange(1, d + 1, dtype=float))
    alternating[1::2] *= -1.0
    return ones, alternating / np.linalg.norm(alternating)


def _powerIteration(M, v, tol, max_iter, history):
    w = M.dot(v)
    rho = float(v.dot(w))
    if history is not None:
        history.append(rho)

    for it in range(max_iter):
        residual = float(np.linalg.norm(w - rho * v))
        if residual <= tol * abs(rho) or residual == 0.0:
            return rho
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
        w = M.dot(v)
        rhoNew = float(v.dot(w))
        if history is not None:
            history.append(rhoNew)
        if abs(rhoNew - rho) <= _STALL_EPS * abs(rhoNew):
            log.warning("Power iteration stalled after %d iterations at %r "
                        "(residual %.3e).", it + 1, rhoNew, residual)
            return rhoNew
        rho = rhoNew

    errMsg = "Power iteration did not converge after {0} iterations " \
             "(last Rayleigh quotient {1!r}).".format(max_iter, rho)
    log.error(errMsg)
    raise ConvergenceError(errMsg, last=v, residual=rho)


def dominant_eigenvalue(M, tol=1e-10, max_iter=100000, history=None):
    """Return the largest magnitude eigenvalue of the symmetric matrix M.

    Power iteration from the normalized all-ones vector. The iteration stops
    when the residual ||Mv - rho v|| is at most tol * |rho|, or when the
    Rayleigh quotient rho no longer moves (repeated or clustered top
    eigenvalues), in which case the current rho is returned. The all-ones
    vector may be an eigenvector of a smaller eigenvalue, so a second run
    starts from a fixed alternating vector and the larger |rho| is returned.

        Input:
            M       : d x d symmetric matrix
            tol     : relative tolerance, > 0
            max_iter: maximum number of iterations per run
            history : optional list, receives the Rayleigh quotient of
                      every iteration of the run whose value is returned
        Output:
            float, lambda_1(M)
    """
    if tol <= 0:
        raise ValueError("tol must be positive, got {0}.".format(tol))
    M = np.asarray(M, dtype=float)
    if not isSymmetric(M):
        errMsg = "dominant_eigenvalue requires a symmetric matrix."
        log.error(errMsg)
        raise ValueError(errMsg)

    best, bestHistory = None, None
    for v in _startVectors(M.shape[0]):
        runHistory = []
        rho = _powerIteration(M, v, tol, max_iter, runHistory)
        if best is None or abs(rho) > abs(best) * (1.0 + tol):
            best, bestHistory = rho, runHistory
    if history is not None:
        history.extend(bestHistory)
    return best


@functools.lru_cache(maxsize=16)
def _hermeNodes(nodes):
    """Probabilists' Gauss-Hermite nodes and weights normalized to the
    standard normal density."""
    x, w = np.polynomial.hermite_e.hermegauss(nodes)
    return x, w / math.sqrt(2.0 * math.pi)


def gauss_quadrature_expectation(g, mu, sigma, nodes=QUADRATURE_NODES):
    """Return E[g(L)] for L ~ Normal(mu, sigma^2) by Gauss-Hermite quadrature.

    g may be vectorized (array in, array out) or scalar; sigma == 0 returns
    g(mu) exactly.
    """
    if sigma < 0:
        raise ValueError("sigma must be non-negative, got {0}.".format(sigma))
    if nodes < MIN_QUADRATURE_NODES:
        raise ValueError("At least {0} quadrature nodes are required, got "
                         "{1}.".format(MIN_QUADRATURE_NODES, nodes))
    if sigma == 0:
        value = float(g(mu))
        if not math.isfinite(value):
            raise NonFiniteIntegrandError(
                "Integrand is not finite at {0!r}.".format(mu),
                node=mu, value=value)
        return value

    x, w = _hermeNodes(nodes)
    points = mu + sigma * x
    try:
        values = np.asarray(g(points), dtype=float)
    except TypeError:
        values = None
    if values is None or values.shape != points.shape:
        values = np.array([g(p) for p in points], dtype=float)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        i = int(bad[0])
        errMsg = "Integrand is not finite at quadrature node {0} " \
                 "(L = {1!r}): {2!r}.".format(i, points[i], values[i])
        log.error(errMsg)
        raise NonFiniteIntegrandError(errMsg, node=points[i], value=values[i])
    return float(w.dot(values))


def gaussian_abs_deviation(sigma):
    """E|L - mu| for L ~ Normal(mu, sigma^2)."""
    return sigma * math.sqrt(2.0 / math.pi)


def cholesky_solve(A, b):
    """Solve A x = b for a positive definite A.

    Raises NotPositiveDefiniteError on a non-positive pivot.
    """
    try:
        factor = linalg.cho_factor(np.asarray(A, dtype=float), lower=True,
                                   check_finite=True)
    except linalg.LinAlgError as e:
        errMsg = "Matrix is not positive definite: {0}".format(e)
        log.error(errMsg)
        raise NotPositiveDefiniteError(errMsg)
    return linalg.cho_solve(factor, np.asarray(b, dtype=float))


def cholesky_inverse(A):
    """Return the inverse of a positive definite A, symmetrized."""
    inv = cholesky_solve(A, np.eye(np.asarray(A).shape[0]))
    return 0.5 * (inv + inv.T)


def streamKey(name):
    """Map a string (e.g. a policy name) to a stable 32-bit integer key."""
    return zlib.crc32(name.upper().encode("utf-8")) & 0xffffffff


class RngStream(object):
    """Seedable random stream.

    Identical (seed, key) pairs give identical draw sequences across runs and
    platforms (PCG64 seeded through a SeedSequence). A stream has a single
    owner; derive() creates independent child streams for hierarchical
    seeding, e.g. RngStream(master).derive(trial, policyKey).
    """
    def __init__(self, seed, key=()):
        self._seed = int(seed) & 0xffffffffffffffff
        self._key = tuple(int(k) for k in key)
        seq = np.random.SeedSequence(self._seed, spawn_key=self._key)
        self._generator = np.random.Generator(np.random.PCG64(seq))

    @property
    def seed(self):
        """Master seed."""
        return self._seed

    @property
    def key(self):
        """Derivation key of this stream below the master seed."""
        return self._key

    @property
    def generator(self):
        """The underlying numpy Generator."""
        return self._generator

    def derive(self, *keys):
        """Return an independent stream keyed by this stream's key + keys."""
        return RngStream(self._seed, self._key + tuple(keys))

    def normal(self, loc=0.0, scale=1.0, size=None):
        return self._generator.normal(loc, scale, size)

    def standard_normal(self, size=None):
        return self._generator.standard_normal(size)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self._generator.uniform(low, high, size)

    def integers(self, low, high=None, size=None):
        return self._generator.integers(low, high, size)

    def choice(self, a, size=None, replace=True):
        return self._generator.choice(a, size=size, replace=replace)

    def permutation(self, n):
        return self._generator.permutation(n)

    def __repr__(self):
        return "RngStream(seed={0}, key={1})".format(self._seed, self._key)
