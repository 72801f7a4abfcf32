"""This script defines GaussianPosterior and variational_em, the Gaussian
approximation N(mu, Sigma) of the hyperplane posterior p(theta | L) obtained
from the quadratic variational lower bound of the logistic likelihood.

With g(xi) = tanh(xi / 2) / (4 xi) the coordinate ascent repeats

    Sigma^-1 <- lam I + 2 sum_i g(xi_i) x_i x_i^T
    mu       <- Sigma (1/2 sum_i y_i x_i)
    xi_i     <- sqrt(x_i^T (Sigma + mu mu^T) x_i)

until the largest relative change of xi falls below tol.
"""

import logging

import numpy as np
from scipy.special import logsumexp

from apmlr.logreg import DEFAULT_LAMBDA, fit_map
from apmlr.utils.numkit import (ConvergenceError, cholesky_inverse,
                                cholesky_solve)

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 500

XI_INIT = 1.0

# Below this xi the series 1/8 - xi^2/96 replaces tanh(xi/2)/(4 xi).
_XI_SERIES = 1e-4

GRID_POINTS = 200001
GRID_HALF_WIDTH_SD = 40.0


class GaussianPosterior(object):
    """N(mu, sigma) approximation of the hyperplane posterior.

        mu        : mean, shape (d,)
        sigma     : covariance, shape (d, d), positive definite
        xi        : variational parameter per labeled example
        iterations: number of sweeps used to reach the fixed point
    """
    def __init__(self, mu, sigma, xi=None, iterations=0):
        self.mu = np.asarray(mu, dtype=float)
        sigma = np.asarray(sigma, dtype=float)
        self.sigma = 0.5 * (sigma + sigma.T)
        self.xi = np.zeros(0) if xi is None else np.asarray(xi, dtype=float)
        self.iterations = iterations

    @classmethod
    def prior(cls, lam, d):
        """N(0, (1/lam) I)."""
        if not lam > 0:
            raise ValueError("lambda must be positive, got {0}.".format(lam))
        return cls(np.zeros(d), np.eye(d) / float(lam))

    @property
    def d(self):
        return self.mu.shape[0]

    def secondMoment(self):
        """E[theta theta^T] = Sigma + mu mu^T."""
        return self.sigma + np.outer(self.mu, self.mu)

    def __repr__(self):
        return "GaussianPosterior(mu={0}, iterations={1})".format(
            self.mu, self.iterations)


def jj_weight(xi):
    """g(xi) = tanh(xi / 2) / (4 xi), with the limit 1/8 at xi = 0."""
    xi = np.abs(np.asarray(xi, dtype=float))
    small = xi < _XI_SERIES
    safe = np.where(small, 1.0, xi)
    return np.where(small, 0.125 - xi * xi / 96.0,
                    np.tanh(0.5 * safe) / (4.0 * safe))


def _moments(X, y, lam, xi):
    """Return (mu, sigma) for fixed variational parameters xi."""
    d = X.shape[1]
    precision = lam * np.eye(d) + 2.0 * (X.T * jj_weight(xi)).dot(X)
    precision = 0.5 * (precision + precision.T)
    rhs = 0.5 * X.T.dot(y)
    return cholesky_solve(precision, rhs), cholesky_inverse(precision)


def _updateXi(X, mu, sigma):
    second = sigma + np.outer(mu, mu)
    q = np.einsum("ij,jk,ik->i", X, second, X)
    return np.sqrt(np.maximum(q, 0.0))


def _relativeChange(old, new):
    denom = np.maximum(np.abs(old), np.finfo(float).tiny)
    diff = np.abs(new - old)
    return float(np.max(np.where(diff == 0, 0.0, diff / denom)))


def sweep(post, L, lam):
    """One full coordinate-ascent sweep from the variational parameters of
    post. Return (new posterior, largest relative change of xi)."""
    X, y = L.X, L.y.astype(float)
    mu, sigma = _moments(X, y, lam, post.xi)
    xi = _updateXi(X, mu, sigma)
    return (GaussianPosterior(mu, sigma, xi, post.iterations + 1),
            _relativeChange(post.xi, xi))


def variational_em(L, lam=DEFAULT_LAMBDA, d=None, tol=DEFAULT_TOL,
                   max_iter=DEFAULT_MAX_ITER, xi0=None):
    """Return the GaussianPosterior of the labeled set L.

        Input:
            L       : LabeledSet
            lam     : prior precision, > 0
            d       : dimension, defaults to L.d
            tol     : stop when max_i |dxi_i| / |xi_i| < tol
            max_iter: maximum number of sweeps
            xi0     : starting variational parameters, one per example of
                      L; every xi starts at 1 when omitted
        Output:
            GaussianPosterior whose (mu, sigma) are computed from its xi.
    """
    if not lam > 0:
        raise ValueError("lambda must be positive, got {0}.".format(lam))
    d = L.d if d is None else d
    if len(L) == 0:
        return GaussianPosterior.prior(lam, d)

    X, y = L.X.reshape(-1, d), L.y.astype(float)
    if xi0 is None:
        xi = np.full(X.shape[0], XI_INIT)
    else:
        xi = np.array(xi0, dtype=float).ravel()
        if xi.shape[0] != X.shape[0] or not np.all(np.isfinite(xi)):
            errMsg = "xi0 needs {0} finite values, got {1!r}.".format(
                X.shape[0], xi0)
            log.error(errMsg)
            raise ValueError(errMsg)
        xi = np.abs(xi)
    change = np.inf
    for it in range(1, max_iter + 1):
        mu, sigma = _moments(X, y, lam, xi)
        xiNew = _updateXi(X, mu, sigma)
        change = _relativeChange(xi, xiNew)
        xi = xiNew
        if change < tol:
            mu, sigma = _moments(X, y, lam, xi)
            log.debug("VariationalEM converged after %d sweeps (change "
                      "%.2e).", it, change)
            return GaussianPosterior(mu, sigma, xi, it)

    errMsg = "VariationalEM did not converge in {0} sweeps (last relative " \
             "change {1:.3e}).".format(max_iter, change)
    log.error(errMsg)
    raise ConvergenceError(errMsg, last=xi, residual=change)


def channel_input_distribution(post, x):
    """Distribution N(mean, var) of the channel input L = theta^T x."""
    x = np.asarray(x, dtype=float)
    mean = float(post.mu.dot(x))
    var = float(x.dot(post.sigma).dot(x))
    return mean, max(var, 0.0)


def channel_moments(post, X):
    """Vectorized channel_input_distribution over the rows of X."""
    X = np.asarray(X, dtype=float)
    means = X.dot(post.mu)
    variances = np.einsum("ij,jk,ik->i", X, post.sigma, X)
    return means, np.maximum(variances, 0.0)


def posterior_mean_grid(L, lam=DEFAULT_LAMBDA, points=GRID_POINTS):
    """Exact posterior mean of a 1-D homogeneous logistic model, integrated
    on a dense uniform grid.

    The density is proportional to exp(-lam theta^2 / 2) prod_i f(y_i x_i
    theta).
    """
    if L.d != 1:
        raise ValueError("posterior_mean_grid needs 1-D examples, got "
                         "d = {0}.".format(L.d))
    x, y = L.X[:, 0], L.y.astype(float)
    center = fit_map(L, lam, d=1).theta[0]
    halfWidth = GRID_HALF_WIDTH_SD / np.sqrt(lam)
    theta = np.linspace(center - halfWidth, center + halfWidth, points)
    logDensity = -0.5 * lam * theta ** 2 - np.sum(
        np.logaddexp(0.0, -np.outer(theta, y * x)), axis=1)
    weights = np.exp(logDensity - logsumexp(logDensity))
    return float(weights.dot(theta))


def direction_agreement(L, lam=DEFAULT_LAMBDA, d=None):
    """Cosine between the variational mean and the MAP estimate of L.

    NaN when either vector is zero.
    """
    mu = variational_em(L, lam, d).mu
    theta = fit_map(L, lam, d).theta
    norm = np.linalg.norm(mu) * np.linalg.norm(theta)
    if norm == 0:
        return float("nan")
    cosine = float(mu.dot(theta) / norm)
    log.info("Variational mean and MAP estimate agree with cosine %.4f.",
             cosine)
    return cosine
