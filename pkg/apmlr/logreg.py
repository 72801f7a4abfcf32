"""This script defines MAP estimation for homogeneous binary logistic
regression, the learning algorithm that decodes a labeled set into a
hyperplane estimate, plus prediction and accuracy."""

import logging

import numpy as np
from scipy.special import expit

from apmlr.utils.numkit import ConvergenceError, cholesky_solve

log = logging.getLogger(__name__)

DEFAULT_LAMBDA = 0.01

GRAD_TOL = 1e-6
MAX_NEWTON_ITER = 100
ARMIJO_C = 1e-4
ARMIJO_FACTOR = 0.5
MIN_STEP = 1e-20
ROUNDING_SLACK = 8 * np.finfo(float).eps


def predict_proba(theta, x):
    """p(Y = +1 | x, theta) = f(x^T theta) with the logistic f.

    x may be a single example or a matrix of examples as rows.
    """
    return expit(np.dot(x, theta))


def objective(theta, X, y, lam):
    """Regularized negative log-likelihood
    lam/2 ||theta||^2 + sum_i ln(1 + exp(-y_i x_i^T theta))."""
    margins = y * X.dot(theta)
    return 0.5 * lam * theta.dot(theta) + np.sum(np.logaddexp(0.0, -margins))


def gradient(theta, X, y, lam):
    """Gradient lam theta - sum_i y_i x_i f(-y_i x_i^T theta)."""
    margins = y * X.dot(theta)
    return lam * theta - X.T.dot(y * expit(-margins))


def hessian(theta, X, lam):
    """Hessian lam I + sum_i f(m_i)(1 - f(m_i)) x_i x_i^T."""
    p = expit(X.dot(theta))
    return lam * np.eye(theta.shape[0]) + (X.T * (p * (1.0 - p))).dot(X)


class MapModel(object):
    """MAP hyperplane estimate.

        theta     : hyperplane weights
        lam       : prior precision
        gradNorm  : gradient 2-norm at theta
        iterations: Newton iterations used
        objectives: objective value after every iteration (first entry at
                    theta = 0)
    """
    def __init__(self, theta, lam, gradNorm, iterations=0, objectives=()):
        self.theta = np.asarray(theta, dtype=float)
        self.lam = float(lam)
        self.gradNorm = float(gradNorm)
        self.iterations = iterations
        self.objectives = list(objectives)

    def predict(self, X):
        """Labels in {-1, +1}; a zero margin predicts +1."""
        return np.where(np.dot(X, self.theta) >= 0, 1, -1)

    def __repr__(self):
        return "MapModel(theta={0}, lam={1}, gradNorm={2:.2e})".format(
            self.theta, self.lam, self.gradNorm)


def fit_map(L, lam=DEFAULT_LAMBDA, d=None, gradTol=GRAD_TOL,
            maxIter=MAX_NEWTON_ITER):
    """Minimize the MAP objective by Newton's method with Armijo
    backtracking, starting from theta = 0.

        Input:
            L      : LabeledSet (may be empty)
            lam    : prior precision, > 0
            d      : dimension, defaults to L.d
        Output:
            MapModel
    """
    if not lam > 0:
        raise ValueError("lambda must be positive, got {0}.".format(lam))
    d = L.d if d is None else d
    X, y = L.X.reshape(-1, d), L.y.astype(float)
    theta = np.zeros(d)
    if len(y) == 0:
        return MapModel(theta, lam, 0.0, 0, [0.0])

    f = objective(theta, X, y, lam)
    objectives = [f]
    g = gradient(theta, X, y, lam)
    gradNorm = np.linalg.norm(g)
    it = 0
    while gradNorm > gradTol:
        if it >= maxIter:
            errMsg = "Newton's method did not converge in {0} iterations " \
                     "(gradient norm {1:.3e}).".format(maxIter, gradNorm)
            log.error(errMsg)
            raise ConvergenceError(errMsg, last=theta, residual=gradNorm)
        direction = -cholesky_solve(hessian(theta, X, lam), g)
        slope = g.dot(direction)
        step = 1.0
        while True:
            candidate = theta + step * direction
            fNew = objective(candidate, X, y, lam)
            bound = f + ARMIJO_C * step * slope
            if step == 1.0:
                # Near the optimum the decrease drops below rounding of f.
                bound += ROUNDING_SLACK * abs(f)
            if fNew <= bound:
                break
            step *= ARMIJO_FACTOR
            if step < MIN_STEP:
                break
        it += 1
        if step < MIN_STEP:
            errMsg = "Newton's line search stalled (gradient norm " \
                     "{0:.3e}).".format(gradNorm)
            log.error(errMsg)
            raise ConvergenceError(errMsg, last=theta, residual=gradNorm)
        theta, f = candidate, fNew
        objectives.append(f)
        g = gradient(theta, X, y, lam)
        gradNorm = np.linalg.norm(g)

    return MapModel(theta, lam, gradNorm, it, objectives)


def accuracy(theta, ds):
    """Fraction of rows of ds with sign(x^T theta) == y, sign(0) = +1."""
    predicted = np.where(ds.X.dot(theta) >= 0, 1, -1)
    return float(np.mean(predicted == ds.y))
