"""Test apmlr/selection"""

import math
import unittest

import numpy as np

from apmlr.data import Dataset, LabeledSet
from apmlr.logreg import MapModel
from apmlr.posterior import GaussianPosterior, variational_em
from apmlr.selection import (POLICY_KINDS, PolicySpec, SelectionContext,
                             createPolicy, exploit_metric, select)
from apmlr.selection.apm import (APM, apm_score, apm_score_from_moments,
                                 power_constraint)
from apmlr.selection.bayesian import (BALD_D, PROBIT_K, InfoGain,
                                      bald_infogain_rank_agreement,
                                      bald_score, infogain_scores,
                                      posterior_samples)
from apmlr.selection.policy import argbest, canonicalKind
from apmlr.utils.numkit import RngStream

# B with B^2 lambda_1(diag(2, 1)) = pi, so that sqrt(2P/pi) = sqrt(2).
B_PI = math.sqrt(math.pi / 2.0)


def _context(rows, mu, sigma, theta=None, available=None, B=B_PI):
    pool = Dataset(rows, np.ones(len(rows), dtype=int),
                   checkBothLabels=False)
    theta = np.zeros(pool.d) if theta is None else theta
    if available is None:
        available = np.arange(pool.n)
    return SelectionContext(pool, available, GaussianPosterior(mu, sigma),
                            MapModel(theta, 0.01, 0.0), B)


class Test_power_constraint(unittest.TestCase):
    def test_examples(self):
        """Test power_constraint()."""
        self.assertAlmostEqual(
            power_constraint(GaussianPosterior(np.zeros(2), np.eye(2)), 2.0),
            4.0, places=10)
        self.assertAlmostEqual(
            power_constraint(GaussianPosterior(np.zeros(2),
                                               np.diag([3.0, 1.0])), 1.0),
            3.0, places=6)
        self.assertAlmostEqual(
            power_constraint(GaussianPosterior.prior(0.01, 4), 1.0),
            100.0, places=8)

    def test_second_moment(self):
        """second-moment mode uses Sigma + mu mu^T."""
        post = GaussianPosterior([1.0, 0.0], np.eye(2))
        self.assertAlmostEqual(power_constraint(post, 1.0), 1.0, places=10)
        self.assertAlmostEqual(power_constraint(post, 1.0, "second-moment"),
                               2.0, places=6)

    def test_ones_orthogonal_covariance(self):
        """Two seeds along (1, 1) leave the prior variance 1/lam along
        (1, -1), which the all-ones start vector cannot see."""
        L = LabeledSet([[1.0, 1.0], [-1.0, -1.0]], [1, -1])
        post = variational_em(L, 0.01)
        self.assertAlmostEqual(power_constraint(post, 1.0), 100.0, places=6)

    def test_invalid(self):
        post = GaussianPosterior(np.zeros(2), np.eye(2))
        with self.assertRaises(ValueError):
            power_constraint(post, 0.0)
        with self.assertRaises(ValueError):
            power_constraint(post, 1.0, "variance")


class Test_apm_score(unittest.TestCase):
    def setUp(self):
        self.post = GaussianPosterior(np.zeros(2), np.diag([2.0, 1.0]))

    def test_examples(self):
        """Test apm_score()."""
        self.assertAlmostEqual(apm_score([1.0, 0.0], self.post, math.pi),
                               0.0, places=12)
        self.assertAlmostEqual(apm_score([0.0, 1.0], self.post, math.pi),
                               (1.0 - math.sqrt(2.0)) ** 2, places=12)
        self.assertAlmostEqual(apm_score([0.0, 1.0], self.post, math.pi),
                               0.17157, places=5)
        self.assertAlmostEqual(apm_score([0.0, 0.0], self.post, 3.0),
                               2.0 / math.pi * 3.0, places=12)

    def test_vectorized(self):
        scores = apm_score_from_moments([0.0, 1.0], [2.0, 0.0], math.pi)
        np.testing.assert_allclose(scores, [0.0, 1.0 + 2.0], atol=1e-12)

    def test_even(self):
        """apm_score(x) == apm_score(-x)."""
        rng = np.random.RandomState(12)
        A = rng.randn(3, 3)
        post = GaussianPosterior(rng.randn(3), A.dot(A.T) + np.eye(3))
        for _ in range(20):
            x = rng.randn(3)
            P = 10 ** rng.uniform(-1, 2)
            self.assertAlmostEqual(apm_score(x, post, P),
                                   apm_score(-x, post, P), places=12)

    def test_nonpositive_power(self):
        with self.assertRaises(ValueError):
            apm_score([1.0, 0.0], self.post, 0.0)


class Test_policies(unittest.TestCase):
    def test_apm(self):
        """APM_LR prefers the example with score 0 over 0.17157."""
        ctx = _context([[1.0, 0.0], [0.0, 1.0]], np.zeros(2),
                       np.diag([2.0, 1.0]))
        policy = createPolicy(PolicySpec("APM_LR"))
        self.assertEqual(policy.select(ctx), 0)
        self.assertAlmostEqual(policy.lastPower, math.pi, places=6)
        self.assertEqual(policy.name, "APM_LR")

    def test_apm_ablations(self):
        """APM_LR_U keeps the mean term and APM_LR_V the variance term."""
        ctx = _context([[1.0, 0.0], [0.0, 1.0]], [1.0, 0.0],
                       np.diag([2.0, 1.0]))
        self.assertEqual(select(ctx, PolicySpec("APM_LR_U")), 1)
        self.assertEqual(select(ctx, PolicySpec("APM_LR_V")), 0)
        np.testing.assert_allclose(
            createPolicy(PolicySpec("APM_LR_U")).scores(ctx), [1.0, 0.0])
        # P = pi/2 lambda_1(diag(2, 1)) = pi.
        np.testing.assert_allclose(
            createPolicy(PolicySpec("APM_LR_V")).scores(ctx),
            [0.0, (1.0 - math.sqrt(2.0)) ** 2], atol=1e-6)

    def test_uncertainty(self):
        """Uncertainty picks the smallest |x^T theta_hat|."""
        ctx = _context([[0.1, 5.0], [2.0, 0.0]], np.zeros(2), np.eye(2),
                       theta=np.array([1.0, 0.0]))
        self.assertEqual(select(ctx, PolicySpec("Uncertainty")), 0)

    def test_uncertainty_absolute_value(self):
        """A large negative margin is not close to the hyperplane."""
        ctx = _context([[-3.0, 0.0], [0.5, 0.0]], np.zeros(2), np.eye(2),
                       theta=np.array([1.0, 0.0]))
        self.assertEqual(select(ctx, PolicySpec("Uncertainty")), 1)

    def test_uncertainty_matches_apm_u(self):
        """With mu proportional to theta_hat, APM_LR_U and Uncertainty
        pick the same example."""
        rng = np.random.RandomState(7)
        for _ in range(10):
            rows = rng.randn(12, 3)
            theta = rng.randn(3)
            ctx = _context(rows, 2.5 * theta, np.eye(3), theta=theta)
            self.assertEqual(select(ctx, PolicySpec("Uncertainty")),
                             select(ctx, PolicySpec("APM_LR_U")))

    def test_maxvar(self):
        ctx = _context([[0.0, 1.0], [1.0, 0.0]], np.zeros(2),
                       np.diag([2.0, 1.0]))
        self.assertEqual(select(ctx, PolicySpec("MaxVar")), 1)

    def test_random(self):
        """Random draws from the available indices, reproducibly."""
        rows = np.eye(5)
        ctx = _context(rows, np.zeros(5), np.eye(5), available=[4, 1, 3])
        picks = [select(ctx, PolicySpec("Random", rng=RngStream(3)))
                 for _ in range(2)]
        self.assertEqual(picks[0], picks[1])
        policy = createPolicy(PolicySpec("Random", rng=RngStream(4)))
        drawn = set(policy.select(ctx) for _ in range(50))
        self.assertEqual(drawn, set([1, 3, 4]))
        with self.assertRaises(ValueError):
            select(ctx, PolicySpec("Random"))

    def test_infogain_point_mass(self):
        """A point-mass posterior scores every example 0 and the lowest
        available index wins."""
        rng = np.random.RandomState(8)
        ctx = _context(rng.randn(4, 2), [1.0, -0.5], np.zeros((2, 2)),
                       available=[3, 1, 2])
        policy = createPolicy(PolicySpec("InfoGain", s=50,
                                         rng=RngStream(5)))
        np.testing.assert_allclose(policy.scores(ctx), 0.0, atol=1e-12)
        self.assertEqual(policy.select(ctx), 1)
        self.assertEqual(policy.lastSamples.shape, (50, 2))

    def test_infogain_prefers_uncertain(self):
        """InfoGain prefers the direction of larger posterior variance."""
        ctx = _context([[1.0, 0.0], [0.0, 1.0]], np.zeros(2),
                       np.diag([0.01, 25.0]))
        self.assertEqual(
            select(ctx, PolicySpec("InfoGain", s=200, rng=RngStream(6))), 1)
        with self.assertRaises(ValueError):
            select(ctx, PolicySpec("InfoGain"))

    def test_bald(self):
        ctx = _context([[1.0, 0.0], [0.0, 1.0]], np.zeros(2),
                       np.diag([0.01, 25.0]))
        self.assertEqual(select(ctx, PolicySpec("BALD")), 1)

    def test_every_kind(self):
        """Every kind is created, named after itself and selects an
        available index."""
        rng = np.random.RandomState(9)
        rows = rng.randn(10, 3)
        ctx = _context(rows, rng.randn(3), np.eye(3), theta=rng.randn(3),
                       available=[2, 5, 7], B=4.0)
        for kind in POLICY_KINDS:
            policy = createPolicy(PolicySpec(kind, s=20, rng=RngStream(1)))
            self.assertEqual(policy.name, kind)
            self.assertIn(policy.select(ctx), (2, 5, 7))


class Test_bald_score(unittest.TestCase):
    def test_examples(self):
        """Test bald_score()."""
        self.assertAlmostEqual(bald_score(0.0, 0.0), 0.0, places=12)
        for var in (0.1, 1.0, 10.0):
            self.assertAlmostEqual(
                bald_score(0.0, var),
                1.0 - BALD_D / math.sqrt(PROBIT_K ** 2 * var + BALD_D ** 2),
                places=12)
            self.assertGreater(bald_score(0.0, var), 0.0)

    def test_vectorized(self):
        scores = bald_score([0.0, 1.0], [1.0, 1.0])
        self.assertEqual(scores.shape, (2,))
        self.assertAlmostEqual(scores[1], bald_score(1.0, 1.0), places=14)

    def test_negative_variance(self):
        with self.assertRaises(ValueError):
            bald_score(0.0, -1.0)


class Test_infogain_helpers(unittest.TestCase):
    def test_posterior_samples(self):
        """Samples have the posterior mean and covariance."""
        post = GaussianPosterior([1.0, -2.0], [[2.0, 0.5], [0.5, 1.0]])
        thetas = posterior_samples(post, 20000, RngStream(2))
        np.testing.assert_allclose(thetas.mean(axis=0), post.mu, atol=0.05)
        np.testing.assert_allclose(np.cov(thetas.T), post.sigma, atol=0.1)

    def test_nonnegative(self):
        """Information gain estimates are non-negative."""
        rng = np.random.RandomState(10)
        scores = infogain_scores(rng.randn(30, 3), rng.randn(40, 3) * 2.0)
        self.assertTrue(np.all(scores >= -1e-12))

    def test_sample_reuse(self):
        """Scores are reproduced from the samples kept in lastSamples."""
        rng = np.random.RandomState(13)
        ctx = _context(rng.randn(8, 3), rng.randn(3), np.diag([1.0, 2.0, 0.5]))
        policy = createPolicy(PolicySpec("InfoGain", s=40, rng=RngStream(9)))
        scores = policy.scores(ctx)
        np.testing.assert_allclose(
            infogain_scores(ctx.candidates, policy.lastSamples), scores,
            rtol=0, atol=1e-12)

    def test_rank_agreement(self):
        post = GaussianPosterior([0.5, -0.5], np.diag([2.0, 0.5]))
        rho = bald_infogain_rank_agreement(
            post, np.random.RandomState(11).randn(30, 2), 500, RngStream(3))
        self.assertTrue(-1.0 <= rho <= 1.0)


class Test_policy_helpers(unittest.TestCase):
    def test_canonicalKind(self):
        """Test canonicalKind()."""
        self.assertEqual(canonicalKind("apm-lr"), "APM_LR")
        self.assertEqual(canonicalKind("infogain"), "InfoGain")
        self.assertEqual(canonicalKind(" apm_lr_v "), "APM_LR_V")
        with self.assertRaises(ValueError):
            canonicalKind("QBC")

    def test_PolicySpec(self):
        spec = PolicySpec("bald", s=5)
        self.assertEqual(spec.kind, "BALD")
        rng = RngStream(1)
        self.assertIs(spec.withRng(rng).rng, rng)
        self.assertEqual(spec.withRng(rng).s, 5)
        with self.assertRaises(ValueError):
            PolicySpec("InfoGain", s=0)
        with self.assertRaises(ValueError):
            PolicySpec("APM_LR", powerMode="trace")

    def test_argbest(self):
        """Ties go to the first position."""
        self.assertEqual(argbest([3.0, 1.0, 1.0], -1), 1)
        self.assertEqual(argbest([3.0, 1.0, 3.0], 1), 0)
        self.assertEqual(argbest([1.0, 1.0 + 1e-13], 1, atol=1e-12), 0)

    def test_context(self):
        """SelectionContext keeps the available indices sorted."""
        ctx = _context(np.eye(4), np.zeros(4), np.eye(4),
                       available=[3, 0, 2])
        np.testing.assert_array_equal(ctx.available, [0, 2, 3])
        np.testing.assert_array_equal(ctx.candidates, np.eye(4)[[0, 2, 3]])
        with self.assertRaises(ValueError):
            _context(np.eye(2), np.zeros(2), np.eye(2), available=[])

    def test_exploit_metric(self):
        """Test exploit_metric()."""
        self.assertEqual(exploit_metric([0.0, 1.0], [2.0, 0.0]), 0.0)
        self.assertEqual(exploit_metric([3.0, 7.0], [2.0, 0.0]), 3.0)
        with self.assertRaises(ValueError):
            exploit_metric([3.0, 7.0], [0.0, 0.0])

    def test_virtual_policy(self):
        """The APM class reports its kind; the virtual base does not."""
        from apmlr.selection.policy import SelectionPolicy
        with self.assertRaises(NotImplementedError):
            SelectionPolicy(PolicySpec("APM_LR")).name
        self.assertEqual(APM(PolicySpec("APM_LR")).scoreSign, -1)
        self.assertEqual(InfoGain(PolicySpec("InfoGain")).scoreSign, 1)


if __name__ == "__main__":
    unittest.main()
