"""Benchmark checks of the selection policies on synthetic data sets."""

import shutil
import tempfile
import unittest

import numpy as np

from apmlr.data import Dataset
from apmlr.harness import ExperimentConfig, run_experiment
from apmlr.utils.numkit import RngStream


def _gaussianClasses(n, d, rng, separation=1.0):
    """Balanced classes N(+-separation e / sqrt(d), I) in d dimensions."""
    y = np.where(np.arange(n) % 2, 1, -1)
    shift = separation * np.ones(d) / np.sqrt(d)
    X = rng.standard_normal((n, d)) + y[:, None] * shift
    return Dataset(X, y, name="gaussian{0}".format(d))


def _finalAccuracy(records):
    return np.array([r.accuracy[-1] for r in records])


class Test_benchmark(unittest.TestCase):
    def setUp(self):
        self.outDir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.outDir)

    def test_cross(self):
        """APM_LR escapes the trap that misleads Uncertainty on cross."""
        cfg = ExperimentConfig("synthetic:cross", ["APM_LR", "Uncertainty"],
                               trials=20, horizon=50, seed=1, n=600,
                               out=self.outDir)
        results = run_experiment(cfg)
        apm = _finalAccuracy(results["APM_LR"])
        uncertainty = _finalAccuracy(results["Uncertainty"])
        self.assertGreaterEqual(np.mean(apm >= uncertainty), 0.7)
        self.assertGreater(apm.mean(), uncertainty.mean())

    def test_clouds(self):
        """Informed policies are not worse than Random on clouds."""
        policies = ["APM_LR", "InfoGain", "BALD", "Uncertainty", "Random"]
        cfg = ExperimentConfig("synthetic:clouds", policies, trials=20,
                               horizon=40, seed=2, n=600, out=self.outDir)
        results = run_experiment(cfg)
        random = _finalAccuracy(results["Random"]).mean()
        for kind in policies[:-1]:
            self.assertGreaterEqual(_finalAccuracy(results[kind]).mean(),
                                    random - 0.02, kind)

    def test_selection_cost(self):
        """Median cumulative selection times order InfoGain > BALD,
        InfoGain > 5 APM_LR and APM_LR > Uncertainty > Random."""
        ds = _gaussianClasses(1600, 16, RngStream(3))
        policies = ["InfoGain", "BALD", "APM_LR", "Uncertainty", "Random"]
        cfg = ExperimentConfig("gaussian16", policies, trials=10, horizon=40,
                               seed=3, samples=100, out=self.outDir)
        results = run_experiment(cfg, ds)
        median = dict((kind, np.median([np.sum(r.tSelect)
                                        for r in results[kind]]))
                      for kind in policies)
        self.assertGreater(median["InfoGain"], median["BALD"])
        self.assertGreater(median["InfoGain"], 5.0 * median["APM_LR"])
        self.assertGreater(median["APM_LR"], median["Uncertainty"])
        self.assertGreater(median["Uncertainty"], median["Random"])


if __name__ == "__main__":
    unittest.main()
