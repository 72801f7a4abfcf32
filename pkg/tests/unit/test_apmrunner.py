"""Test apmlr/apmrunner.py"""

import json
import shutil
import tempfile
import unittest
from os import path

import numpy as np
import pandas as pd

from apmlr.apmrunner import ApmRunner, main
from apmlr.harness import AGGREGATE_FILE, ExperimentConfig, trialCsvPath

from test_setpath import DATA_DIR


class Test_ApmRunner(unittest.TestCase):
    def setUp(self):
        self.outDir = tempfile.mkdtemp()
        self.configFile = path.join(DATA_DIR, "run.config")

    def tearDown(self):
        shutil.rmtree(self.outDir)

    def test_run(self):
        """Test ApmRunner.run() on a small synthetic benchmark."""
        argumentList = ['run', '--dataset', 'synthetic:clouds', '--n', '40',
                        '--policies', 'APM_LR,Random', '--trials', '2',
                        '--horizon', '3', '--out', self.outDir]
        obj = ApmRunner(argumentList=argumentList)
        self.assertEqual(obj.run(), 0)
        with open(path.join(self.outDir, AGGREGATE_FILE)) as f:
            summary = json.load(f)
        self.assertEqual(sorted(summary["policies"]), ["APM_LR", "Random"])
        self.assertEqual(summary["config"]["trials"], 2)

    def test_run_with_config(self):
        """Command-line values override the config file."""
        argumentList = ['run', '--dataset', 'synthetic:horseshoe',
                        '--n', '60', '--configFile', self.configFile,
                        '--horizon', '2', '--out', self.outDir]
        obj = ApmRunner(argumentList=argumentList)
        self.assertEqual(obj.args.trials, 3)
        self.assertEqual(obj.args.horizon, 2)
        self.assertEqual(obj.args.lam, 0.5)
        self.assertEqual(obj.args.seed, 11)
        self.assertEqual(obj.run(), 0)
        for policy in ("APM_LR", "Random"):
            for t in range(3):
                self.assertTrue(path.exists(
                    trialCsvPath(self.outDir, policy, t)))

    def test_makeSane(self):
        """Missing or unusable inputs are rejected before running."""
        for argumentList in (['run', '--out', self.outDir],
                             ['run', '--dataset', 'synthetic:clouds'],
                             ['run', '--dataset', 'synthetic:spiral',
                              '--out', self.outDir],
                             ['run', '--dataset', 'synthetic:clouds',
                              '--n', '41', '--out', self.outDir]):
            obj = ApmRunner(argumentList=argumentList)
            with self.assertRaises(ValueError):
                obj.run()

        obj = ApmRunner(argumentList=['run', '--dataset',
                                      path.join(DATA_DIR, "nothing.csv"),
                                      '--out', self.outDir])
        with self.assertRaises(IOError):
            obj.run()

    def test_datasets_gen(self):
        """apm datasets gen writes the data set apm run generates."""
        fn = path.join(self.outDir, "cross.csv")
        obj = ApmRunner(argumentList=['datasets', 'gen', 'cross', '--n', '40',
                                      '--out', fn, '--seed', '3'])
        self.assertEqual(obj.run(), 0)
        frame = pd.read_csv(fn)
        self.assertEqual(list(frame.columns), ["x1", "x2", "label"])
        ds = ExperimentConfig("synthetic:cross", ["Random"], n=40,
                              seed=3).loadDataset()
        np.testing.assert_allclose(frame[["x1", "x2"]].values, ds.X,
                                   rtol=1e-12)
        np.testing.assert_array_equal(frame["label"].values, ds.y)

    def test_verify(self):
        """apm verify reports no violations."""
        fn = path.join(self.outDir, "verify.json")
        obj = ApmRunner(argumentList=['verify', '--P', '1,4', '--trials',
                                      '20', '--grids', '10', '--out', fn])
        self.assertEqual(obj.run(), 0)
        with open(fn) as f:
            report = json.load(f)
        self.assertEqual(report["violations"], 0)
        self.assertEqual([r["P"] for r in report["continuity"]], [1.0, 4.0])
        self.assertEqual(report["symmetrization"]["grids"], 10)

    def test_main(self):
        """main() returns the exit code of the subcommand."""
        fn = path.join(self.outDir, "verify.json")
        rcode = main(['apm', 'verify', '--P', '0.5', '--trials', '5',
                      '--grids', '2', '--out', fn])
        self.assertEqual(rcode, 0)
        self.assertTrue(path.exists(fn))

    def test_getVersion(self):
        obj = ApmRunner(argumentList=['verify'])
        self.assertEqual(obj.getVersion(), "0.3.0")


if __name__ == "__main__":
    unittest.main()
