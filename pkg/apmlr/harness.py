"""This script defines the active learning loop and the benchmark harness.

run_trial runs one policy on one split from its two seed examples for a
horizon of N queries; run_experiment synchronizes trials across policies
(every policy sees the same split and seed examples for a given trial),
writes one CSV per trial and policy and an aggregate JSON.
"""

import json
import logging
import math
import os.path as op
import time
from multiprocessing import Pool

import numpy as np
import pandas as pd
from scipy.spatial.distance import cdist
from scipy.special import expit

from apmlr.__init__ import get_version
from apmlr.data import (LabeledSet, generate_synthetic, load_csv,
                        pick_seeds, split_and_normalize)
from apmlr.logreg import DEFAULT_LAMBDA, accuracy, fit_map
from apmlr.posterior import DEFAULT_TOL, XI_INIT, variational_em
from apmlr.selection import (PolicySpec, SelectionContext, createPolicy,
                             exploit_metric)
from apmlr.selection.policy import DEFAULT_SAMPLES, POWER_MODES, canonicalKind
from apmlr.utils.fileutil import checkOutputDir, checkOutputFile
from apmlr.utils.numkit import RngStream, streamKey

log = logging.getLogger(__name__)

# The first candidate 'pool' is the default.
ORACLE_CANDIDATES = ("pool", "logistic")

# VariationalEM sweeps per query.
VEM_MAX_ITER = 2000

SYNTHETIC_PREFIX = "synthetic:"

CSV_COLUMNS = ("iteration", "selected_index", "test_accuracy", "t_select_s",
               "t_vem_s", "t_retrain_s", "exploit_dist", "maximin",
               "gram_logdet")

AGGREGATE_FILE = "aggregate.json"


class PoolExhaustedError(RuntimeError):
    """The pool ran out of unlabeled examples before the horizon."""
    pass


class ExperimentConfig(object):
    """Inputs of a benchmark run.

        dataset      : CSV path, or 'synthetic:<name>'
        policies     : policy kinds
        trials       : number of synchronized trials, >= 1
        horizon      : queries per trial N, >= 1
        lam          : prior precision
        seed         : master seed
        out          : output directory
    """
    def __init__(self, dataset, policies, trials=10, horizon=40,
                 lam=DEFAULT_LAMBDA, seed=1, out=None, labelColumn="label",
                 negativeLabel=None, n=600, samples=DEFAULT_SAMPLES,
                 powerMode=POWER_MODES[0], oracle=ORACLE_CANDIDATES[0],
                 vemTol=DEFAULT_TOL, vemMaxIter=VEM_MAX_ITER, nproc=1):
        errMsg = ""
        if not policies:
            errMsg = "At least one selection policy is required."
        elif int(trials) < 1:
            errMsg = "trials must be >= 1, got {0}.".format(trials)
        elif int(horizon) < 1:
            errMsg = "horizon must be >= 1, got {0}.".format(horizon)
        elif not float(lam) > 0:
            errMsg = "lambda must be positive, got {0}.".format(lam)
        elif oracle not in ORACLE_CANDIDATES:
            errMsg = "Unknown oracle {0!r}; choose from {1}.".format(
                oracle, ORACLE_CANDIDATES)
        if errMsg:
            log.error(errMsg)
            raise ValueError(errMsg)

        kinds = []
        for kind in policies:
            kind = canonicalKind(kind)
            if kind not in kinds:
                kinds.append(kind)
        self.dataset = dataset
        self.policies = kinds
        self.trials = int(trials)
        self.horizon = int(horizon)
        self.lam = float(lam)
        self.seed = int(seed)
        self.out = out
        self.labelColumn = labelColumn
        self.negativeLabel = negativeLabel
        self.n = int(n)
        self.samples = int(samples)
        self.powerMode = powerMode
        self.oracle = oracle
        self.vemTol = float(vemTol)
        self.vemMaxIter = int(vemMaxIter)
        self.nproc = max(int(nproc), 1)

    @classmethod
    def fromArgs(cls, args):
        """Build a config from parsed `apm run` options."""
        policies = args.policies
        if isinstance(policies, str):
            policies = [p for p in policies.split(",") if p.strip()]
        return cls(dataset=args.dataset, policies=policies,
                   trials=args.trials, horizon=args.horizon, lam=args.lam,
                   seed=args.seed, out=args.out, labelColumn=args.labelCol,
                   negativeLabel=args.negativeLabel, n=args.n,
                   samples=args.samples, powerMode=args.powerMode,
                   oracle=args.oracle, vemTol=args.vemTol,
                   vemMaxIter=args.vemMaxIter, nproc=args.nproc)

    @property
    def syntheticName(self):
        """Synthetic data set name, or None for a CSV data set."""
        if str(self.dataset).startswith(SYNTHETIC_PREFIX):
            return self.dataset[len(SYNTHETIC_PREFIX):]
        return None

    def loadDataset(self):
        """Load the CSV data set, or generate the synthetic one from the
        master seed."""
        name = self.syntheticName
        if name is not None:
            rng = RngStream(self.seed).derive(streamKey("DATASET"))
            return generate_synthetic(name, self.n, rng)
        return load_csv(self.dataset, self.labelColumn, self.negativeLabel)

    def toDict(self):
        return {"dataset": self.dataset, "policies": list(self.policies),
                "trials": self.trials, "horizon": self.horizon,
                "lambda": self.lam, "seed": self.seed,
                "samples": self.samples, "power_mode": self.powerMode,
                "oracle": self.oracle}


class PoolOracle(object):
    """Labels an example with its stored pool label."""
    def __init__(self, pool):
        self._y = pool.y

    def label(self, index, x):
        return int(self._y[index])


class LogisticOracle(object):
    """Draws labels from p(Y = +1 | x) = f(x^T theta_true)."""
    def __init__(self, thetaTrue, rng):
        self.thetaTrue = np.asarray(thetaTrue, dtype=float)
        self._rng = rng

    def label(self, index, x):
        return 1 if self._rng.uniform() < expit(np.dot(x, self.thetaTrue)) \
            else -1


def createOracle(name, split, lam, rng):
    """Return the labeling oracle of a trial."""
    if name == "pool":
        return PoolOracle(split.pool)
    if name == "logistic":
        full = LabeledSet(split.pool.X, split.pool.y)
        return LogisticOracle(fit_map(full, lam).theta, rng)
    errMsg = "Unknown oracle {0!r}; choose from {1}.".format(
        name, ORACLE_CANDIDATES)
    log.error(errMsg)
    raise ValueError(errMsg)


class TrialRecord(object):
    """Per-iteration metrics of one trial of one policy."""
    def __init__(self, policy, trial, seeds, d):
        self.policy = policy
        self.trial = trial
        self.seeds = seeds
        self.d = d
        self.selected = []
        self.accuracy = []
        self.tSelect = []
        self.tVem = []
        self.tRetrain = []
        self.exploit = []
        self.maximin = []
        # (iteration, log det) at the end of every window of d selections.
        self.gramLogdet = []
        self.theta = None

    @property
    def iterations(self):
        return len(self.selected)

    def cumulativeSelectTime(self):
        return np.cumsum(self.tSelect)

    def toFrame(self):
        """Per-iteration table with CSV_COLUMNS; gram_logdet is NaN except
        at window ends."""
        gram = np.full(self.iterations, np.nan)
        for it, value in self.gramLogdet:
            gram[it - 1] = value
        frame = pd.DataFrame({
            "iteration": np.arange(1, self.iterations + 1),
            "selected_index": self.selected,
            "test_accuracy": self.accuracy,
            "t_select_s": self.tSelect,
            "t_vem_s": self.tVem,
            "t_retrain_s": self.tRetrain,
            "exploit_dist": self.exploit,
            "maximin": self.maximin,
            "gram_logdet": gram})
        return frame[list(CSV_COLUMNS)]

    def sameSelections(self, other):
        """True if both records agree in everything but wall times."""
        return (self.selected == other.selected and
                self.accuracy == other.accuracy and
                np.array_equal(self.exploit, other.exploit, equal_nan=True))

    def __repr__(self):
        return "TrialRecord(policy={0}, trial={1}, iterations={2})".format(
            self.policy, self.trial, self.iterations)


def maximin_distance(labeled, pool):
    """Largest distance from an unlabeled pool example to its nearest
    labeled one."""
    mask = np.zeros(pool.n, dtype=bool)
    mask[np.asarray(list(labeled), dtype=int)] = True
    if not mask.any() or mask.all():
        errMsg = "maximin_distance needs labeled and unlabeled examples."
        log.error(errMsg)
        raise ValueError(errMsg)
    return float(cdist(pool.X[~mask], pool.X[mask]).min(axis=1).max())


def gram_logdet_window(selected):
    """log det of the Gram matrix of exactly d examples (rows); -inf when
    the Gram matrix is singular."""
    X = np.asarray(selected, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        errMsg = "A Gram window needs exactly d examples of dimension d, " \
                 "got shape {0}.".format(X.shape)
        log.error(errMsg)
        raise ValueError(errMsg)
    G = X.dot(X.T)
    if np.linalg.matrix_rank(G) < X.shape[0]:
        return -np.inf
    sign, logdet = np.linalg.slogdet(G)
    return float(logdet) if sign > 0 else -np.inf


def _timed(func, *args, **kwargs):
    start = time.perf_counter()
    result = func(*args, **kwargs)
    return result, time.perf_counter() - start


def run_trial(split, seeds, spec, cfg, oracle=None, trial=0):
    """Run one policy for cfg.horizon queries from the seed examples.

        Input:
            split : SplitDataset
            seeds : SeedSet of split
            spec  : PolicySpec, carrying the selection RngStream
            cfg   : ExperimentConfig
            oracle: labeling oracle, defaults to the pool labels
        Output:
            TrialRecord
    """
    pool, d = split.pool, split.pool.d
    oracle = oracle or PoolOracle(pool)
    policy = createPolicy(spec)

    labeled = list(seeds.indices)
    remaining = np.setdiff1d(np.arange(pool.n), labeled)
    if cfg.horizon > remaining.size:
        errMsg = "The pool has {0} unlabeled examples, fewer than the " \
                 "horizon {1}.".format(remaining.size, cfg.horizon)
        log.error(errMsg)
        raise PoolExhaustedError(errMsg)

    L = LabeledSet(pool.X[labeled],
                   [oracle.label(i, pool.X[i]) for i in labeled])
    post = variational_em(L, cfg.lam, d, cfg.vemTol, cfg.vemMaxIter)
    model = fit_map(L, cfg.lam, d)

    record = TrialRecord(policy.name, trial, seeds, d)
    window = []
    for it in range(1, cfg.horizon + 1):
        ctx = SelectionContext(pool, remaining, post, model, split.B)
        index, tSelect = _timed(policy.select, ctx)
        x = pool.X[index]
        L = L.append(x, oracle.label(index, x))
        labeled.append(index)
        remaining = remaining[remaining != index]

        post, tVem = _timed(variational_em, L, cfg.lam, d, cfg.vemTol,
                            cfg.vemMaxIter, np.append(post.xi, XI_INIT))
        previous = model.theta
        model, tRetrain = _timed(fit_map, L, cfg.lam, d)

        record.selected.append(int(index))
        record.tSelect.append(tSelect)
        record.tVem.append(tVem)
        record.tRetrain.append(tRetrain)
        record.accuracy.append(accuracy(model.theta, split.test))
        record.exploit.append(exploit_metric(x, previous)
                              if np.any(previous) else math.nan)
        record.maximin.append(maximin_distance(labeled, pool)
                              if remaining.size else math.nan)
        window.append(x)
        if len(window) == d:
            record.gramLogdet.append((it, gram_logdet_window(window)))
            window = []
        log.debug("%s trial %d iteration %d: selected %d, accuracy %.4f.",
                  policy.name, trial, it, index, record.accuracy[-1])

    record.theta = model.theta
    log.info("%s trial %d: final accuracy %.4f, selection time %.4f s.",
             policy.name, trial, record.accuracy[-1], sum(record.tSelect))
    return record


def _trialSplit(ds, cfg, trial):
    """Split and seed examples of a trial, identical for all policies."""
    rng = RngStream(cfg.seed).derive(trial)
    split = split_and_normalize(ds, rng)
    seeds = pick_seeds(split, rng)
    if cfg.horizon + 2 > split.pool.n:
        errMsg = "The horizon {0} plus two seed examples exceeds the pool " \
                 "size {1}.".format(cfg.horizon, split.pool.n)
        log.error(errMsg)
        raise ValueError(errMsg)
    return split, seeds


def _runTrialJob(job):
    """Run every policy of cfg on one trial."""
    ds, cfg, trial = job
    split, seeds = _trialSplit(ds, cfg, trial)
    master = RngStream(cfg.seed)
    records = []
    for kind in cfg.policies:
        spec = PolicySpec(kind, cfg.samples,
                          master.derive(trial, streamKey(kind)),
                          cfg.powerMode)
        oracle = createOracle(cfg.oracle, split, cfg.lam,
                              master.derive(trial, streamKey("ORACLE")))
        records.append(run_trial(split, seeds, spec, cfg, oracle, trial))
    return records


def _finite(values):
    """JSON-ready list: NaN and infinities become None."""
    return [float(v) if np.isfinite(v) else None for v in values]


def aggregate(records, horizon):
    """Reduce the TrialRecords of one policy to summary curves and
    medians."""
    T = len(records)
    acc = np.array([r.accuracy for r in records]).reshape(T, horizon)
    stderr = acc.std(axis=0, ddof=1) / math.sqrt(T) if T > 1 \
        else np.zeros(horizon)
    select = np.array([np.sum(r.tSelect) for r in records])
    vem = np.array([np.sum(r.tVem) for r in records])
    retrain = np.array([np.sum(r.tRetrain) for r in records])

    def columnMean(name):
        values = np.array([getattr(r, name) for r in records], dtype=float)
        counts = np.sum(np.isfinite(values), axis=0)
        sums = np.nansum(values, axis=0)
        return np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)

    gram = {}
    for r in records:
        for it, value in r.gramLogdet:
            gram.setdefault(it, []).append(value)
    windows = sorted(gram)
    gramValues = [np.array(gram[it]) for it in windows]
    nWindows = sum(v.size for v in gramValues)
    nSingular = sum(int(np.sum(np.isneginf(v))) for v in gramValues)
    meanGram = [float(np.mean(v[np.isfinite(v)])) if np.any(np.isfinite(v))
                else None for v in gramValues]

    return {"trials": T,
            "mean_acc": _finite(acc.mean(axis=0)),
            "stderr_acc": _finite(stderr),
            "median_cum_select_time": float(np.median(select)),
            "median_cum_vem_time": float(np.median(vem)),
            "median_cum_retrain_time": float(np.median(retrain)),
            "median_cum_total_time": float(np.median(select + vem + retrain)),
            "mean_exploit": _finite(columnMean("exploit")),
            "mean_maximin": _finite(columnMean("maximin")),
            "gram_windows": windows,
            "mean_gram_logdet": meanGram,
            "singular_window_fraction": (float(nSingular) / nWindows
                                         if nWindows else None)}


def trialCsvPath(out, policy, trial):
    return op.join(out, policy, "trial_{0}.csv".format(trial))


def writeTrialCsv(record, out):
    fn = checkOutputFile(trialCsvPath(out, record.policy, record.trial))
    try:
        record.toFrame().to_csv(fn, index=False, na_rep="")
    except (IOError, OSError) as e:
        errMsg = "Could not write {0}: {1}".format(fn, e)
        log.error(errMsg)
        raise IOError(errMsg)
    return fn


def writeAggregate(summary, out):
    fn = checkOutputFile(op.join(out, AGGREGATE_FILE))
    try:
        with open(fn, "w") as f:
            json.dump(summary, f, indent=2, sort_keys=True)
    except (IOError, OSError) as e:
        errMsg = "Could not write {0}: {1}".format(fn, e)
        log.error(errMsg)
        raise IOError(errMsg)
    return fn


def run_experiment(cfg, ds=None):
    """Run every policy on cfg.trials synchronized trials; write per-trial
    CSV files and the aggregate JSON under cfg.out.

        Output:
            {policy: [TrialRecord, ...]}
    """
    if not cfg.out:
        raise IOError("An output directory is required.")
    out = checkOutputDir(cfg.out)
    ds = ds if ds is not None else cfg.loadDataset()
    log.info("Running %s on %r: %d trials, horizon %d.",
             ", ".join(cfg.policies), ds, cfg.trials, cfg.horizon)

    jobs = [(ds, cfg, t) for t in range(cfg.trials)]
    if cfg.nproc > 1 and cfg.trials > 1:
        with Pool(min(cfg.nproc, cfg.trials)) as workers:
            perTrial = workers.map(_runTrialJob, jobs)
    else:
        perTrial = [_runTrialJob(job) for job in jobs]

    results = dict((kind, []) for kind in cfg.policies)
    for records in perTrial:
        for record in records:
            results[record.policy].append(record)
            writeTrialCsv(record, out)

    summary = {"version": get_version(),
               "config": cfg.toDict(),
               "dataset": {"name": ds.name, "n": ds.n, "d": ds.d},
               "policies": dict((kind, aggregate(results[kind], cfg.horizon))
                                for kind in cfg.policies)}
    fn = writeAggregate(summary, out)
    log.info("Wrote %d trial files and %s.",
             cfg.trials * len(cfg.policies), fn)
    return results
