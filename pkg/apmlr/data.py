"""This script defines the data sets of an active learning experiment:
Dataset, SplitDataset, SeedSet and LabeledSet, CSV ingestion, synthetic
generators and the pool/test protocol (random halving, normalization of the
pool, one seed example per class)."""

import logging
import math
import os.path as op

import numpy as np
import pandas as pd

from apmlr.utils.fileutil import isExist, real_ppath

log = logging.getLogger(__name__)

LABELS = (-1, 1)

MIN_EXAMPLES = 4
MIN_SYNTHETIC_EXAMPLES = 8
MAX_SPLIT_ATTEMPTS = 100

# Pool bound B is the largest pool row norm inflated by this factor, so that
# every pool row satisfies ||x|| < B.
BOUND_INFLATION = 1e-9

# Generator constants of the synthetic data sets. Every cluster is an
# isotropic normal; class +1 uses the listed centers, class -1 their
# negations.
SYNTHETIC_PARAMS = {
    "clouds": {
        "center": (1.5, 0.0),
        "sigma": 1.0,
    },
    "cross": {
        # Dense central clusters near the origin (fraction of each class).
        "center": (0.4, 0.1),
        "center_sigma": 0.2,
        "center_fraction": 0.4,
        # Corner clusters beside the diagonal separator x1 + x2 = 0. The
        # central clusters alone favour a separator close to x1 = 0, which
        # misclassifies the "trap" corners.
        "trap_corner": (-2.0, 3.5),
        "safe_corner": (3.5, -2.0),
        "corner_sigma": 0.4,
    },
    "horseshoe": {
        "radius": 2.0,
        "thickness": 0.4,
        # Arc centers; the arcs are interleaved and offset vertically by
        # twice the y component.
        "center": (-1.0, 0.25),
    },
}

SYNTHETIC_CANDIDATES = tuple(sorted(SYNTHETIC_PARAMS.keys()))


class Dataset(object):
    """Feature matrix X (examples as rows), labels y in {-1, +1} and a name.

    Arrays are copied and frozen on construction.
    """
    def __init__(self, X, y, name="dataset", checkBothLabels=True):
        X = np.array(X, dtype=float, ndmin=2)
        y = np.array(y, dtype=int).ravel()
        if X.shape[0] != y.shape[0]:
            errMsg = "{0}: {1} rows of features but {2} labels.".format(
                name, X.shape[0], y.shape[0])
            log.error(errMsg)
            raise ValueError(errMsg)
        if not np.all(np.isfinite(X)):
            errMsg = "{0}: features contain NaN or Inf.".format(name)
            log.error(errMsg)
            raise ValueError(errMsg)
        if not np.all(np.isin(y, LABELS)):
            errMsg = "{0}: labels must be -1 or +1.".format(name)
            log.error(errMsg)
            raise ValueError(errMsg)
        if checkBothLabels:
            if X.shape[0] < MIN_EXAMPLES:
                errMsg = "{0}: at least {1} examples are required, got " \
                         "{2}.".format(name, MIN_EXAMPLES, X.shape[0])
                log.error(errMsg)
                raise ValueError(errMsg)
            if len(np.unique(y)) != 2:
                errMsg = "{0}: both labels must be present.".format(name)
                log.error(errMsg)
                raise ValueError(errMsg)
        X.setflags(write=False)
        y.setflags(write=False)
        self._X = X
        self._y = y
        self._name = name

    @property
    def X(self):
        return self._X

    @property
    def y(self):
        return self._y

    @property
    def name(self):
        return self._name

    @property
    def n(self):
        """Number of examples."""
        return self._X.shape[0]

    @property
    def d(self):
        """Number of features."""
        return self._X.shape[1]

    def subset(self, indices, name=None, checkBothLabels=False):
        """Return the rows at indices as a new Dataset."""
        indices = np.asarray(indices, dtype=int)
        return Dataset(self._X[indices], self._y[indices],
                       name=name or self._name,
                       checkBothLabels=checkBothLabels)

    def classCounts(self):
        """Return {label: count}."""
        return dict((int(k), int(np.sum(self._y == k))) for k in LABELS)

    def __repr__(self):
        return "Dataset(name={0!r}, n={1}, d={2})".format(
            self._name, self.n, self.d)


class Normalization(object):
    """Per-feature (mean, std) of a pool. Features with zero pool variance
    are centered and left unscaled."""
    def __init__(self, mean, std):
        self.mean = np.asarray(mean, dtype=float)
        std = np.asarray(std, dtype=float)
        self.std = np.where(std > 0, std, 1.0)

    @classmethod
    def fromPool(cls, X):
        return cls(X.mean(axis=0), X.std(axis=0))

    def apply(self, X):
        """Return the normalized copy of X."""
        return (np.asarray(X, dtype=float) - self.mean) / self.std


class SplitDataset(object):
    """Normalized pool, test set with the same transformation, the
    normalization and the pool bound B."""
    def __init__(self, pool, test, normalization, B, poolIndices=None,
                 testIndices=None):
        if not B > 0:
            raise ValueError("The pool bound B must be positive.")
        self.pool = pool
        self.test = test
        self.normalization = normalization
        self.B = float(B)
        self.poolIndices = poolIndices
        self.testIndices = testIndices


class SeedSet(object):
    """One pool index per class, indices[0] labeled -1 and indices[1]
    labeled +1."""
    def __init__(self, negative, positive):
        if negative == positive:
            raise ValueError("Seed indices must be distinct.")
        self.indices = (int(negative), int(positive))

    def __iter__(self):
        return iter(self.indices)

    def __eq__(self, other):
        return isinstance(other, SeedSet) and self.indices == other.indices

    def __repr__(self):
        return "SeedSet{0}".format(self.indices)


class LabeledSet(object):
    """Ordered sequence of (example, label) pairs."""
    def __init__(self, X=None, y=None, d=None):
        if X is None:
            if d is None:
                raise ValueError("An empty LabeledSet needs its dimension d.")
            X = np.zeros((0, d))
            y = np.zeros(0, dtype=int)
        self.X = np.array(X, dtype=float, ndmin=2)
        self.y = np.array(y, dtype=int).ravel()
        if self.X.shape[0] != self.y.shape[0]:
            raise ValueError("LabeledSet: {0} examples but {1} labels.".format(
                self.X.shape[0], self.y.shape[0]))

    @property
    def d(self):
        return self.X.shape[1]

    def __len__(self):
        return self.y.shape[0]

    def append(self, x, label):
        """Return a new LabeledSet with (x, label) appended."""
        return LabeledSet(np.vstack([self.X, np.asarray(x, dtype=float)]),
                          np.append(self.y, int(label)))


def mapLabels(values, negativeLabel=None):
    """Map exactly two distinct label values to {-1, +1}.

    By default the values are ordered lexicographically by their string form
    and the first one becomes -1. negativeLabel overrides this choice.
        Output:
            (mapped array, {original string: mapped label})
    """
    strs = np.array([str(v).strip() for v in values])
    classes = sorted(set(strs))
    if len(classes) != 2:
        errMsg = "Exactly two label values are required, found {0}: " \
                 "{1}.".format(len(classes), ", ".join(classes))
        log.error(errMsg)
        raise ValueError(errMsg)
    if negativeLabel is not None:
        negativeLabel = str(negativeLabel).strip()
        if negativeLabel not in classes:
            errMsg = "Negative label {0!r} is not one of {1}.".format(
                negativeLabel, classes)
            log.error(errMsg)
            raise ValueError(errMsg)
        negative = negativeLabel
    else:
        negative = classes[0]
    mapping = dict((c, -1 if c == negative else 1) for c in classes)
    return np.array([mapping[s] for s in strs], dtype=int), mapping


def load_csv(path, label_column, negativeLabel=None, name=None):
    """Load a Dataset from a UTF-8 CSV file with a header row.

        Input:
            path         : CSV file
            label_column : name of the label column; every other column is
                           a numeric feature
            negativeLabel: optional label value to map to -1
        Output:
            Dataset
    """
    fn = real_ppath(path)
    if not isExist(fn):
        errMsg = "Could not read data file {0}.".format(path)
        log.error(errMsg)
        raise IOError(errMsg)
    try:
        frame = pd.read_csv(fn, encoding="utf-8", dtype={label_column: str},
                            skipinitialspace=True)
    except (IOError, OSError, pd.errors.ParserError, UnicodeDecodeError) as e:
        errMsg = "Could not read data file {0}: {1}".format(path, e)
        log.error(errMsg)
        raise IOError(errMsg)

    if label_column not in frame.columns:
        errMsg = "Label column {0!r} not found in {1}; columns are {2}.".format(
            label_column, path, list(frame.columns))
        log.error(errMsg)
        raise ValueError(errMsg)

    missing = frame.isnull().any(axis=1)
    if missing.any():
        rows = [int(i) + 2 for i in np.flatnonzero(missing.values)]
        errMsg = "{0}: rows with missing values are not allowed (lines " \
                 "{1}).".format(path, rows[:10])
        log.error(errMsg)
        raise ValueError(errMsg)

    y, mapping = mapLabels(frame[label_column].values, negativeLabel)
    features = frame.drop(columns=[label_column])
    try:
        X = features.to_numpy(dtype=float)
    except ValueError as e:
        errMsg = "{0}: non-numeric feature values: {1}".format(path, e)
        log.error(errMsg)
        raise ValueError(errMsg)
    log.info("Loaded %d examples with %d features from %s (labels %s).",
             X.shape[0], X.shape[1], path, mapping)
    return Dataset(X, y, name=name or op.splitext(op.basename(fn))[0])


def _classSizes(n):
    """Per-class sizes of a balanced synthetic data set (class -1 first)."""
    return n // 2, n - n // 2


def _clouds(counts, rng, params):
    center = np.asarray(params["center"])
    blocks = []
    for label, count in zip(LABELS, counts):
        blocks.append(rng.normal(label * center, params["sigma"],
                                 size=(count, 2)))
    return blocks


def _cross(counts, rng, params):
    blocks = []
    for label, count in zip(LABELS, counts):
        nCenter = int(round(params["center_fraction"] * count))
        nTrap = (count - nCenter) // 2
        nSafe = count - nCenter - nTrap
        parts = [
            rng.normal(label * np.asarray(params["center"]),
                       params["center_sigma"], size=(nCenter, 2)),
            rng.normal(label * np.asarray(params["trap_corner"]),
                       params["corner_sigma"], size=(nTrap, 2)),
            rng.normal(label * np.asarray(params["safe_corner"]),
                       params["corner_sigma"], size=(nSafe, 2)),
        ]
        blocks.append(np.vstack(parts))
    return blocks


def _horseshoe(counts, rng, params):
    blocks = []
    half = 0.5 * params["thickness"]
    for label, count in zip(LABELS, counts):
        # class +1 is the upper arc, class -1 the lower one.
        angles = rng.uniform(0.0, math.pi, size=count)
        radii = rng.uniform(params["radius"] - half, params["radius"] + half,
                            size=count)
        center = -label * np.asarray(params["center"]) * np.array([1, -1])
        arc = np.column_stack([radii * np.cos(angles),
                               label * radii * np.sin(angles)])
        blocks.append(arc + center)
    return blocks


_GENERATORS = {"clouds": _clouds, "cross": _cross, "horseshoe": _horseshoe}


def generate_synthetic(name, n, rng, params=None):
    """Generate a balanced 2-D synthetic Dataset.

        Input:
            name  : one of SYNTHETIC_CANDIDATES
            n     : number of examples, even and >= 8
            rng   : RngStream
            params: optional override of SYNTHETIC_PARAMS[name]
        Output:
            Dataset with n rows, classes differing in size by at most one
    """
    key = str(name).lower()
    if key not in _GENERATORS:
        errMsg = "Unknown synthetic data set {0!r}; choose from {1}.".format(
            name, SYNTHETIC_CANDIDATES)
        log.error(errMsg)
        raise ValueError(errMsg)
    if n < MIN_SYNTHETIC_EXAMPLES or n % 2:
        errMsg = "Synthetic data sets need an even n >= {0}, got {1}.".format(
            MIN_SYNTHETIC_EXAMPLES, n)
        log.error(errMsg)
        raise ValueError(errMsg)
    counts = _classSizes(n)
    blocks = _GENERATORS[key](counts, rng, params or SYNTHETIC_PARAMS[key])
    X = np.vstack(blocks)
    y = np.concatenate([np.full(c, label, dtype=int)
                        for label, c in zip(LABELS, counts)])
    order = rng.permutation(n)
    return Dataset(X[order], y[order], name=key)


def poolBound(X):
    """B: the largest row norm of X inflated by BOUND_INFLATION."""
    return float(np.max(np.linalg.norm(X, axis=1))) * (1.0 + BOUND_INFLATION)


def split_and_normalize(ds, rng):
    """Randomly halve ds into a pool and a test set, normalize the pool to
    zero mean and unit variance per feature and apply the same
    transformation to the test set.

    The split is redrawn (up to MAX_SPLIT_ATTEMPTS times) until both classes
    are present in the pool.
    """
    if ds.n < MIN_EXAMPLES:
        errMsg = "{0}: at least {1} examples are required to split.".format(
            ds.name, MIN_EXAMPLES)
        log.error(errMsg)
        raise ValueError(errMsg)

    nPool = ds.n // 2
    for attempt in range(MAX_SPLIT_ATTEMPTS):
        order = rng.permutation(ds.n)
        poolIdx, testIdx = np.sort(order[:nPool]), np.sort(order[nPool:])
        if len(np.unique(ds.y[poolIdx])) == 2:
            break
        log.debug("Split attempt %d left a class out of the pool; "
                  "resplitting.", attempt + 1)
    else:
        errMsg = "{0}: could not place both classes in the pool after {1} " \
                 "attempts.".format(ds.name, MAX_SPLIT_ATTEMPTS)
        log.error(errMsg)
        raise ValueError(errMsg)

    norm = Normalization.fromPool(ds.X[poolIdx])
    poolX = norm.apply(ds.X[poolIdx])
    pool = Dataset(poolX, ds.y[poolIdx], name=ds.name + ".pool",
                   checkBothLabels=False)
    test = Dataset(norm.apply(ds.X[testIdx]), ds.y[testIdx],
                   name=ds.name + ".test", checkBothLabels=False)
    B = poolBound(poolX)
    if not B > 0:
        errMsg = "{0}: the normalized pool has no non-zero row.".format(
            ds.name)
        log.error(errMsg)
        raise ValueError(errMsg)
    return SplitDataset(pool, test, norm, B, poolIndices=poolIdx,
                        testIndices=testIdx)


def pick_seeds(split, rng):
    """Pick one pool example uniformly at random from each class."""
    y = split.pool.y
    picks = []
    for label in LABELS:
        candidates = np.flatnonzero(y == label)
        if candidates.size == 0:
            errMsg = "The pool has no example labeled {0}.".format(label)
            log.error(errMsg)
            raise ValueError(errMsg)
        picks.append(int(candidates[rng.integers(candidates.size)]))
    return SeedSet(*picks)
