"""This script defines DatasetsTool, which writes a synthetic data set to a
CSV file readable by `apm run --dataset`."""

import logging

import pandas as pd

from apmlr.data import generate_synthetic
from apmlr.utils.fileutil import checkOutputFile
from apmlr.utils.numkit import RngStream, streamKey

log = logging.getLogger(__name__)

LABEL_COLUMN = "label"


def datasetFrame(ds):
    """Columns x1..xd and label."""
    frame = pd.DataFrame(ds.X, columns=["x{0}".format(i + 1)
                                        for i in range(ds.d)])
    frame[LABEL_COLUMN] = ds.y
    return frame


class DatasetsTool(object):
    """`apm datasets gen`."""
    def __init__(self, args):
        self.args = args

    def run(self):
        args = self.args
        # Same stream as `apm run --dataset synthetic:<name>`.
        rng = RngStream(args.seed).derive(streamKey("DATASET"))
        ds = generate_synthetic(args.name, args.n, rng)
        fn = checkOutputFile(args.out)
        try:
            datasetFrame(ds).to_csv(fn, index=False)
        except (IOError, OSError) as e:
            errMsg = "Could not write {0}: {1}".format(fn, e)
            log.error(errMsg)
            raise IOError(errMsg)
        log.info("Wrote %r to %s.", ds, fn)
        return 0
