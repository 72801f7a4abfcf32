"""This script defines VerifyTool, which checks the information continuity
bound at a list of power constraints and the symmetrization property on
random grid distributions, and reports both as JSON."""

import json
import logging
import sys

import numpy as np

from apmlr.__init__ import get_version
from apmlr.infotheory import (GridDistribution, mi_symmetrization_check,
                              verify_info_continuity)
from apmlr.options import parsePowers
from apmlr.utils.fileutil import checkOutputFile
from apmlr.utils.numkit import RngStream, streamKey

log = logging.getLogger(__name__)

GRID_SIZE = 41
GRID_HALF_WIDTH = 6.0
SYMMETRY_TOL = 1e-12


def randomGrid(rng, size=GRID_SIZE, halfWidth=GRID_HALF_WIDTH):
    """A random distribution on `size` uniformly drawn support points."""
    support = rng.uniform(-halfWidth, halfWidth, size=size)
    weights = rng.uniform(size=size) ** 4
    return GridDistribution(support, weights / weights.sum())


def symmetrization_report(grids, rng):
    """Run mi_symmetrization_check on `grids` random grid distributions."""
    violations, gaps = 0, []
    for _ in range(grids):
        mi, miSym = mi_symmetrization_check(randomGrid(rng))
        gaps.append(miSym - mi)
        if miSym < mi - SYMMETRY_TOL:
            violations += 1
    return {"grids": grids,
            "violations": violations,
            "min_gain": float(np.min(gaps)) if gaps else None}


class VerifyTool(object):
    """`apm verify`."""
    def __init__(self, args):
        self.args = args

    def run(self):
        args = self.args
        powers = parsePowers(args.P)
        master = RngStream(args.seed)
        reports = [verify_info_continuity(P, args.trials,
                                          master.derive(streamKey("VERIFY"), i))
                   for i, P in enumerate(powers)]
        symmetry = symmetrization_report(
            args.grids, master.derive(streamKey("SYMMETRY")))
        violations = sum(r.violations for r in reports) + \
            symmetry["violations"]
        result = {"version": get_version(),
                  "seed": args.seed,
                  "continuity": [r.toDict() for r in reports],
                  "symmetrization": symmetry,
                  "violations": violations}
        text = json.dumps(result, indent=2, sort_keys=True)
        if args.out:
            fn = checkOutputFile(args.out)
            with open(fn, "w") as f:
                f.write(text + "\n")
            log.info("Wrote the verification report to %s.", fn)
        else:
            sys.stdout.write(text + "\n")
        if violations:
            log.error("%d violations found.", violations)
            return 1
        return 0
