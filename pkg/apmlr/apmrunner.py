"""This script defines class ApmRunner.

ApmRunner dispatches the `apm` subcommands: `run` benchmarks selection
policies on synchronized trials through the harness, `verify` reports the
information continuity bound as JSON and `datasets gen` writes a synthetic
data set as CSV.
"""

import logging
import sys
import time

from pbcommand.cli import pacbio_args_runner
from pbcommand.utils import setup_log

from apmlr.__init__ import get_version
from apmlr.data import MIN_SYNTHETIC_EXAMPLES, SYNTHETIC_CANDIDATES
from apmlr.harness import SYNTHETIC_PREFIX, ExperimentConfig, run_experiment
from apmlr.options import COMMAND_CANDIDATES, get_argument_parser
from apmlr.tools.datasets import DatasetsTool
from apmlr.tools.verify import VerifyTool
from apmlr.utils.fileutil import checkInputFile

log = logging.getLogger(__name__)


class ApmRunner(object):

    """Tool runner."""

    def __init__(self, args=None, argumentList=()):
        """Initialize an ApmRunner object.
           argumentList is a list of arguments, such as:
           ['run', '--dataset', 'synthetic:cross', '--out', 'res']
        """
        if args is None:
            args = get_argument_parser().parse_args(argumentList)
        self.args = args

    def getVersion(self):
        """Return version."""
        return get_version()

    def _makeSane(self, args):
        """
        Check whether the `apm run` arguments make sense or not.
        """
        errMsg = ""
        if args.dataset is None:
            errMsg = "A data set (--dataset) is required."
        elif args.out is None:
            errMsg = "An output directory (--out) is required."
        if errMsg:
            log.error(errMsg)
            raise ValueError(errMsg)

        name = None
        if args.dataset.startswith(SYNTHETIC_PREFIX):
            name = args.dataset[len(SYNTHETIC_PREFIX):]
        if name is None:
            args.dataset = checkInputFile(args.dataset)
        elif name.lower() not in SYNTHETIC_CANDIDATES:
            errMsg = "Unknown synthetic data set {0!r}; choose from " \
                     "{1}.".format(name, SYNTHETIC_CANDIDATES)
        elif args.n < MIN_SYNTHETIC_EXAMPLES or args.n % 2:
            errMsg = "Synthetic data sets need an even --n >= {0}.".format(
                MIN_SYNTHETIC_EXAMPLES)
        if errMsg:
            log.error(errMsg)
            raise ValueError(errMsg)
        return ExperimentConfig.fromArgs(args)

    def _runExperiment(self):
        config = self._makeSane(self.args)
        run_experiment(config)
        return 0

    def _createTool(self, command):
        """
        Return the callable running a subcommand.
        Input:
            command: one of COMMAND_CANDIDATES
        """
        if command not in COMMAND_CANDIDATES:
            errMsg = "ERROR: unrecognized command {0}".format(command)
            log.error(errMsg)
            raise ValueError(errMsg)
        if command == "run":
            return self._runExperiment
        elif command == "verify":
            return VerifyTool(self.args).run
        return DatasetsTool(self.args).run

    def run(self):
        """The main function."""
        startTime = time.time()
        log.info("apm version: %s", get_version())
        log.debug("Parsed arguments: %s", self.args)

        rcode = self._createTool(self.args.command)()

        endTime = time.time()
        log.info("Total time: {:.2f} s.".format(float(endTime - startTime)))
        return rcode


def args_runner(args):
    """args runner"""
    return ApmRunner(args).run()


def main(argv=sys.argv):
    """Main entry."""
    return pacbio_args_runner(
        argv=argv[1:],
        parser=get_argument_parser(),
        args_runner_func=args_runner,
        alog=log,
        setup_log_func=setup_log)


if __name__ == "__main__":
    sys.exit(main())
