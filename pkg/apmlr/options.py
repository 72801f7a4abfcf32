"""This scripts defines functions for parsing ApmRunner options."""

import argparse
import logging
from copy import copy

from pbcommand.common_options import add_base_options

from apmlr.__init__ import get_version
from apmlr.data import SYNTHETIC_CANDIDATES
from apmlr.harness import ORACLE_CANDIDATES, VEM_MAX_ITER
from apmlr.logreg import DEFAULT_LAMBDA
from apmlr.selection.policy import DEFAULT_SAMPLES, POLICY_KINDS, POWER_MODES

log = logging.getLogger(__name__)


class Constants(object):
    TOOL_ID = "apmlr.tasks.apm"
    DRIVER_EXE = "apm"
    VERSION = get_version()
    PARSER_DESC = """\
Benchmark pool-based active learning policies for homogeneous binary
logistic regression, approximate posterior matching (APM_LR) among them, on
synchronized trials of a CSV or synthetic data set, and verify the channel
coding results the policy rests on."""

COMMAND_CANDIDATES = ("run", "verify", "datasets")

POLICY_CANDIDATES = POLICY_KINDS

# Default values of `apm run` arguments.
DEFAULT_OPTIONS = {"configFile": None,
                   # Input
                   "dataset": None,
                   "labelCol": "label",
                   "negativeLabel": None,
                   "n": 600,
                   # Selection
                   "policies": "APM_LR,Uncertainty,Random",
                   "samples": DEFAULT_SAMPLES,
                   "powerMode": POWER_MODES[0],
                   "lam": DEFAULT_LAMBDA,
                   "vemTol": 1e-6,
                   "vemMaxIter": VEM_MAX_ITER,
                   # Experiment
                   "trials": 10,
                   "horizon": 40,
                   "oracle": ORACLE_CANDIDATES[0],
                   "seed": 1,
                   "nproc": 1,
                   # Output
                   "out": None}

DEFAULT_VERIFY_OPTIONS = {"P": "0.5,1,4,9",
                          "trials": 1000,
                          "grids": 100,
                          "seed": 1,
                          "out": None}

# Arguments handled by pbcommand or the parser itself; skipped in a config
# file.
SPECIAL_ARGUMENTS = ("--version", "--configFile", "--debug", "--quiet",
                     "--verbose", "-v", "-vv", "-vvv")


def _withDefault(helpstr, key):
    return "{0} (default: {1})".format(helpstr, DEFAULT_OPTIONS[key])


def constructRunParser(parser):
    """
    Add `apm run` arguments to the parser. Every option defaults to None so
    that values from a config file can be told apart from values given on
    the command line; importDefaultOptions fills the rest.
    """
    input_group = parser.add_argument_group("Input arguments")
    helpstr = "A CSV file with a header row, or synthetic:<name> with " + \
              "name in {0}.".format(", ".join(SYNTHETIC_CANDIDATES))
    input_group.add_argument("--dataset", dest="dataset", type=str,
                             default=None, action="store", help=helpstr)

    input_group.add_argument("--label-col", dest="labelCol", type=str,
                             default=None, action="store",
                             help=_withDefault("Name of the label column.",
                                               "labelCol"))

    helpstr = "Label value mapped to -1. By default the two label values\n" + \
              "are ordered lexicographically and the first maps to -1."
    input_group.add_argument("--negative-label", dest="negativeLabel",
                             type=str, default=None, action="store",
                             help=helpstr)

    input_group.add_argument("--n", dest="n", type=int, default=None,
                             action="store",
                             help=_withDefault("Size of a synthetic data "
                                               "set.", "n"))

    input_group.add_argument("--configFile", dest="configFile", type=str,
                             default=None, action="store",
                             help="Specify a set of user-defined argument "
                                  "values.")

    select_group = parser.add_argument_group("Selection options")
    helpstr = "Comma-separated selection policies from {0}.".format(
        ", ".join(POLICY_CANDIDATES))
    select_group.add_argument("--policies", dest="policies", type=str,
                              default=None, action="store",
                              help=_withDefault(helpstr, "policies"))

    select_group.add_argument("--samples", dest="samples", type=int,
                              default=None, action="store",
                              help=_withDefault("Posterior samples per "
                                                "InfoGain round.", "samples"))

    helpstr = "Power constraint: B^2 times the largest eigenvalue of\n" + \
              "the posterior covariance, or of the second moment matrix."
    select_group.add_argument("--power-mode", dest="powerMode", type=str,
                              choices=POWER_MODES, default=None,
                              action="store",
                              help=_withDefault(helpstr, "powerMode"))

    select_group.add_argument("--lambda", dest="lam", type=float,
                              default=None, action="store",
                              help=_withDefault("Prior precision.", "lam"))

    select_group.add_argument("--vem-tol", dest="vemTol", type=float,
                              default=None, action="store",
                              help=_withDefault("VariationalEM relative "
                                                "tolerance.", "vemTol"))

    select_group.add_argument("--vem-max-iter", dest="vemMaxIter", type=int,
                              default=None, action="store",
                              help=_withDefault("VariationalEM maximum "
                                                "sweeps.", "vemMaxIter"))

    experiment_group = parser.add_argument_group("Experiment options")
    experiment_group.add_argument("--trials", dest="trials", type=int,
                                  default=None, action="store",
                                  help=_withDefault("Number of trials.",
                                                    "trials"))

    experiment_group.add_argument("--horizon", dest="horizon", type=int,
                                  default=None, action="store",
                                  help=_withDefault("Queries per trial.",
                                                    "horizon"))

    helpstr = "Labeling oracle: the stored pool labels, or labels drawn\n" + \
              "from a logistic model fitted to the whole pool."
    experiment_group.add_argument("--oracle", dest="oracle", type=str,
                                  choices=ORACLE_CANDIDATES, default=None,
                                  action="store",
                                  help=_withDefault(helpstr, "oracle"))

    experiment_group.add_argument("--seed", dest="seed", type=int,
                                  default=None, action="store",
                                  help=_withDefault("Master seed.", "seed"))

    experiment_group.add_argument("--nproc", dest="nproc", type=int,
                                  default=None, action="store",
                                  help=_withDefault("Number of processes.",
                                                    "nproc"))

    output_group = parser.add_argument_group("Output arguments")
    output_group.add_argument("--out", dest="out", type=str, default=None,
                              action="store",
                              help="Output directory.")
    return parser


def constructVerifyParser(parser):
    """Add `apm verify` arguments to the parser."""
    D = DEFAULT_VERIFY_OPTIONS
    parser.formatter_class = argparse.ArgumentDefaultsHelpFormatter
    parser.add_argument("--P", dest="P", type=str, default=D["P"],
                        help="Comma-separated power constraints.")
    parser.add_argument("--trials", dest="trials", type=int,
                        default=D["trials"],
                        help="Random Gaussians per power constraint.")
    parser.add_argument("--grids", dest="grids", type=int, default=D["grids"],
                        help="Random grid distributions for the "
                             "symmetrization check.")
    parser.add_argument("--seed", dest="seed", type=int, default=D["seed"],
                        help="Master seed.")
    parser.add_argument("--out", dest="out", type=str, default=D["out"],
                        help="Write the JSON report here instead of stdout.")
    return parser


def constructDatasetsParser(parser):
    """Add `apm datasets gen` arguments to the parser."""
    sub = parser.add_subparsers(dest="datasetsCommand", metavar="COMMAND")
    sub.required = True
    gen = sub.add_parser("gen", help="Generate a synthetic data set as CSV.",
                         formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    gen.add_argument("name", type=str, choices=SYNTHETIC_CANDIDATES,
                     help="Synthetic data set.")
    gen.add_argument("--n", dest="n", type=int, default=DEFAULT_OPTIONS["n"],
                     help="Number of examples.")
    gen.add_argument("--out", dest="out", type=str, required=True,
                     help="Output CSV file.")
    gen.add_argument("--seed", dest="seed", type=int,
                     default=DEFAULT_OPTIONS["seed"], help="Master seed.")
    add_base_options(gen)
    return parser


def _configActions(parser):
    """Map every config key spelling (dest, option string without dashes)
    to its argparse action."""
    actions = {}
    for action in parser._actions:
        if action.dest in (argparse.SUPPRESS, "help"):
            continue
        actions[action.dest] = action
        for s in action.option_strings:
            actions[s.lstrip("-")] = action
    return actions


def importConfigOptions(options, parser):
    """
    Import options from options.configFile if the file exists. Options not
    given on the command line (still None) take the config file's values,
    converted by the parser's argument types. Return the new options and an
    info message.
    """
    newOptions = copy(options)
    if getattr(options, "configFile", None) is None:
        return newOptions, ""

    optionsDictView = vars(newOptions)
    configFile = options.configFile
    actions = _configActions(parser)
    infoMsg = "ConfigParser: Import options from a config file {0}: "\
              .format(configFile)
    try:
        with open(configFile, 'r') as cf:
            for line in cf:
                line = line.strip()
                if (line.startswith("#") or line == "" or
                        line in SPECIAL_ARGUMENTS):
                    continue
                try:
                    k, v = line.split("=", 1)
                except ValueError:
                    errMsg = "ConfigParser: could not find '=' when " + \
                             "parsing {0}.".format(line)
                    log.error(errMsg)
                    raise ValueError(errMsg)
                k = k.strip().lstrip('-').strip()
                v = v.strip().strip('\"').strip('\'')
                if k not in actions:
                    errMsg = "{k} is an invalid option.".format(k=k)
                    log.error(errMsg)
                    raise ValueError(errMsg)
                action = actions[k]
                if action.type is not None:
                    try:
                        v = action.type(v)
                    except ValueError:
                        errMsg = "ConfigParser: invalid value {v!r} for " \
                                 "{k}.".format(v=v, k=k)
                        log.error(errMsg)
                        raise ValueError(errMsg)
                if action.choices is not None and v not in action.choices:
                    errMsg = "ConfigParser: {k} must be one of {c}.".format(
                        k=k, c=action.choices)
                    log.error(errMsg)
                    raise ValueError(errMsg)
                # Command-line values win over the config file.
                if optionsDictView.get(action.dest) is None:
                    infoMsg += "{k}={v}, ".format(k=action.dest, v=v)
                    optionsDictView[action.dest] = v
    except IOError as e:
        errMsg = "ConfigParser: Could not open a config file {0}.\n".\
                 format(configFile)
        log.error(errMsg)
        raise IOError(errMsg + str(e))
    return newOptions, infoMsg.rstrip(', ')


def importDefaultOptions(parsedOptions, additionalDefaults=DEFAULT_OPTIONS):
    """Import default options and return (update_options, an_info_message).

    After parsing the arguments and the config file, patch the default
    options which have been set neither on the command line nor in the
    config file.
    """
    newOptions = copy(parsedOptions)
    infoMsg = "Importing default options: "
    optionsDictView = vars(newOptions)
    for k, v in additionalDefaults.items():
        if (k not in optionsDictView) or (optionsDictView[k] is None):
            infoMsg += "{k}={v}, ".format(k=k, v=v)
            optionsDictView[k] = v
    return newOptions, infoMsg.rstrip(', ')


class _ArgParser(argparse.ArgumentParser):
    """
    Substitute for the standard argument parser, where parse_args is
    extended to facilitate the use of config files by `apm run`.
    """
    runParser = None

    def parse_args(self, args=None, namespace=None):
        options = super(_ArgParser, self).parse_args(args=args,
                                                     namespace=namespace)
        if getattr(options, "command", None) != "run":
            return options
        options, _infoMsg = importConfigOptions(options, self.runParser)
        options, _infoMsg = importDefaultOptions(options)
        return options


def get_argument_parser():
    """Create and populate the `apm` argument parser."""
    C = Constants
    parser = _ArgParser(prog=C.DRIVER_EXE, description=C.PARSER_DESC)
    parser.version = C.VERSION
    parser.add_argument('--version', action="version", version=C.VERSION,
                        help="show program's version number and exit")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    run = sub.add_parser("run", help="Run a synchronized benchmark.",
                         description=C.PARSER_DESC)
    constructRunParser(run)
    add_base_options(run)
    parser.runParser = run

    verify = sub.add_parser("verify", help="Verify the information "
                            "continuity bound and report it as JSON.")
    constructVerifyParser(verify)
    add_base_options(verify)

    datasets = sub.add_parser("datasets", help="Synthetic data set tools.")
    constructDatasetsParser(datasets)
    return parser


def parsePowers(text):
    """Parse a comma-separated list of positive power constraints."""
    try:
        powers = [float(p) for p in str(text).split(",") if p.strip()]
    except ValueError:
        errMsg = "Could not parse power constraints {0!r}.".format(text)
        log.error(errMsg)
        raise ValueError(errMsg)
    if not powers or any(not p > 0 for p in powers):
        errMsg = "Power constraints must be positive, got {0!r}.".format(text)
        log.error(errMsg)
        raise ValueError(errMsg)
    return powers
