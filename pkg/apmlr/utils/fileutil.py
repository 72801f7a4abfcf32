"""This scripts defines functions for handling input and output files."""

import logging
import os
import os.path as op

log = logging.getLogger(__name__)


class FILE_FORMATS(object):
    CSV = "CSV"
    JSON = "JSON"
    UNKNOWN = "UNKNOWN"


def real_ppath(fn):
    """Return real 'python-style' path of a file.
    Consider files with white spaces in their paths, such as
    'res\\ with\\ space/out.csv' or 'res with space/out.csv'; both are
    converted to the python style 'res with space/out.csv'.
    """
    return op.abspath(op.expanduser(fn)).replace(r'\ ', ' ')


def isExist(ff):
    """Return whether a file or a dir ff exists or not.
    Call listdir first to eliminate NFS errors.
    """
    if not ff:
        return False
    try:
        # Might sync cache for some users.
        d = op.normpath(op.dirname(ff))
        os.listdir(d)
    except Exception:
        pass
    return op.exists(ff)  # Broken symlink is also False.


def getFileFormat(filename):
    """Return a file's format judged by its extension."""
    ext = op.splitext(filename.lower())[1]
    if ext in (".csv", ".txt"):
        return FILE_FORMATS.CSV
    if ext == ".json":
        return FILE_FORMATS.JSON
    return FILE_FORMATS.UNKNOWN


def checkInputFile(path):
    """Check whether an input data file exists and is a CSV file; return
    its real path."""
    fn = real_ppath(path)
    if not isExist(fn):
        errMsg = "Input file {0} does not exist.".format(path)
        log.error(errMsg)
        raise IOError(errMsg)
    if getFileFormat(fn) != FILE_FORMATS.CSV:
        errMsg = "Input file {0} is not a CSV file.".format(path)
        log.error(errMsg)
        raise IOError(errMsg)
    return fn


def checkOutputDir(path):
    """Create an output directory if needed and check it is writable;
    return its real path."""
    dn = real_ppath(path)
    try:
        if not isExist(dn):
            os.makedirs(dn)
    except OSError as e:
        errMsg = "Could not create output directory {0}: {1}".format(path, e)
        log.error(errMsg)
        raise IOError(errMsg)
    if not op.isdir(dn) or not os.access(dn, os.W_OK):
        errMsg = "Output directory {0} is not writable.".format(path)
        log.error(errMsg)
        raise IOError(errMsg)
    return dn


def checkOutputFile(path):
    """Check whether the directory of an output file is writable, create it
    if needed; return the file's real path."""
    fn = real_ppath(path)
    checkOutputDir(op.dirname(fn))
    return fn
