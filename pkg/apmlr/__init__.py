"""Initialization."""

VERSION = (0, 3, 0)


def get_version():
    """Return the version as a string. "0.3.0"

    This uses a major.minor.patch scheme; every module of the package reports
    this single version.
    """
    return ".".join([str(i) for i in VERSION])
