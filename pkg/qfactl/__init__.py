"""qfactl - A CLI tool for measure-many quantum finite automata."""

from importlib.metadata import version, PackageNotFoundError

try:
    __version__ = version("qfactl")
except PackageNotFoundError:
    # Not installed, e.g. when running from a source checkout.
    __version__ = "unknown"
