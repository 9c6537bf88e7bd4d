"""Exception hierarchy shared by every module.

The command line maps these classes onto exit codes, so library code raises
the most specific class that describes the failure.
"""


class TfopError(Exception):
    """Base class for all toolkit errors."""


class InvalidInputError(TfopError, ValueError):
    """Input values or arguments violate a documented precondition."""


class GridMismatchError(InvalidInputError):
    """Two objects that must share a grid were built on different grids."""


class FitnessError(TfopError):
    """A sampled object is not resolved well enough for the requested operation.

    Raised when an amplitude or window does not decay at the box edge or has
    spectral content at the Nyquist boundary, which would otherwise turn into
    silent wrap-around or aliasing errors.
    """


class NumericalFailure(TfopError):
    """A numerical quantity is degenerate, ill-conditioned or non-finite."""


class ConfigError(TfopError):
    """An experiment configuration could not be parsed or validated."""
