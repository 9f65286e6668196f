"""Exception hierarchy shared by the library and the command line front end.

The CLI maps these onto its stable exit codes: configuration problems exit
with 2, resource-budget violations with 3, and internal tolerance failures
(a numerical routine that cannot meet its own rigor requirements) with 4.
"""


class MeanvalError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(MeanvalError, ValueError):
    """Invalid parameters or options (CLI exit code 2)."""


class InsufficientDataError(ConfigError):
    """Not enough data points to run a requested estimation."""


class ResourceError(MeanvalError):
    """A computation would exceed the configured memory budget (exit code 3)."""


class ToleranceError(MeanvalError):
    """An internal rigor check failed (exit code 4)."""


class PrecisionError(ToleranceError):
    """A requested tolerance is unachievable at the working precision."""
