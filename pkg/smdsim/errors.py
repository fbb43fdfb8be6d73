"""This module contains the exceptions raised by smdsim."""


ERR_NOT_FINITE = "Argument '{}' contains non-finite entries."
ERR_DIMENSION = "Argument '{}' has shape {}, expected a vector of length {}."
ERR_POSITIVE = "Argument '{}' must be positive, got {}."


class SmdsimError(Exception):
    """Base class of all errors raised by smdsim."""


class InputError(SmdsimError, ValueError):
    """Raised for malformed arguments: NaN vectors, non-positive constants,
    wrong dimensions.

    """


class DomainError(SmdsimError, ValueError):
    """Raised when a point lies outside the set an operation is defined on.
    The message names the violated constraint.

    """


class ConfigurationError(SmdsimError, ValueError):
    """Raised when runner settings contradict the problem they are applied
    to, e.g. a decaying step rule without strong convexity. `field` names
    the offending setting when the error stems from an experiment
    configuration.

    """

    def __init__(self, message, field=None):
        super(ConfigurationError, self).__init__(message)
        self.field = field


class ProtocolError(SmdsimError, ValueError):
    """Raised when a loss stream breaks its declared bound."""


class RunAborted(SmdsimError, RuntimeError):
    """Raised when a solver run cannot continue. Carries the step index and,
    for aggregated runs, the trajectory index.

    """

    def __init__(self, message, step=None, trajectory=None):
        super(RunAborted, self).__init__(message)
        self.step = step
        self.trajectory = trajectory


def check_positive(name, value):
    """Return `value` as float or raise InputError when it is not a finite
    positive number.

    """

    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InputError(ERR_POSITIVE.format(name, value))

    if not value > 0 or value == float("inf"):
        raise InputError(ERR_POSITIVE.format(name, value))

    return value
