"""Exception hierarchy shared by all nemflow modules."""


class NemflowError(Exception):
    """Base class for every error raised by nemflow."""


class ConfigurationError(NemflowError, ValueError):
    """Invalid grid, parameter, policy or run configuration."""


class NumericalInputError(NemflowError, ValueError):
    """Non-finite values handed to a numerical kernel."""


class SymmetryError(NemflowError, ValueError):
    """Spectral coefficients that do not describe a real field."""


class DegeneracyError(NemflowError, ArithmeticError):
    """Director magnitude collapsed below the renormalisation floor."""


class InconsistencyError(NemflowError, ArithmeticError):
    """Mutually contradictory norms, i.e. numerically corrupted data."""


class BlowUpError(NemflowError, ArithmeticError):
    """NaN/Inf produced by time stepping.

    ``last_good_time`` is the time of the last finite state and
    ``trajectory`` carries whatever was sampled before the failure.
    """

    def __init__(self, message, last_good_time, trajectory=None):
        super().__init__(message)
        self.last_good_time = last_good_time
        self.trajectory = trajectory


class CheckpointError(NemflowError, ValueError):
    """Malformed, truncated or version-mismatched checkpoint file."""
