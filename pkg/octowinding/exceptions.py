class WindingError(Exception):
    """Base class for every error raised by octowinding."""


class DomainError(WindingError, ValueError):
    """An argument lies outside the domain of the operation."""


class SimulationError(WindingError):
    """A simulated path left its domain or chart."""

    def __init__(self, message, exit_time=None, path_index=None):
        super(SimulationError, self).__init__(message)
        self.exit_time = exit_time
        self.path_index = path_index

    def __str__(self):
        msg = super(SimulationError, self).__str__()
        details = []
        if self.path_index is not None:
            details.append("path %d" % self.path_index)
        if self.exit_time is not None:
            details.append("t=%.6g" % self.exit_time)
        if details:
            msg = "%s (%s)" % (msg, ", ".join(details))
        return msg


class SeriesError(WindingError):
    """A power series did not converge within its term cap, or overflowed."""

    def __init__(self, message, n_terms=None, last_ratio=None):
        super(SeriesError, self).__init__(message)
        self.n_terms = n_terms
        self.last_ratio = last_ratio


class QuadratureError(WindingError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message, abserr=None, n_evals=None, upper=None):
        super(QuadratureError, self).__init__(message)
        self.abserr = abserr
        self.n_evals = n_evals
        self.upper = upper


class ConfigError(WindingError):
    """An experiment configuration failed validation.

    ``violations`` lists every problem found, not just the first one.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super(ConfigError, self).__init__("; ".join(self.violations))
