"""Exception hierarchy for floqspin."""


class FloqspinError(Exception):
    """Base class for all floqspin errors."""


class ConfigError(FloqspinError):
    """Invalid configuration: bad grid sizes, axis definitions, mismatched inputs."""


class IntegrationError(FloqspinError):
    """Propagator integration produced non-finite entries.

    Carries the step index at which the failure was detected.
    """

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class InvariantError(FloqspinError):
    """A structural invariant (unitarity, normalization, ...) was violated."""


class DomainError(FloqspinError):
    """Argument outside the supported domain of an operation."""


class SingularityError(FloqspinError):
    """Evaluation requested exactly at a pole (e.g. Bose occupation at zero)."""


class NoRelaxationError(FloqspinError):
    """All transition rates vanish; the stationary state is undefined."""
