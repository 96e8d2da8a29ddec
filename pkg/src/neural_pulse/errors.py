"""Exception hierarchy.

Every error carries an ``exit_code`` so the CLI can map failures onto its
stable contract: 1 for hypothesis/config problems, 2 for numerical failures,
3 for verification failures.
"""


class NeuralPulseError(Exception):
    exit_code = 2


class ParameterError(NeuralPulseError, ValueError):
    exit_code = 1


class FormatError(NeuralPulseError, ValueError):
    exit_code = 1


class ConfigError(NeuralPulseError, ValueError):
    exit_code = 1


class HypothesisError(NeuralPulseError):
    """A standing assumption on (K, theta, gamma) fails."""

    exit_code = 1


class DomainError(NeuralPulseError, ValueError):
    """A closed-form kernel was evaluated outside x <= 0."""

    exit_code = 2


class RegimeError(NeuralPulseError):
    """Eigenvalues of the linear part are complex (not the fast-pulse regime)."""

    exit_code = 1


class NumericalError(NeuralPulseError):
    exit_code = 2


class QuadratureError(NumericalError):
    pass


class FrontExistenceError(NumericalError):
    """No sign change of phi_f - theta was found."""


class ConsistencyError(NumericalError):
    """Computed quantities contradict a property that must hold."""


class SolveError(NumericalError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace or [])


class ConditioningError(NumericalError):
    pass


class ResolutionError(NumericalError):
    pass


class InstabilityError(NumericalError):
    pass


class DomainSizeError(NumericalError):
    pass


class VerificationError(NeuralPulseError):
    exit_code = 3
