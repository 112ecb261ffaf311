"""Exceptions raised by the hamflow tools."""


class HamflowError(Exception):
    """Base class for all hamflow errors."""


class ModelDomainError(HamflowError, ValueError):
    """A model or field was evaluated outside of its domain."""


class NumericalError(HamflowError, ArithmeticError):
    """A non-finite value appeared during evaluation or stepping."""


class GridResolutionError(HamflowError, ValueError):
    """A wave packet is not resolved on its grid."""


class IntegrationError(HamflowError):
    """
    A step failed while integrating a trajectory.

    :param step_index: Index of the step that failed (0 is the first step).
    :param cause: The underlying exception.
    """

    def __init__(self, step_index: int, cause: Exception):
        self.step_index = step_index
        self.cause = cause
        super().__init__(f"Integration failed at step {step_index}: {cause}")


class ScenarioError(HamflowError, ValueError):
    """A scenario could not be parsed or validated."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("Invalid scenario:\n" + "\n".join(f"  - {e}" for e in self.errors))
