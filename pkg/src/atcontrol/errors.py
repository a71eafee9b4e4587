"""Exception and warning types raised across the package."""


class ATControlError(Exception):
    """Base class for all package errors."""


class DomainError(ATControlError, ValueError):
    """A parameter lies outside the domain of the requested operation."""


class SingularReductionError(DomainError):
    """Adiabatic elimination of |2> requested at zero control detuning."""


class DegenerateBasisError(DomainError):
    """The dressed basis is undefined (no control-laser coupling)."""


class ContractViolation(ATControlError, ValueError):
    """Input violates a structural contract, e.g. a non-Hermitian matrix."""


class DegeneracyError(ATControlError):
    """Instantaneous spectrum is degenerate where a gap is required."""

    def __init__(self, message, pair=None, tau=None):
        super().__init__(message)
        self.pair = pair
        self.tau = tau


class ResolutionError(ATControlError):
    """Eigenframe tracking failed to converge inside a tau interval."""

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class NotFoundError(ATControlError, LookupError):
    """A requested feature (minimum, label, figure) does not exist."""


class IntegrationError(ATControlError):
    """The ODE integrator failed or violated its norm budget."""

    def __init__(self, message, tau=None):
        super().__init__(message)
        self.tau = tau


class StiffnessError(IntegrationError):
    """Step size underflow during integration."""


class ScenarioError(ATControlError, ValueError):
    """Invalid or unreadable scenario configuration."""


class EliminationWarning(UserWarning):
    """Control detuning is too small for a trustworthy three-level reduction."""
