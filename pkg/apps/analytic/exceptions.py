from core.exceptions import BfsBiasError


class DomainError(BfsBiasError):
    """An argument lies outside the range a formula is stated for."""


class SummationError(BfsBiasError):
    pass
