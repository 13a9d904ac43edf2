"""Exception hierarchy.

Every error carries a short ``category`` string; the CLI maps categories to
exit codes (config problems exit 2, numerical problems exit 3).
"""


class RamanSimError(Exception):
    category = "numerical"


class ValidationError(RamanSimError, ValueError):
    """Invalid input values (unnormalized qubit, non-positive time, ...)."""

    category = "validation"


class DimensionError(RamanSimError, ValueError):
    category = "dimension"


class TruncationError(RamanSimError):
    """Fock cutoff too small for the requested state."""

    category = "truncation"

    def __init__(self, message, leakage=None):
        super().__init__(message)
        self.leakage = leakage


class DegenerateStateError(RamanSimError):
    category = "degenerate_state"


class AccuracyError(RamanSimError):
    category = "accuracy"


class ImpossibleOutcomeError(RamanSimError):
    category = "impossible_outcome"

    def __init__(self, message, probability=None):
        super().__init__(message)
        self.probability = probability


class InvalidSubspaceError(RamanSimError):
    category = "invalid_subspace"


class IllConditionedBasisError(RamanSimError):
    category = "ill_conditioned_basis"

    def __init__(self, message, condition_number):
        super().__init__(message)
        self.condition_number = condition_number
