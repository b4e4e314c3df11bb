"""Exception hierarchy. Every engine error carries a stable string ``code``
and a process exit status used by the CLI."""


class MonoasymError(Exception):
    code = "error"
    exit_status = 2


class InputError(MonoasymError):
    code = "input-error"


class SingularMatrixError(MonoasymError):
    code = "singular-matrix"


class DivergentRecursionError(MonoasymError):
    code = "divergent-recursion"


class EmptyConeError(MonoasymError):
    code = "empty-cone"


class DimensionMismatchError(InputError):
    code = "dimension-mismatch"


class ConstantRatioError(InputError):
    code = "constant-ratio"


class NegativeExponentError(MonoasymError):
    """Invariant breach: a monomial map came out with a negative exponent."""

    code = "negative-exponent"


class DuplicatePhaseError(InputError):
    code = "duplicate-phase"


class IncomparablePhasesError(MonoasymError):
    code = "incomparable-phases"


class UnsupportedSignedPhaseError(InputError):
    code = "unsupported-signed-phase"


class NotExactEverywhereError(InputError):
    code = "not-exact-everywhere"


class ParseError(InputError):
    code = "syntax-error"

    def __init__(self, message, column=None):
        self.column = column
        if column is not None:
            message = f"{message} (column {column})"
        super().__init__(message)


class NegativeExponentForbiddenError(ParseError):
    code = "negative-exponent-forbidden"


class BudgetError(MonoasymError):
    exit_status = 3


class DimensionTooLargeError(BudgetError):
    code = "dimension-too-large"


class LambdaTooLargeError(BudgetError):
    code = "lambda-too-large"


class InsufficientSpanError(InputError):
    code = "insufficient-span"
