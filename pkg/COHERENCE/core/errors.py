class CoherenceError(ValueError):
    """Base class for every invalid input or failed numerical contract."""

    invariant = "coherence"

    def __init__(self, message: str):
        super().__init__(f"{self.invariant}: {message}")
        self.message = message


class NotSquare(CoherenceError):
    invariant = "NotSquare"


class NotFinite(CoherenceError):
    invariant = "NotFinite"


class NotHermitian(CoherenceError):
    invariant = "NotHermitian"


class NotPositive(CoherenceError):
    invariant = "NotPositive"


class TraceNotOne(CoherenceError):
    invariant = "TraceNotOne"


class DimensionMismatch(CoherenceError):
    invariant = "DimensionMismatch"


class DimensionTooSmall(CoherenceError):
    invariant = "DimensionTooSmall"


class DimensionTooLarge(CoherenceError):
    invariant = "DimensionTooLarge"


class ConvergenceFailure(CoherenceError):
    invariant = "ConvergenceFailure"


class AlphaOutOfRange(CoherenceError):
    invariant = "AlphaOutOfRange"


class DegenerateState(CoherenceError):
    invariant = "DegenerateState"


class BudgetExhausted(CoherenceError):
    invariant = "BudgetExhausted"


class IncompleteChannel(CoherenceError):
    invariant = "IncompleteChannel"


class NotIncoherent(CoherenceError):
    invariant = "NotIncoherent"


class PositivityViolation(CoherenceError):
    invariant = "PositivityViolation"


class MatrixFormatError(CoherenceError):
    invariant = "MatrixFormatError"


class ScenarioMismatch(CoherenceError):
    invariant = "ScenarioMismatch"
