class BudgetExceededError(RuntimeError):
    """An enumeration would exceed its configured size budget."""


class ConvergenceError(RuntimeError):
    """An eigen-solver did not reach the requested residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ParseError(ValueError):
    """Malformed input file; ``line`` is the 1-based offending line."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
