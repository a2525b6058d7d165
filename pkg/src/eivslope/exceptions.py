"""Errors raised by `eivslope`.

Every error derives from `EivError` so callers (and the CLI) can separate
problems with the input from numerical failures.

"""


class EivError(Exception): ...


class DomainError(EivError, ValueError): ...


class NonConvergence(EivError, ArithmeticError): ...


class QuadratureFailure(EivError, ArithmeticError): ...


class TooFewPoints(DomainError): ...


class DegenerateVariance(DomainError): ...


class PerfectCorrelation(DomainError): ...


class ZeroCovariance(DomainError): ...


class EstimatorUndefined(EivError): ...


class UnsupportedConfigVersion(EivError, RuntimeError): ...


class ParseError(EivError, ValueError):
    """Raised when an input file cannot be read as two numeric columns."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
