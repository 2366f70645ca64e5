"""Exception hierarchy.

Model errors map to CLI exit code 3, description errors to exit code 2.
"""


class AMOperatorsError(Exception):
    """Base class for every error raised by the package."""


class OperatorModelError(AMOperatorsError, ValueError):
    """An operator model violates one of its invariants."""


class RangeNotClosedError(OperatorModelError):
    """The pseudoinverse is unbounded because 0 accumulates in the spectrum."""


class InvertibilityError(OperatorModelError):
    """0 lies in the spectrum, so the inverse does not exist."""


class FiniteDimensionalError(OperatorModelError):
    """The essential spectrum is empty; treat the operator as finite-rank."""


class DecompositionError(OperatorModelError):
    """A spectral decomposition was refused or is inconsistent."""


class NotPositiveSemidefiniteError(OperatorModelError):
    """A finite block expected to be positive semidefinite is not."""


class NotAMError(OperatorModelError):
    """An operation that needs an AM operator received one that is not AM."""


class DescriptionError(AMOperatorsError):
    """Base class for problems with an operator-description document."""


class DescriptionSyntaxError(DescriptionError):
    """The document is not well-formed JSON or YAML."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        location = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{location}")
        self.line = line
        self.column = column


class DescriptionSchemaError(DescriptionError):
    """The document is well-formed but does not match the description schema."""


class UnknownSuiteError(AMOperatorsError, KeyError):
    """No property suite is registered under the requested name."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown suite"
