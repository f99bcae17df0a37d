"""Exception hierarchy shared by every insep module."""

from typing import List, Optional


class InsepError(Exception):
    """Base class for all library errors."""


class InputError(InsepError):
    """Malformed user input. The CLI maps these to exit status 2."""


class ExpressionSyntaxError(InputError):
    def __init__(self, message: str, source: str, position: int):
        self.source = source
        self.position = position
        super().__init__(f"{message} at position {position}: {source!r}")


class UnknownVariableError(InputError):
    def __init__(self, name: str, position: Optional[int] = None):
        self.name = name
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"unknown variable {name!r}{where}")


class ExponentOverflowError(InputError):
    pass


class DescriptorError(InputError):
    pass


class PreconditionError(InsepError):
    """A mathematical precondition of an operation does not hold."""


class DegenerateSizeError(PreconditionError):
    pass


class NotInvertibleError(PreconditionError):
    pass


class ZeroDerivationError(PreconditionError):
    pass


class InvalidDerivationError(PreconditionError):
    """The derivation does not descend to the quotient ring."""


class DerivationTypeError(PreconditionError):
    pass


class UnsupportedStabilityError(PreconditionError):
    pass


class InternalInconsistencyError(InsepError):
    """A postcondition failed. Always a bug or a broken input table."""


class ValidationFailure(InsepError):
    """Raised by ``Report.raise_for_status`` when a report holds FAIL records."""

    def __init__(self, failures: List["object"]):
        self.failures = failures
        names = ", ".join(sorted({getattr(r, "name", "?") for r in failures}))
        super().__init__(f"{len(failures)} failed check(s): {names}")
