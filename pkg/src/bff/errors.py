"""Exception hierarchy shared by every module."""


class BFFError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(BFFError, ValueError):
    """An argument lies outside the domain of the requested computation."""


class NumericalError(BFFError, ArithmeticError):
    """A numerical routine (quadrature, root search) failed to converge."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics

    def __str__(self):
        base = super().__str__()
        if not self.diagnostics:
            return base
        extra = ", ".join(f"{k}={v!r}" for k, v in self.diagnostics.items())
        return f"{base} ({extra})"


class ParseError(BFFError, ValueError):
    """Malformed input record."""

    def __init__(self, message, row=None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row
