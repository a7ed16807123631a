"""Exception hierarchy. The CLI maps every SelbergError to exit status 2."""


class SelbergError(Exception):
    pass


class DomainError(SelbergError, ValueError):
    """An argument lies outside the region where the quantity is defined."""


class IncompleteDataError(SelbergError):
    """Coefficients or zeros are not available far enough."""


class NumericError(SelbergError, ArithmeticError):
    """A quadrature or series failed to reach the requested accuracy."""

    def __init__(self, msg, achieved=None):
        super().__init__(msg)
        self.achieved = achieved


class FormatError(SelbergError):
    def __init__(self, msg, line=None, path=None):
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(where + msg)
        self.line = line
        self.path = path


class ResourceError(SelbergError, MemoryError):
    """A requested table would not fit in memory."""
