"""Exception types shared across the package."""


class GchainError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(GchainError, ValueError):
    """An argument violates a documented precondition (range, shape, sign)."""


class ParseError(GchainError, ValueError):
    """An input file cannot be parsed; carries the offending location."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
