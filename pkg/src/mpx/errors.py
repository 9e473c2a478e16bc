"""Exception hierarchy shared by every module."""


class MpxError(Exception):
    """Base class for all errors raised by this package."""


class InputError(MpxError):
    """Malformed or inconsistent input (files, expressions, arguments)."""


class ParseError(InputError):
    def __init__(self, message, line=None, column=None, source=None):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        where = ""
        if source:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:{column}:"
        super().__init__(f"{where} {message}".strip() if where else message)


class CapExceeded(MpxError):
    """A configured resource cap (cycles, MAX pieces) was hit."""
