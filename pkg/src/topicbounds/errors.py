"""Exception types shared across the package."""


class TopicBoundsError(Exception):
    """Base class for all package errors."""


class ParameterError(TopicBoundsError, ValueError):
    """An argument is outside the domain the operation accepts."""


class DataError(TopicBoundsError, ValueError):
    """Input data is malformed, empty or non-finite."""


class FormatError(DataError):
    """A file does not follow the expected on-disk layout.

    ``line`` is the 1-based line number of the offending line, when known.
    """

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}"
        super().__init__(f"{where}: {message}" if where else message)
