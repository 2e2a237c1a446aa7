"""Exception hierarchy shared across the toolkit."""


class AgoraError(Exception):
    """Base class for all toolkit errors."""


# -- collection / sources ----------------------------------------------------

class AuthError(AgoraError):
    """The API rejected the bearer token; not retryable."""


class QuerySyntaxError(AgoraError):
    """The API rejected the request itself (4xx other than 429)."""


class SourceExhaustedRetries(AgoraError):
    """A page fetch kept failing transiently past the retry budget."""


class UnknownAccount(AgoraError):
    """The requested account does not exist in the source or store."""


class FileMissing(AgoraError):
    """A replay or input file does not exist."""


class MalformedLine(AgoraError):
    """A replay file line is not a valid page object."""

    def __init__(self, line_no: int, reason: str = ""):
        self.line_no = line_no
        self.reason = reason
        msg = f"malformed replay line {line_no}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


# -- store -------------------------------------------------------------------

class StorageIO(AgoraError):
    """Underlying filesystem operation failed."""


class UnknownDiscussion(AgoraError):
    """No tweets stored under the requested discussion key."""


# -- graph file formats ------------------------------------------------------

class GraphFormatError(AgoraError):
    """Base class for serialization errors."""


class ParseError(GraphFormatError):
    """Input document could not be parsed."""

    def __init__(self, reason: str, line: int = 0, col: int = 0):
        self.reason = reason
        self.line = line
        self.col = col
        if line:
            super().__init__(f"{reason} (line {line}, column {col})")
        else:
            super().__init__(reason)


class UnsupportedVersion(GraphFormatError):
    """Document declares a format version this reader does not handle."""


class DuplicateNodeId(GraphFormatError):
    """Two nodes in the document share an id."""


# -- opinions / polarization -------------------------------------------------

class MoreThanTwoGroups(AgoraError):
    """The +1/-1 opinion mapping needs exactly two labeled groups."""


class EmptySide(AgoraError):
    """One side of the discussion has no usable nodes."""


class UnknownMetric(AgoraError):
    """Requested polarization metric name is not implemented."""


class SolverDivergence(AgoraError):
    """Iterative solver exceeded its iteration cap; indicates a bug."""


# -- configuration -----------------------------------------------------------

class ConfigError(AgoraError):
    """Configuration file or environment override is invalid."""
