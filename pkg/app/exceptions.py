from datetime import datetime
from typing import Optional


class MementoError(Exception):
    """Base class for every error raised by the archive, service and client."""


# Wire formats

class MalformedDate(MementoError, ValueError):
    pass


class MalformedLink(MementoError, ValueError):
    pass


class NTriplesSyntaxError(MementoError, ValueError):
    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class MalformedTimeMap(MementoError, ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class SeriesSpecError(MementoError, ValueError):
    pass


# Archive

class IngestError(MementoError):
    pass


class DateOrderError(IngestError):
    pass


class UnknownSubject(MementoError, LookupError):
    def __init__(self, subject: str):
        super().__init__(f"Unknown subject: {subject}")
        self.subject = subject


# Client

class MementoClientError(MementoError):
    pass


class NoTimeGate(MementoClientError):
    pass


class NoOriginalLink(MementoClientError):
    pass


class TooManyRedirects(MementoClientError):
    pass


class TransportError(MementoClientError):
    def __init__(self, message: str, status_code: Optional[int] = None):
        super().__init__(message)
        self.status_code = status_code


class OutOfRange(MementoClientError):
    """The TimeGate answered 406: the requested datetime precedes every Memento."""

    def __init__(self, message: str, earliest: Optional[datetime] = None, latest: Optional[datetime] = None):
        super().__init__(message)
        self.earliest = earliest
        self.latest = latest
