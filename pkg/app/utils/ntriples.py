"""Streaming, line-local N-Triples reading on top of rdflib's term grammar."""
import logging
from typing import IO, Iterable, Iterator, List, Optional, Union

from rdflib.exceptions import ParserError as ParseError
from rdflib.plugins.parsers.ntriples import W3CNTriplesParser
from rdflib.term import Literal, URIRef

from app.exceptions import NTriplesSyntaxError
from app.models.rdf import Triple

logger = logging.getLogger(__name__)


class _LastTripleSink:
    __slots__ = ("last",)

    def __init__(self):
        self.last = None

    def triple(self, s, p, o):
        self.last = (s, p, o)


class NTriplesReader:
    """Lazily yields the triples of an N-Triples stream, one line at a time.

    In strict mode the first malformed line raises NTriplesSyntaxError; otherwise
    malformed lines are counted in ``skipped`` and reading continues.
    """

    def __init__(self, stream: IO, strict: bool = True):
        self.stream = stream
        self.strict = strict
        self.skipped = 0
        self.line_number = 0
        self._sink = _LastTripleSink()
        self._parser = W3CNTriplesParser(sink=self._sink)

    def __iter__(self) -> Iterator[Triple]:
        for raw in self.stream:
            self.line_number += 1
            if isinstance(raw, bytes):
                try:
                    raw = raw.decode("utf-8")
                except UnicodeDecodeError as e:
                    self._fail(f"invalid UTF-8: {e}")
                    continue
            triple = self.parse_line(raw.rstrip("\r\n"))
            if triple is not None:
                yield triple

    def parse_line(self, line: str) -> Optional[Triple]:
        self._sink.last = None
        self._parser.line = line
        try:
            self._parser.parseline()
        except (ParseError, ValueError) as e:
            self._fail(str(e))
            return None
        if self._sink.last is None:
            return None
        return Triple(*self._sink.last)

    def _fail(self, message: str) -> None:
        if self.strict:
            raise NTriplesSyntaxError(self.line_number, message)
        self.skipped += 1
        logger.debug(f"Skipping malformed N-Triples line {self.line_number}: {message}")


def parse_ntriples(stream: IO, strict: bool = True) -> Iterator[Triple]:
    return iter(NTriplesReader(stream, strict=strict))


def serialize_ntriples(triples: Iterable[Triple]) -> bytes:
    return "".join(f"{triple.to_ntriples()}\n" for triple in triples).encode("utf-8")


def select_values(
    triples: Iterable[Triple],
    subject: Union[str, URIRef],
    predicate: Union[str, URIRef],
) -> List[str]:
    """Lexical forms of the literal objects of (subject, predicate), in document order."""
    subject = URIRef(subject)
    predicate = URIRef(predicate)
    return [
        str(triple.object)
        for triple in triples
        if triple.subject == subject and triple.predicate == predicate and isinstance(triple.object, Literal)
    ]
