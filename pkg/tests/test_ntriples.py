import io

import pytest
from rdflib.term import BNode, Literal, URIRef

from app.exceptions import NTriplesSyntaxError
from app.models.rdf import Triple
from app.utils.ntriples import NTriplesReader, parse_ntriples, select_values, serialize_ntriples

FRANCE = "http://dbpedia.org/resource/France"
GDP = "http://dbpedia.org/property/gdpPppPerCapita"

DOCUMENT = f"""<{FRANCE}> <http://www.w3.org/2000/01/rdf-schema#label> "France"@en .
<{FRANCE}> <{GDP}> "$30,100" .
# a comment line

<{FRANCE}> <{GDP}> "31000"^^<http://www.w3.org/2001/XMLSchema#integer> .
<{FRANCE}> <http://dbpedia.org/property/capital> <http://dbpedia.org/resource/Paris> .
_:b1 <{GDP}> "12" .
""".encode("utf-8")


def test_parse_document():
    triples = list(parse_ntriples(io.BytesIO(DOCUMENT)))
    assert len(triples) == 5
    assert triples[0].object == Literal("France", lang="en")
    assert triples[3].object == URIRef("http://dbpedia.org/resource/Paris")
    assert isinstance(triples[4].subject, BNode)
    assert not triples[4].has_uri_subject
    assert triples[0].has_uri_subject


def test_select_values_keeps_document_order():
    triples = list(parse_ntriples(io.BytesIO(DOCUMENT)))
    assert select_values(triples, FRANCE, GDP) == ["$30,100", "31000"]
    assert select_values(triples, FRANCE, "http://example.org/absent") == []
    # Resource objects are not values.
    assert select_values(triples, FRANCE, "http://dbpedia.org/property/capital") == []


def test_strict_mode_raises_with_line_number():
    stream = io.BytesIO(DOCUMENT + b"<http://a.example/s> oops\n")
    with pytest.raises(NTriplesSyntaxError) as excinfo:
        list(parse_ntriples(stream, strict=True))
    assert excinfo.value.line_number == 8


def test_lenient_mode_counts_skipped_lines():
    stream = io.BytesIO(b"<http://a.example/s> oops\n" + DOCUMENT + b"\xff\xfe broken utf-8\n")
    reader = NTriplesReader(stream, strict=False)
    assert len(list(reader)) == 5
    assert reader.skipped == 2


def test_reads_text_streams():
    triples = list(parse_ntriples(io.StringIO(DOCUMENT.decode("utf-8"))))
    assert len(triples) == 5


def test_serialize_then_parse():
    triples = [
        Triple(URIRef(FRANCE), URIRef(GDP), Literal('say "hi"\nand more')),
        Triple(URIRef(FRANCE), URIRef("http://www.w3.org/2000/01/rdf-schema#label"), Literal("Frankreich", lang="de")),
        Triple(URIRef(FRANCE), URIRef(GDP), Literal("31000", datatype=URIRef("http://www.w3.org/2001/XMLSchema#integer"))),
    ]
    data = serialize_ntriples(triples)
    assert data.count(b"\n") == 3
    assert list(parse_ntriples(io.BytesIO(data))) == triples
