from typing import NamedTuple, Union

from rdflib.term import BNode, Literal, URIRef


class Triple(NamedTuple):
    subject: Union[URIRef, BNode]
    predicate: URIRef
    object: Union[URIRef, BNode, Literal]

    @property
    def has_uri_subject(self) -> bool:
        return isinstance(self.subject, URIRef)

    def to_ntriples(self) -> str:
        return f"{self.subject.n3()} {self.predicate.n3()} {self.object.n3()} ."
