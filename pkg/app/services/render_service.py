import html
import io
from datetime import datetime
from functools import lru_cache
from typing import Optional

from rdflib import Graph

from app.utils.conneg import N_TRIPLES, RDF_XML, REPRESENTATION_TYPES, TEXT_HTML, TEXT_PLAIN, TURTLE
from app.utils.http_date import format_http_date
from app.utils.ntriples import parse_ntriples

_RDFLIB_FORMATS = {RDF_XML: "xml", TURTLE: "turtle"}


class RenderService:
    """Renders stored N-Triples representations into the offered media types."""

    offered = REPRESENTATION_TYPES

    def content_type(self, media_type: str) -> str:
        if media_type in (TEXT_HTML, TEXT_PLAIN, TURTLE):
            return f"{media_type}; charset=utf-8"
        return media_type

    def render(
        self, representation: bytes, media_type: str, subject: str, content_datetime: Optional[datetime] = None
    ) -> bytes:
        if media_type in (N_TRIPLES, TEXT_PLAIN):
            return representation
        if media_type in _RDFLIB_FORMATS:
            return _serialize_graph(representation, _RDFLIB_FORMATS[media_type])
        if media_type == TEXT_HTML:
            return self.render_html(representation, subject, content_datetime)
        raise ValueError(f"Unsupported media type: {media_type}")

    def render_html(self, representation: bytes, subject: str, content_datetime: Optional[datetime] = None) -> bytes:
        rows = []
        for triple in parse_ntriples(io.BytesIO(representation), strict=False):
            if str(triple.subject) != subject:
                continue
            rows.append(
                f"<tr><td>{html.escape(str(triple.predicate))}</td>"
                f"<td>{html.escape(str(triple.object))}</td></tr>"
            )
        title = html.escape(subject)
        when = ""
        if content_datetime is not None:
            when = f"<p>Version of {html.escape(format_http_date(content_datetime))}</p>"
        page = (
            f"<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>{title}</title></head>\n"
            f"<body><h1>{title}</h1>{when}\n"
            f"<table><tr><th>Property</th><th>Value</th></tr>\n" + "\n".join(rows) + "\n</table></body></html>\n"
        )
        return page.encode("utf-8")


@lru_cache(maxsize=256)
def _serialize_graph(representation: bytes, rdflib_format: str) -> bytes:
    graph = Graph()
    graph.parse(data=representation.decode("utf-8"), format="nt")
    return graph.serialize(format=rdflib_format, encoding="utf-8")


# Global service instance
render_service = RenderService()
