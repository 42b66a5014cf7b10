from datetime import datetime
from typing import Dict, Optional

from fastapi import HTTPException, Request, Response

from app.config.settings import MementoUris, ServiceConfig
from app.services.archive_service import Archive
from app.services.render_service import render_service
from app.services.timegate_service import TimeGate
from app.utils.conneg import select_media
from app.utils.http_date import Clock, utc_now
from app.utils.iri import uri_to_iri


class ServiceContext:
    """Everything a request handler needs; built once at startup, read-only afterwards."""

    def __init__(self, settings: ServiceConfig, archive: Archive, clock: Clock = utc_now):
        self.settings = settings
        self.archive = archive
        self.clock = clock
        self.uris = MementoUris.from_settings(settings)
        self.timegate = TimeGate(archive, self.uris, clock)


def get_context(request: Request) -> ServiceContext:
    context = getattr(request.app.state, "memento", None)
    if context is None:
        raise HTTPException(status_code=503, detail="Archive not loaded")
    return context


def request_subject(request: Request, prefix: str, fallback: str) -> str:
    """The subject URI as sent by the client, percent-escapes preserved.

    A ``http:/`` collapsed by an intermediary is repaired, and the query string
    is part of the subject. Escaped non-ASCII characters are decoded to match
    the IRIs stored in the archive.
    """
    raw_path = request.scope.get("raw_path")
    subject = fallback
    if raw_path:
        raw = raw_path.decode("latin-1").split("?", 1)[0]
        if raw.startswith(prefix):
            subject = raw[len(prefix):]
    for scheme in ("http", "https"):
        collapsed = f"{scheme}:/"
        if subject.startswith(collapsed) and not subject.startswith(f"{scheme}://"):
            subject = f"{scheme}://{subject[len(collapsed):]}"
    if request.url.query:
        subject = f"{subject}?{request.url.query}"
    return uri_to_iri(subject)


def http_response(
    request: Request,
    body: bytes = b"",
    status_code: int = 200,
    headers: Optional[Dict[str, str]] = None,
    media_type: Optional[str] = None,
) -> Response:
    """A response whose HEAD variant carries the GET headers and no body."""
    headers = dict(headers or {})
    if request.method == "HEAD":
        headers["content-length"] = str(len(body))
        body = b""
    return Response(content=body, status_code=status_code, headers=headers, media_type=media_type)


def representation_response(
    request: Request,
    context: ServiceContext,
    representation: bytes,
    subject: str,
    headers: Dict[str, str],
    content_datetime: Optional[datetime] = None,
) -> Response:
    media = select_media(
        request.headers.get("accept"), render_service.offered, default=context.settings.default_media_type
    )
    if media is None:
        raise HTTPException(
            status_code=406, detail=f"None of {', '.join(render_service.offered)} is acceptable"
        )
    body = render_service.render(representation, media, subject, content_datetime)
    headers = {**headers, "Vary": "accept"}
    return http_response(request, body, headers=headers, media_type=render_service.content_type(media))
