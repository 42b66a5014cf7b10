import re

from fastapi import APIRouter, Depends, HTTPException, Request

from app.models.link import LinkEntry, LinkRelation
from app.routers.common import ServiceContext, get_context, representation_response, request_subject
from app.services.timegate_service import memento_navigation_links
from app.utils.http_date import format_http_date
from app.utils.link_header import format_link_header

router = APIRouter(prefix="/memento", tags=["mementos"])

_PATH_DATE = re.compile(r"\d{8}")


@router.api_route("/{date}/{subject:path}", methods=["GET", "HEAD"])
def get_memento(date: str, subject: str, request: Request, context: ServiceContext = Depends(get_context)):
    """Archived representation; Content-Datetime is the start of its validity interval."""
    subject = request_subject(request, f"/memento/{date}/", subject)
    record = context.archive.record_by_date(subject, date) if _PATH_DATE.fullmatch(date) else None
    if record is None:
        raise HTTPException(status_code=404, detail=f"No memento of {subject} on {date}")

    links = memento_navigation_links(context.archive, context.uris, subject, record) + [
        LinkEntry(target=context.uris.timegate(subject), rels=[LinkRelation.timegate]),
        LinkEntry(target=context.uris.timebundle(subject), rels=[LinkRelation.timebundle]),
    ]
    headers = {
        "Content-Datetime": format_http_date(record.interval.start),
        "Link": format_link_header(links),
    }
    return representation_response(
        request, context, record.representation, subject, headers, content_datetime=record.interval.start
    )
