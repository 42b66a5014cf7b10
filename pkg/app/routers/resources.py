import logging

from fastapi import APIRouter, Depends, HTTPException, Request

from app.models.link import LinkEntry, LinkRelation
from app.routers.common import ServiceContext, get_context, representation_response
from app.utils.link_header import format_link_header

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/resource", tags=["resources"])


@router.api_route("/{name:path}", methods=["GET", "HEAD"])
def get_original(name: str, request: Request, context: ServiceContext = Depends(get_context)):
    """
    Current representation of an original resource.

    The Link header points at the resource's TimeGate and TimeBundle.
    """
    subject = context.uris.subject_for_name(name)
    if not context.archive.has_subject(subject):
        raise HTTPException(status_code=404, detail=f"Resource not found: {subject}")

    links = format_link_header([
        LinkEntry(target=context.uris.timegate(subject), rels=[LinkRelation.timegate]),
        LinkEntry(target=context.uris.timebundle(subject), rels=[LinkRelation.timebundle]),
    ])
    representation = context.archive.current(subject)
    if representation is None:
        # Archived only: the original is gone but its past versions are still reachable.
        raise HTTPException(status_code=404, detail=f"No current version of {subject}", headers={"Link": links})

    logger.debug(f"Serving current representation of {subject}")
    return representation_response(request, context, representation, subject, {"Link": links})
