from fastapi import APIRouter, Depends, HTTPException, Request

from app.exceptions import UnknownSubject
from app.models.link import LinkEntry, LinkRelation
from app.routers.common import ServiceContext, get_context, http_response, request_subject
from app.services.timemap_service import TIMEMAP_MEDIA_TYPE, build_timemap, serialize_rdfxml
from app.utils.link_header import format_link_header

router = APIRouter(tags=["timemaps"])

TIMEMAP_FORMATS = {"rdf": TIMEMAP_MEDIA_TYPE}


@router.api_route("/timemap/{fmt}/{subject:path}", methods=["GET", "HEAD"])
def get_timemap(fmt: str, subject: str, request: Request, context: ServiceContext = Depends(get_context)):
    """TimeMap listing every memento of a subject"""
    if fmt not in TIMEMAP_FORMATS:
        raise HTTPException(status_code=406, detail=f"Unknown TimeMap format: {fmt}")
    subject = request_subject(request, f"/timemap/{fmt}/", subject)
    try:
        doc = build_timemap(context.archive, subject, context.uris)
    except UnknownSubject as e:
        raise HTTPException(status_code=404, detail=str(e))

    links = format_link_header([
        LinkEntry(target=context.uris.original(subject), rels=[LinkRelation.original]),
        LinkEntry(target=context.uris.timegate(subject), rels=[LinkRelation.timegate]),
    ])
    return http_response(
        request, serialize_rdfxml(doc), headers={"Link": links}, media_type=TIMEMAP_FORMATS[fmt]
    )


@router.api_route("/timebundle/{subject:path}", methods=["GET", "HEAD"])
def get_timebundle(subject: str, request: Request, context: ServiceContext = Depends(get_context)):
    """TimeBundles have no representation: 303 See Other to the RDF TimeMap"""
    subject = request_subject(request, "/timebundle/", subject)
    if not context.archive.has_mementos(subject):
        raise HTTPException(status_code=404, detail=f"No mementos of {subject}")
    return http_response(request, status_code=303, headers={"Location": context.uris.timemap(subject)})
