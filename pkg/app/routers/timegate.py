import json
import logging

from fastapi import APIRouter, Depends, HTTPException, Request
from pydantic import ValidationError

from app.exceptions import MalformedDate, UnknownSubject
from app.models.negotiation import DecisionKind, NegotiationRequest
from app.routers.common import ServiceContext, get_context, http_response, request_subject
from app.utils.conneg import media_preferences
from app.utils.http_date import format_http_date, parse_http_date
from app.utils.link_header import format_link_header

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/timegate", tags=["timegate"])

TIMEGATE_VARY = "negotiate, accept-datetime"


def wants_choices(negotiate: str) -> bool:
    return "1.0" in [token.strip() for token in negotiate.split(",")]


@router.api_route("/{subject:path}", methods=["GET", "HEAD"])
def timegate(subject: str, request: Request, context: ServiceContext = Depends(get_context)):
    """
    Datetime negotiation for a subject.

    Redirects (302) to the memento valid at Accept-Datetime, or to the original
    resource for the current version. ``Negotiate: 1.0`` lists every memento (300).
    """
    subject = request_subject(request, "/timegate/", subject)
    raw_datetime = request.headers.get("accept-datetime")
    try:
        accept_datetime = parse_http_date(raw_datetime.strip()) if raw_datetime is not None else None
        negotiation = NegotiationRequest(
            subject=subject,
            accept_datetime=accept_datetime,
            explicit_negotiate=wants_choices(request.headers.get("negotiate", "")),
            accept_media=media_preferences(request.headers.get("accept")),
        )
    except (MalformedDate, ValidationError) as e:
        raise HTTPException(status_code=400, detail=str(e), headers={"Vary": TIMEGATE_VARY})

    try:
        decision = context.timegate.negotiate(negotiation)
    except UnknownSubject as e:
        raise HTTPException(status_code=404, detail=str(e))

    headers = {"Vary": TIMEGATE_VARY}
    if decision.links:
        headers["Link"] = format_link_header(decision.links)
    logger.debug(f"TimeGate {subject} Accept-Datetime={raw_datetime!r}: {decision.kind.value}")

    if decision.is_redirect:
        headers["Location"] = decision.location
        return http_response(request, status_code=302, headers=headers)

    if decision.kind == DecisionKind.multiple_choices:
        body = "".join(
            f"{record.memento_uri} {format_http_date(record.interval.start)}\n" for record in decision.candidates
        )
        return http_response(
            request, body.encode("utf-8"), status_code=300, headers=headers, media_type="text/plain; charset=utf-8"
        )

    known = decision.known_range
    content = {
        "detail": f"Accept-Datetime {raw_datetime} is outside the range of known mementos",
        "earliest": format_http_date(known.earliest),
        "latest": format_http_date(known.latest),
    }
    return http_response(
        request, json.dumps(content).encode("utf-8"), status_code=406, headers=headers, media_type="application/json"
    )
