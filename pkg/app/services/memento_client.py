import logging
from datetime import datetime
from typing import Dict, List, Optional
from urllib.parse import urljoin

import httpx

from app.exceptions import (
    MalformedDate,
    MalformedLink,
    MalformedTimeMap,
    MementoClientError,
    NoOriginalLink,
    NoTimeGate,
    OutOfRange,
    TooManyRedirects,
    TransportError,
)
from app.models.link import LinkEntry, LinkRelation
from app.models.memento import MementoResponse
from app.models.temporal import VersionInterval, to_utc
from app.models.timemap import TimeMapDoc
from app.services.timemap_service import TIMEMAP_MEDIA_TYPE, parse_rdfxml
from app.utils.http_date import format_http_date, parse_http_date
from app.utils.link_header import find_rel, parse_link_header

logger = logging.getLogger(__name__)

DEFAULT_MEDIA = "application/rdf+xml"
REDIRECT_CODES = (301, 302, 303, 307, 308)


def response_links(response: httpx.Response) -> List[LinkEntry]:
    raw = response.headers.get("link")
    if not raw:
        return []
    try:
        return parse_link_header(raw, base=str(response.url))
    except MalformedLink as e:
        logger.warning(f"Ignoring malformed Link header from {response.url}: {e}")
        return []


def varies_on_datetime(response: httpx.Response) -> bool:
    vary = response.headers.get("vary", "")
    return "accept-datetime" in [token.strip().lower() for token in vary.split(",")]


class MementoClient:
    """Follow-your-nose Memento client.

    Finds the TimeGate of a resource from its Link header, negotiates with
    Accept-Datetime and follows redirects by hand so each hop can be inspected.
    One instance performs one request sequence at a time.
    """

    def __init__(
        self,
        http: Optional[httpx.Client] = None,
        max_redirects: int = 5,
        timegate_base: Optional[str] = None,
        verify_coverage: bool = False,
        timeout: float = 30.0,
    ):
        self.http = http or httpx.Client(timeout=timeout, follow_redirects=False)
        self.max_redirects = max_redirects
        self.timegate_base = timegate_base
        self.verify_coverage = verify_coverage

    def close(self) -> None:
        self.http.close()

    def __enter__(self) -> "MementoClient":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    def _request(self, method: str, uri: str, headers: Optional[Dict[str, str]] = None) -> httpx.Response:
        try:
            response = self.http.request(method, uri, headers=headers or {}, follow_redirects=False)
        except httpx.HTTPError as e:
            raise TransportError(f"{method} {uri} failed: {e}")
        logger.debug(f"{method} {uri} -> {response.status_code}")
        return response

    def _head_or_get(self, uri: str) -> httpx.Response:
        """HEAD, falling back to GET for servers that mishandle HEAD."""
        try:
            response = self._request("HEAD", uri)
            if response.status_code not in (405, 501):
                return response
        except TransportError as e:
            logger.debug(f"HEAD failed, retrying with GET: {e}")
        return self._request("GET", uri)

    def discover_timegate(self, uri: str) -> str:
        current = uri
        for _ in range(self.max_redirects + 1):
            response = self._head_or_get(current)
            timegate = find_rel(response_links(response), LinkRelation.timegate)
            if timegate:
                logger.debug(f"TimeGate of {uri}: {timegate}")
                return timegate

            location = response.headers.get("location")
            if response.status_code in REDIRECT_CODES and location:
                if varies_on_datetime(response):
                    # A redirect varying on Accept-Datetime comes from a TimeGate.
                    return current
                current = urljoin(current, location)
                continue

            if self.timegate_base:
                return f"{self.timegate_base}{uri}"
            if response.status_code >= 400:
                raise TransportError(f"{uri} answered {response.status_code}", status_code=response.status_code)
            raise NoTimeGate(f"No rel=\"timegate\" Link for {uri}")
        raise TooManyRedirects(f"More than {self.max_redirects} redirects discovering the TimeGate of {uri}")

    def fetch_at(self, uri: str, t: datetime, media: str = DEFAULT_MEDIA) -> MementoResponse:
        """The representation of ``uri`` as it was at ``t``, via its TimeGate."""
        t = to_utc(t)
        timegate = self.discover_timegate(uri)
        headers = {"Accept": media, "Accept-Datetime": format_http_date(t)}
        return self._follow(timegate, headers, requested=t)

    def renavigate(self, memento_uri: str, t: datetime, media: str = DEFAULT_MEDIA) -> MementoResponse:
        """From any version of a resource to its version at ``t``."""
        links = response_links(self._head_or_get(memento_uri))
        original = find_rel(links, LinkRelation.original)
        if original is None:
            if find_rel(links, LinkRelation.timegate) is None:
                raise NoOriginalLink(f"No rel=\"original\" Link for {memento_uri}")
            # An original resource is its own original.
            original = memento_uri
        return self.fetch_at(original, t, media)

    def get(self, uri: str, t: Optional[datetime] = None, media: str = DEFAULT_MEDIA) -> MementoResponse:
        if t is None:
            return self._follow(uri, {"Accept": media})
        return self.fetch_at(uri, t, media)

    def _follow(self, uri: str, headers: Dict[str, str], requested: Optional[datetime] = None) -> MementoResponse:
        current = uri
        hops = 0
        while True:
            response = self._request("GET", current, headers)
            status = response.status_code

            if status == 300:
                target = find_rel(response_links(response), "memento") or _first_listed(response)
                if target is None:
                    raise TransportError(f"{current} answered 300 without candidates", status_code=status)
                next_uri = urljoin(current, target)
            elif status in REDIRECT_CODES and response.headers.get("location"):
                next_uri = urljoin(current, response.headers["location"])
            elif status == 406 and varies_on_datetime(response):
                raise _out_of_range(response, headers.get("Accept-Datetime"))
            elif status >= 400 or status in REDIRECT_CODES:
                raise TransportError(f"GET {current} answered {status}", status_code=status)
            else:
                return self._final(response, current, hops, requested)

            hops += 1
            if hops > self.max_redirects:
                raise TooManyRedirects(f"More than {self.max_redirects} redirects from {uri}")
            logger.debug(f"Hop {hops}: {current} -> {next_uri}")
            current = next_uri

    def _final(
        self, response: httpx.Response, uri: str, hops: int, requested: Optional[datetime]
    ) -> MementoResponse:
        links = response_links(response)
        content_datetime = None
        raw = response.headers.get("content-datetime")
        if raw:
            try:
                content_datetime = parse_http_date(raw)
            except MalformedDate as e:
                logger.warning(f"Ignoring Content-Datetime of {uri}: {e}")

        result = MementoResponse(
            final_uri=uri,
            body=response.content,
            media_type=response.headers.get("content-type", "").split(";")[0].strip(),
            content_datetime=content_datetime,
            links=links,
            hops=hops,
            requested_datetime=requested,
        )
        if requested is not None and content_datetime is not None and self._outside_coverage(result):
            logger.warning(
                f"{uri} (Content-Datetime {format_http_date(content_datetime)}) "
                f"may not cover {format_http_date(requested)}"
            )
            result.coverage_warning = True
        return result

    def _outside_coverage(self, result: MementoResponse) -> bool:
        if result.content_datetime > result.requested_datetime:
            return True
        if not self.verify_coverage:
            return False
        # A memento served under the last-known-state rule starts before t but may have ended before it.
        interval = self._validity(result)
        return interval is not None and not interval.covers(result.requested_datetime)

    def timemap_of(self, result: MementoResponse) -> Optional[TimeMapDoc]:
        """The TimeMap reached through the rel="timebundle" Link of a response, if any."""
        timebundle = find_rel(result.links, LinkRelation.timebundle)
        if timebundle is None:
            return None
        try:
            timemap = self._follow(timebundle, {"Accept": TIMEMAP_MEDIA_TYPE})
            return parse_rdfxml(timemap.body)
        except (MementoClientError, MalformedTimeMap) as e:
            logger.warning(f"Cannot read the TimeMap of {result.final_uri}: {e}")
            return None

    def _validity(self, result: MementoResponse) -> Optional[VersionInterval]:
        doc = self.timemap_of(result)
        if doc is None:
            return None
        return next((memento.interval for memento in doc.mementos if memento.uri == result.final_uri), None)


def _first_listed(response: httpx.Response) -> Optional[str]:
    for line in response.text.splitlines():
        if line.strip():
            return line.split()[0]
    return None


def _out_of_range(response: httpx.Response, requested: Optional[str]) -> OutOfRange:
    earliest = latest = None
    detail = f"Accept-Datetime {requested} is outside the range of known mementos"
    try:
        body = response.json()
        detail = body.get("detail", detail)
        earliest = parse_http_date(body["earliest"]) if body.get("earliest") else None
        latest = parse_http_date(body["latest"]) if body.get("latest") else None
    except (ValueError, AttributeError) as e:
        logger.debug(f"Unreadable 406 body from {response.url}: {e}")
    return OutOfRange(detail, earliest=earliest, latest=latest)
