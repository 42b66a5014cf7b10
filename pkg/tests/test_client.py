from datetime import datetime, timedelta

import httpx
import pytest

from app.exceptions import NoOriginalLink, NoTimeGate, OutOfRange, TooManyRedirects, TransportError
from app.models.memento import LookupKind
from app.services.memento_client import MementoClient, response_links, varies_on_datetime
from app.utils.link_header import find_rel
from tests.snapshots import FRANCE, GREECE, GREECE_ESCAPED, ITALY, NOW, SNAPSHOT_DATES, UTC

ORIGINAL = "http://testserver/resource/France"
TIMEGATE = f"http://testserver/timegate/{FRANCE}"


def at(*args) -> datetime:
    return datetime(*args, tzinfo=UTC)


def test_discover_timegate_from_original(memento_client):
    assert memento_client.discover_timegate(ORIGINAL) == TIMEGATE


def test_discover_timegate_of_a_timegate(memento_client):
    assert memento_client.discover_timegate(TIMEGATE) == TIMEGATE


def test_fetch_at(memento_client):
    response = memento_client.fetch_at(ORIGINAL, at(2008, 3, 20))
    assert response.final_uri == f"http://testserver/memento/20080201/{FRANCE}"
    assert response.content_datetime == at(2008, 2, 1)
    assert response.requested_datetime == at(2008, 3, 20)
    assert response.hops == 1
    assert response.media_type == "application/rdf+xml"
    assert response.is_memento
    assert not response.coverage_warning
    assert b"$30,100" in response.body


def test_fetch_at_subject_uri(memento_client):
    # The test transport routes every host to the service, so the DBpedia URI answers with its Link header.
    response = memento_client.fetch_at(FRANCE, at(2008, 3, 20), media="application/n-triples")
    assert response.content_datetime == at(2008, 2, 1)
    assert response.body.startswith(f"<{FRANCE}>".encode())


def test_fetch_current_lands_on_original(memento_client):
    response = memento_client.fetch_at(ORIGINAL, at(2010, 1, 1))
    assert response.final_uri == ORIGINAL
    assert response.content_datetime is None
    assert not response.is_memento
    assert find_rel(response.links, "timegate") == TIMEGATE


def test_out_of_range(memento_client):
    with pytest.raises(OutOfRange) as excinfo:
        memento_client.fetch_at(ORIGINAL, at(2005, 6, 1))
    assert excinfo.value.earliest == at(2007, 9, 1)
    assert excinfo.value.latest == NOW


def test_renavigate_from_a_memento(memento_client):
    first = memento_client.fetch_at(ORIGINAL, at(2007, 10, 1))
    response = memento_client.renavigate(first.final_uri, at(2008, 12, 1))
    assert response.content_datetime == at(2008, 11, 1)


def test_renavigate_from_the_original(memento_client):
    response = memento_client.renavigate(ORIGINAL, at(2008, 12, 1))
    assert response.final_uri == f"http://testserver/memento/20081101/{FRANCE}"


def test_renavigate_without_links(memento_client):
    with pytest.raises(NoOriginalLink):
        memento_client.renavigate("http://testserver/health", at(2008, 1, 1))


def test_navigation_links_are_closed(memento_client):
    response = memento_client.fetch_at(ORIGINAL, at(2008, 3, 20))
    for rel in ("first-memento", "last-memento", "prev-memento", "next-memento"):
        target = find_rel(response.links, rel)
        hop = memento_client.get(target)
        assert hop.final_uri == target
        assert hop.content_datetime is not None
        assert find_rel(hop.links, "original") == ORIGINAL


def test_repeated_fetch_is_stable(memento_client):
    first = memento_client.fetch_at(ORIGINAL, at(2008, 9, 15))
    second = memento_client.fetch_at(ORIGINAL, at(2008, 9, 15))
    assert first == second


def test_get_without_datetime_follows_plain_redirects(memento_client):
    response = memento_client.get(TIMEGATE)
    assert response.final_uri == f"http://testserver/memento/20090701/{FRANCE}"


def test_multiple_choices_follow_first_candidate(client):
    class NegotiatingClient(MementoClient):
        def _request(self, method, uri, headers=None):
            return super()._request(method, uri, {**(headers or {}), "Negotiate": "1.0"})

    response = NegotiatingClient(http=client).get(TIMEGATE)
    assert response.final_uri == f"http://testserver/memento/20070901/{FRANCE}"
    assert response.hops == 1


def test_no_timegate(memento_client):
    with pytest.raises(NoTimeGate):
        memento_client.discover_timegate("http://testserver/health")


def test_timegate_base_fallback(client):
    fallback = MementoClient(http=client, timegate_base="http://elsewhere.example/tg/")
    # A Link header wins over the configured base.
    assert fallback.discover_timegate(ORIGINAL) == TIMEGATE
    assert fallback.discover_timegate("http://testserver/health") == "http://elsewhere.example/tg/http://testserver/health"


def test_error_status_without_fallback(memento_client):
    with pytest.raises(TransportError) as excinfo:
        memento_client.discover_timegate("http://testserver/resource/Nowhere")
    assert excinfo.value.status_code == 404


def test_gap_warns_only_when_verifying(client, memento_client):
    plain = memento_client.fetch_at("http://testserver/resource/Italy", at(2008, 10, 1))
    assert plain.content_datetime == at(2008, 2, 1)
    assert not plain.coverage_warning

    verified = MementoClient(http=client, verify_coverage=True).fetch_at("http://testserver/resource/Italy", at(2008, 10, 1))
    assert verified.final_uri == f"http://testserver/memento/20080201/{ITALY}"
    assert verified.coverage_warning


def test_verified_fetch_inside_coverage(client):
    verified = MementoClient(http=client, verify_coverage=True).fetch_at(ORIGINAL, at(2008, 3, 20))
    assert not verified.coverage_warning


# Snapshot boundaries and one day either side.
BOUNDARIES = sorted({date + timedelta(days=shift) for date in SNAPSHOT_DATES for shift in (-1, 0, 1)})


def fetch_or_none(client: MementoClient, t: datetime):
    try:
        return client.fetch_at(ORIGINAL, t)
    except OutOfRange:
        return None


def test_renavigation_agrees_with_direct_fetch(memento_client):
    direct = {t: fetch_or_none(memento_client, t) for t in BOUNDARIES}
    assert direct[BOUNDARIES[0]] is None

    for t1, landed in direct.items():
        if landed is None:
            continue
        for t2 in BOUNDARIES:
            if direct[t2] is None:
                with pytest.raises(OutOfRange):
                    memento_client.renavigate(landed.final_uri, t2)
            else:
                assert memento_client.renavigate(landed.final_uri, t2) == direct[t2], (t1, t2)


@pytest.mark.parametrize("subject, original", [(FRANCE, ORIGINAL), (ITALY, "http://testserver/resource/Italy")])
def test_content_datetime_matches_archive(archive, memento_client, subject, original):
    t = SNAPSHOT_DATES[0] - timedelta(days=20)
    while t < NOW:
        result = archive.lookup(subject, t)
        if result.kind == LookupKind.out_of_range:
            with pytest.raises(OutOfRange):
                memento_client.fetch_at(original, t)
        else:
            response = memento_client.fetch_at(original, t)
            if result.kind == LookupKind.current:
                assert response.final_uri == original
                assert response.content_datetime is None
            else:
                assert response.final_uri == result.record.memento_uri
                assert response.content_datetime == result.record.interval.start
        t += timedelta(days=23, hours=5)


def test_fetch_non_latin_subject(unicode_client):
    client = MementoClient(http=unicode_client)
    response = client.fetch_at("http://testserver/resource/Ελλάδα", at(2008, 3, 20), media="application/n-triples")
    assert response.final_uri == f"http://testserver/memento/20080201/{GREECE_ESCAPED}"
    assert response.content_datetime == at(2008, 2, 1)
    assert f"<{GREECE}>".encode("utf-8") in response.body


def redirect_loop(request: httpx.Request) -> httpx.Response:
    return httpx.Response(302, headers={"Location": str(request.url.copy_with(path=request.url.path + "x"))})


def test_too_many_redirects():
    client = MementoClient(http=httpx.Client(transport=httpx.MockTransport(redirect_loop)), max_redirects=3)
    with pytest.raises(TooManyRedirects):
        client.get("http://loop.example/a")


def test_transport_errors_are_wrapped():
    def refuse(request):
        raise httpx.ConnectError("connection refused", request=request)

    with MementoClient(http=httpx.Client(transport=httpx.MockTransport(refuse))) as client:
        with pytest.raises(TransportError):
            client.get("http://down.example/")


def test_head_not_allowed_falls_back_to_get():
    seen = []

    def handler(request):
        seen.append(request.method)
        if request.method == "HEAD":
            return httpx.Response(405)
        return httpx.Response(200, headers={"Link": '<http://tg.example/tg/x>; rel="timegate"'})

    client = MementoClient(http=httpx.Client(transport=httpx.MockTransport(handler)))
    assert client.discover_timegate("http://origin.example/x") == "http://tg.example/tg/x"
    assert seen == ["HEAD", "GET"]


def test_malformed_link_header_is_ignored():
    response = httpx.Response(200, headers={"Link": "<broken"}, request=httpx.Request("GET", "http://a.example/"))
    assert response_links(response) == []


def test_content_datetime_ahead_of_request_warns():
    def handler(request):
        if "tg" in request.url.path:
            return httpx.Response(302, headers={"Location": "http://a.example/m", "Vary": "accept-datetime"})
        if request.url.path == "/m":
            return httpx.Response(200, headers={"Content-Datetime": "Sat, 01 Nov 2008 00:00:00 GMT"})
        return httpx.Response(200, headers={"Link": '<http://a.example/tg>; rel="timegate"'})

    client = MementoClient(http=httpx.Client(transport=httpx.MockTransport(handler)))
    response = client.fetch_at("http://a.example/r", at(2008, 3, 20))
    assert response.coverage_warning


def test_varies_on_datetime():
    assert varies_on_datetime(httpx.Response(302, headers={"Vary": "negotiate, Accept-Datetime"}))
    assert not varies_on_datetime(httpx.Response(302, headers={"Vary": "accept"}))
