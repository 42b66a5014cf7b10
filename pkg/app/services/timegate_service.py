import logging
from typing import List

from app.config.settings import MementoUris
from app.exceptions import UnknownSubject
from app.models.link import LinkEntry, LinkRelation
from app.models.memento import LookupKind, MementoRecord
from app.models.negotiation import DecisionKind, KnownRange, NegotiationDecision, NegotiationRequest
from app.services.archive_service import Archive
from app.utils.http_date import Clock, format_http_date, utc_now

logger = logging.getLogger(__name__)

MEMENTO_REL = "memento"


class TimeGate:
    """Datetime content negotiation over a read-only archive.

    Holds no per-request state, so one instance serves concurrent requests.
    """

    def __init__(self, archive: Archive, uris: MementoUris, clock: Clock = utc_now):
        self.archive = archive
        self.uris = uris
        self.clock = clock

    def negotiate(self, req: NegotiationRequest) -> NegotiationDecision:
        subject = req.subject
        if not self.archive.has_subject(subject):
            raise UnknownSubject(subject)

        if req.explicit_negotiate:
            versions = self.archive.list_versions(subject)
            if not versions:
                return self._to_original(subject)
            return self._choices(subject, versions)

        if req.accept_datetime is None:
            latest = self.archive.latest_version(subject)
            if latest is None:
                return self._to_original(subject)
            return self._to_memento(subject, latest)

        result = self.archive.lookup(subject, req.accept_datetime)
        if result.kind == LookupKind.current:
            return self._to_original(subject)
        if result.kind == LookupKind.out_of_range:
            earliest = self.archive.earliest(subject)
            logger.debug(f"Accept-Datetime {format_http_date(req.accept_datetime)} precedes {subject}")
            return NegotiationDecision(
                kind=DecisionKind.not_acceptable,
                subject=subject,
                known_range=KnownRange(earliest=earliest, latest=max(self.clock(), earliest)),
            )

        record = result.record
        same_start = self.archive.records_starting_at(subject, record.interval.start)
        if len(same_start) > 1:
            return self._choices(subject, same_start)
        return self._to_memento(subject, record)

    def decision_links(self, decision: NegotiationDecision) -> List[LinkEntry]:
        if decision.kind == DecisionKind.redirect_to_memento:
            return self._memento_links(decision.subject, decision.record)
        if decision.kind == DecisionKind.redirect_to_original:
            return self._original_links(decision.subject)
        return list(decision.links)

    def _to_memento(self, subject: str, record: MementoRecord) -> NegotiationDecision:
        return NegotiationDecision(
            kind=DecisionKind.redirect_to_memento,
            subject=subject,
            record=record,
            location=record.memento_uri,
            links=self._memento_links(subject, record),
        )

    def _to_original(self, subject: str) -> NegotiationDecision:
        return NegotiationDecision(
            kind=DecisionKind.redirect_to_original,
            subject=subject,
            location=self.uris.original(subject),
            links=self._original_links(subject),
        )

    def _choices(self, subject: str, records: List[MementoRecord]) -> NegotiationDecision:
        candidates = sorted(records, key=lambda record: (record.interval.start, record.id))
        links = self._original_links(subject) + [memento_link(record, MEMENTO_REL) for record in candidates]
        return NegotiationDecision(
            kind=DecisionKind.multiple_choices, subject=subject, candidates=candidates, links=links
        )

    def _original_links(self, subject: str) -> List[LinkEntry]:
        return [
            LinkEntry(target=self.uris.timegate(subject), rels=[LinkRelation.timegate]),
            LinkEntry(target=self.uris.timebundle(subject), rels=[LinkRelation.timebundle]),
        ]

    def _memento_links(self, subject: str, record: MementoRecord) -> List[LinkEntry]:
        return memento_navigation_links(self.archive, self.uris, subject, record)


def memento_link(record: MementoRecord, rel) -> LinkEntry:
    return LinkEntry(
        target=record.memento_uri,
        rels=[rel],
        params={"datetime": format_http_date(record.interval.start)},
    )


def memento_navigation_links(
    archive: Archive, uris: MementoUris, subject: str, record: MementoRecord
) -> List[LinkEntry]:
    """original, first-/last-memento and, when they exist, prev-/next-memento."""
    neighbors = archive.neighbors(subject, record)
    links = [
        LinkEntry(target=uris.original(subject), rels=[LinkRelation.original]),
        memento_link(neighbors.first, LinkRelation.first_memento),
        memento_link(neighbors.last, LinkRelation.last_memento),
    ]
    if neighbors.prev is not None:
        links.append(memento_link(neighbors.prev, LinkRelation.prev_memento))
    if neighbors.next is not None:
        links.append(memento_link(neighbors.next, LinkRelation.next_memento))
    return links
