"""TimeMap assembly and its RDF/XML codec.

The reader recognizes the TimeMap vocabulary only: a ResourceMap describing
a TimeBundle aggregation, one TimeGate with its covering Period, and one
Memento node per archived version. Periods may be inline or referenced by
``rdf:nodeID``.
"""
import logging
from datetime import datetime
from typing import Dict, List, Optional

from lxml import etree
from pydantic import ValidationError

from app.config.settings import MementoUris
from app.exceptions import MalformedDate, MalformedTimeMap, UnknownSubject
from app.models.temporal import VersionInterval
from app.models.timemap import TimeMapDoc, TimeMapMemento
from app.services.archive_service import Archive
from app.utils.http_date import format_iso_datetime, parse_iso_datetime

logger = logging.getLogger(__name__)

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
MEM_NS = "http://www.mementoweb.org/terms/tb/"
ORE_NS = "http://www.openarchives.org/ore/terms/"
DCTERMS_NS = "http://purl.org/dc/terms/"
DC_NS = "http://purl.org/dc/elements/1.1/"
XSD_DATETIME = "http://www.w3.org/2001/XMLSchema#dateTime"

NSMAP = {"rdf": RDF_NS, "mem": MEM_NS, "ore": ORE_NS, "dcterms": DCTERMS_NS, "dc": DC_NS}

TIMEMAP_MEDIA_TYPE = "application/rdf+xml"


def rdf(tag: str) -> str:
    return f"{{{RDF_NS}}}{tag}"


def mem(tag: str) -> str:
    return f"{{{MEM_NS}}}{tag}"


def ore(tag: str) -> str:
    return f"{{{ORE_NS}}}{tag}"


def dcterms(tag: str) -> str:
    return f"{{{DCTERMS_NS}}}{tag}"


def dc(tag: str) -> str:
    return f"{{{DC_NS}}}{tag}"


def build_timemap(
    archive: Archive, subject: str, uris: MementoUris, stamp: Optional[datetime] = None
) -> TimeMapDoc:
    """TimeMap of every memento of ``subject``.

    ``covers`` runs from the earliest memento to the latest snapshot date;
    created/modified default to the archive build time.
    """
    versions = archive.list_versions(subject)
    if not versions:
        raise UnknownSubject(subject)
    for current, following in zip(versions, versions[1:]):
        if following.interval.start < current.interval.end:
            raise ValueError(f"Overlapping mementos for {subject}: {current.memento_uri}, {following.memento_uri}")

    stamp = stamp or archive.created_at
    return TimeMapDoc(
        timemap_uri=uris.timemap(subject),
        timebundle_uri=uris.timebundle(subject),
        original=subject,
        timegate=uris.timegate(subject),
        covers=VersionInterval(start=versions[0].interval.start, end=archive.latest_snapshot),
        mementos=[TimeMapMemento(uri=record.memento_uri, interval=record.interval) for record in versions],
        created=stamp,
        modified=stamp,
    )


# Serializer

def _resource(parent, tag: str, uri: str):
    return etree.SubElement(parent, tag, {rdf("resource"): uri})


def _period(parent, interval: VersionInterval):
    period = etree.SubElement(parent, mem("Period"))
    for name, value in (("start", interval.start), ("end", interval.end)):
        literal = etree.SubElement(period, mem(name), {rdf("datatype"): XSD_DATETIME})
        literal.text = format_iso_datetime(value)
    return period


def serialize_rdfxml(doc: TimeMapDoc) -> bytes:
    root = etree.Element(rdf("RDF"), nsmap=NSMAP)

    resource_map = etree.SubElement(root, ore("ResourceMap"), {rdf("about"): doc.timemap_uri})
    _resource(resource_map, rdf("type"), f"{MEM_NS}TimeMap")
    etree.SubElement(resource_map, dcterms("modified")).text = format_iso_datetime(doc.modified)
    etree.SubElement(resource_map, dcterms("created")).text = format_iso_datetime(doc.created)
    etree.SubElement(resource_map, dc("format")).text = TIMEMAP_MEDIA_TYPE
    describes = etree.SubElement(resource_map, ore("describes"))
    aggregation = etree.SubElement(describes, ore("Aggregation"), {rdf("about"): doc.timebundle_uri})
    for memento in doc.mementos:
        _resource(aggregation, ore("aggregates"), memento.uri)
    _resource(aggregation, ore("aggregates"), doc.timegate)
    _resource(aggregation, ore("aggregates"), doc.original)
    etree.SubElement(aggregation, dc("title")).text = f"Memento Time Bundle for {doc.original}"
    _resource(aggregation, rdf("type"), f"{MEM_NS}TimeBundle")

    timegate = etree.SubElement(root, mem("TimeGate"), {rdf("about"): doc.timegate})
    _resource(timegate, mem("timeGateFor"), doc.original)
    _period(etree.SubElement(timegate, mem("covers")), doc.covers)

    etree.SubElement(root, mem("OriginalResource"), {rdf("about"): doc.original})

    for memento in doc.mementos:
        node = etree.SubElement(root, mem("Memento"), {rdf("about"): memento.uri})
        _period(etree.SubElement(node, mem("validOver")), memento.interval)
        _resource(node, mem("mementoFor"), doc.original)

    etree.indent(root, space="  ")
    return etree.tostring(root, xml_declaration=True, encoding="utf-8", pretty_print=True)


# Reader

class _Reader:
    def __init__(self, root):
        self.root = root
        self.tree = root.getroottree()
        self.warnings: List[str] = []
        self.periods: Dict[str, etree._Element] = {
            element.get(rdf("nodeID")): element
            for element in root
            if element.tag == mem("Period") and element.get(rdf("nodeID"))
        }

    def path(self, element) -> str:
        return self.tree.getpath(element)

    def fail(self, element, message: str):
        raise MalformedTimeMap(self.path(element), message)

    def one(self, parent, tag: str):
        found = parent.find(tag)
        if found is None:
            self.fail(parent, f"missing {etree.QName(tag).localname}")
        return found

    def about(self, element) -> str:
        uri = element.get(rdf("about"))
        if not uri:
            self.fail(element, "missing rdf:about")
        return uri

    def resource(self, element, nested_tag: Optional[str] = None) -> str:
        uri = element.get(rdf("resource"))
        if uri:
            return uri
        if nested_tag is not None:
            nested = element.find(nested_tag)
            if nested is not None:
                return self.about(nested)
        self.fail(element, "missing rdf:resource")

    def instant(self, element) -> datetime:
        try:
            return parse_iso_datetime(element.text or "")
        except MalformedDate as e:
            self.fail(element, str(e))

    def period(self, holder) -> VersionInterval:
        node_id = holder.get(rdf("nodeID"))
        if node_id:
            period = self.periods.get(node_id)
            if period is None:
                self.fail(holder, f"no mem:Period with rdf:nodeID {node_id!r}")
        else:
            period = self.one(holder, mem("Period"))

        start = self.instant(self.one(period, mem("start")))
        end = self.instant(self.one(period, mem("end")))
        if start == end:
            self.fail(period, "empty period (start equals end)")
        if start > end:
            start, end = end, start
            self.warnings.append(f"{self.path(period)}: start after end, swapped")
        return VersionInterval(start=start, end=end)

    def memento(self, node) -> TimeMapMemento:
        # Required property; its target is not compared with mem:timeGateFor.
        self.resource(self.one(node, mem("mementoFor")), nested_tag=mem("OriginalResource"))
        uri = self.about(node)
        interval = self.period(self.one(node, mem("validOver")))
        try:
            return TimeMapMemento(uri=uri, interval=interval)
        except ValidationError as e:
            self.fail(node, str(e))

    def read(self) -> TimeMapDoc:
        if self.root.tag != rdf("RDF"):
            self.fail(self.root, "root element is not rdf:RDF")

        resource_map = self.one(self.root, ore("ResourceMap"))
        aggregation = self.one(self.one(resource_map, ore("describes")), ore("Aggregation"))
        timegate = self.one(self.root, mem("TimeGate"))
        mementos = [self.memento(node) for node in self.root.findall(mem("Memento"))]
        if not mementos:
            self.fail(self.root, "no mem:Memento")

        fields = dict(
            timemap_uri=self.about(resource_map),
            timebundle_uri=self.about(aggregation),
            original=self.resource(self.one(timegate, mem("timeGateFor")), nested_tag=mem("OriginalResource")),
            timegate=self.about(timegate),
            covers=self.period(self.one(timegate, mem("covers"))),
            mementos=mementos,
            created=self.instant(self.one(resource_map, dcterms("created"))),
            modified=self.instant(self.one(resource_map, dcterms("modified"))),
        )
        try:
            doc = TimeMapDoc(**fields)
        except ValidationError as e:
            self.fail(self.root, str(e))

        self.warnings.extend(f"memento {uri} overlaps the following memento" for uri in doc.overlaps())
        return doc.model_copy(update={"warnings": list(self.warnings)})


def parse_rdfxml(data: bytes) -> TimeMapDoc:
    if isinstance(data, str):
        data = data.encode("utf-8")
    parser = etree.XMLParser(resolve_entities=False, no_network=True, remove_comments=True)
    try:
        root = etree.fromstring(data, parser=parser)
    except etree.XMLSyntaxError as e:
        raise MalformedTimeMap("/", f"not well-formed XML: {e}")

    doc = _Reader(root).read()
    for warning in doc.warnings:
        logger.warning(f"TimeMap {doc.timemap_uri}: {warning}")
    return doc

