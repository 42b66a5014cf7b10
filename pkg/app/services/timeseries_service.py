"""Time series of one property across the versions of several resources.

Each (resource, time) cell is fetched through the resource's TimeGate, the
property's literal values are selected from the N-Triples body and normalized
to a number. Cells fail independently; the failure is noted as an anomaly.
"""
import csv
import io
import logging
import re
import threading
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional
from urllib.parse import urlencode

from pydantic import ValidationError

from app.exceptions import MalformedDate, MementoClientError, OutOfRange, SeriesSpecError, TransportError, UnknownSubject
from app.models.link import LinkRelation
from app.models.memento import LookupKind, MementoResponse
from app.models.series import Anomaly, CellProvenance, NormalizedValue, SeriesCell, SeriesResult, SeriesSpec
from app.services.archive_service import Archive
from app.services.memento_client import MementoClient
from app.utils.conneg import N_TRIPLES
from app.utils.http_date import format_iso_datetime, parse_iso_datetime
from app.utils.link_header import find_rel
from app.utils.ntriples import parse_ntriples, select_values

logger = logging.getLogger(__name__)

SERIES_FORMATS = ("csv", "chart-params")

_CURRENCY = "$€£"
_NUMBER = re.compile(r"-?(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?")


def read_series_spec(path: Path) -> SeriesSpec:
    """Read a series spec: ``resource <uri>``, ``time <ISO-8601>``, ``property <uri>``
    and optionally ``timegate <base-uri>`` lines; ``#`` starts a comment."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise SeriesSpecError(f"Cannot read series spec {path}: {e}")

    fields = {"resources": [], "times": [], "property": None, "timegate_base": None}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        keyword, _, value = line.partition(" ")
        value = value.strip()
        if not value:
            raise SeriesSpecError(f"{path}:{number}: missing value after {keyword!r}")
        if keyword == "resource":
            fields["resources"].append(value)
        elif keyword == "time":
            try:
                fields["times"].append(parse_iso_datetime(value))
            except MalformedDate as e:
                raise SeriesSpecError(f"{path}:{number}: {e}")
        elif keyword == "property":
            fields["property"] = value
        elif keyword == "timegate":
            fields["timegate_base"] = value
        else:
            raise SeriesSpecError(f"{path}:{number}: unknown keyword {keyword!r}")

    try:
        return SeriesSpec(**fields)
    except ValidationError as e:
        raise SeriesSpecError(f"Invalid series spec {path}: {e}")


def normalize_value(raw: str) -> NormalizedValue:
    """Parse a loosely formatted number such as ``$29,000`` or ``1.5e3 (est.)``."""
    text = raw.strip()
    if "(" in text:
        text = text[: text.index("(")].strip()
    text = text.lstrip(_CURRENCY + " \t").replace(",", "")
    if not text:
        return NormalizedValue(raw=raw, reason="empty")
    if not _NUMBER.fullmatch(text):
        return NormalizedValue(raw=raw, reason=Anomaly.non_numeric.value)
    return NormalizedValue(raw=raw, value=float(text))


def normalize(raw: str) -> Optional[float]:
    return normalize_value(raw).value


def format_number(value: Optional[float]) -> str:
    """Shared by every output format so they agree on the digits."""
    if value is None:
        return ""
    return f"{value:.15g}"


def cell_from_values(values: List[str], provenance: CellProvenance) -> SeriesCell:
    cell = SeriesCell(provenance=provenance)
    if not values:
        cell.anomalies.append(Anomaly.missing_property.value)
        return cell
    if len(values) > 1:
        cell.anomalies.append(f"{Anomaly.multiple_values.value}:{len(values)}")
    for raw in values:
        value = normalize_value(raw).value
        if value is not None:
            cell.value = value
            return cell
    cell.anomalies.append(Anomaly.non_numeric.value)
    return cell


def _cell_from_body(body: bytes, resource: str, prop: str, provenance: CellProvenance) -> SeriesCell:
    values = select_values(parse_ntriples(io.BytesIO(body), strict=False), resource, prop)
    return cell_from_values(values, provenance)


class SeriesRunner:
    """Runs a series spec over HTTP.

    MementoClient keeps no state between calls, so the worker threads share it.
    A resource given as a TimeGate or an emulated original is not the subject
    of the triples it serves; the subject is then read from the TimeMap.
    """

    def __init__(self, client: MementoClient, max_workers: int = 4):
        self.client = client
        self.max_workers = max(1, max_workers)
        self._subjects: Dict[str, Optional[str]] = {}
        self._lock = threading.Lock()

    def fetch_cell(self, spec: SeriesSpec, resource: str, t) -> SeriesCell:
        target = f"{spec.timegate_base}{resource}" if spec.timegate_base else resource
        try:
            response = self.client.fetch_at(target, t, media=N_TRIPLES)
        except OutOfRange:
            return SeriesCell(anomalies=[Anomaly.out_of_range.value])
        except MementoClientError as e:
            logger.warning(f"Fetching {resource} at {format_iso_datetime(t)} failed: {e}")
            return SeriesCell(anomalies=[Anomaly.fetch_failed.value])

        provenance = CellProvenance(memento_uri=response.final_uri, content_datetime=response.content_datetime)
        triples = list(parse_ntriples(io.BytesIO(response.body), strict=False))
        subject = resource
        if not any(str(triple.subject) == resource for triple in triples):
            subject = self.described_subject(response) or resource
        return cell_from_values(select_values(triples, subject, spec.property), provenance)

    def described_subject(self, response: MementoResponse) -> Optional[str]:
        """The subject a response describes, per the TimeMap behind its rel="timebundle" Link."""
        timebundle = find_rel(response.links, LinkRelation.timebundle)
        if timebundle is None:
            return None
        with self._lock:
            if timebundle in self._subjects:
                return self._subjects[timebundle]
        doc = self.client.timemap_of(response)
        subject = doc.original if doc is not None else None
        logger.debug(f"{response.final_uri} describes {subject}")
        with self._lock:
            self._subjects[timebundle] = subject
        return subject

    def run(self, spec: SeriesSpec) -> SeriesResult:
        jobs = [(resource, t) for resource in spec.resources for t in spec.times]
        with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
            # map() yields in submission order whatever the completion order.
            flat = list(pool.map(lambda job: self.fetch_cell(spec, *job), jobs))

        width = len(spec.times)
        cells = [flat[i * width:(i + 1) * width] for i in range(len(spec.resources))]
        if all(Anomaly.fetch_failed.value in cell.anomalies for cell in flat):
            raise TransportError(f"Every fetch failed for {len(spec.resources)} resources")
        return SeriesResult(resources=spec.resources, times=spec.times, property=spec.property, cells=cells)


def run_series(spec: SeriesSpec, client: MementoClient, max_workers: int = 4) -> SeriesResult:
    return SeriesRunner(client, max_workers=max_workers).run(spec)


def series_from_archive(spec: SeriesSpec, archive: Archive) -> SeriesResult:
    """The same series computed straight from the archive, without HTTP."""
    cells = []
    for resource in spec.resources:
        row = []
        for t in spec.times:
            try:
                result = archive.lookup(resource, t)
            except UnknownSubject:
                row.append(SeriesCell(anomalies=[Anomaly.fetch_failed.value]))
                continue
            if result.kind == LookupKind.out_of_range:
                row.append(SeriesCell(anomalies=[Anomaly.out_of_range.value]))
            elif result.kind == LookupKind.current:
                row.append(_cell_from_body(archive.current(resource), resource, spec.property, CellProvenance()))
            else:
                record = result.record
                provenance = CellProvenance(memento_uri=record.memento_uri, content_datetime=record.interval.start)
                row.append(_cell_from_body(record.representation, resource, spec.property, provenance))
        cells.append(row)
    return SeriesResult(resources=spec.resources, times=spec.times, property=spec.property, cells=cells)


def emit(result: SeriesResult, fmt: str = "csv") -> bytes:
    if fmt == "csv":
        return _emit_csv(result)
    if fmt == "chart-params":
        return _emit_chart_params(result)
    raise ValueError(f"Unknown series format {fmt!r}; expected one of {', '.join(SERIES_FORMATS)}")


def _emit_csv(result: SeriesResult) -> bytes:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["resource"] + [format_iso_datetime(t) for t in result.times])
    for resource, row in zip(result.resources, result.values):
        writer.writerow([resource] + [format_number(value) for value in row])
    return out.getvalue().encode("utf-8")


def _emit_chart_params(result: SeriesResult) -> bytes:
    """Line-chart parameters in text encoding; ``_`` marks a missing value."""
    present = [value for row in result.values for value in row if value is not None]
    series = "|".join(",".join(format_number(value) or "_" for value in row) for row in result.values)
    params = [
        ("cht", "lc"),
        ("chd", f"t:{series}"),
        ("chdl", "|".join(result.resources)),
        ("chxl", "0:|" + "|".join(format_iso_datetime(t)[:10] for t in result.times)),
    ]
    if present:
        params.append(("chds", f"{format_number(min(present))},{format_number(max(present))}"))
    return urlencode(params, safe=":,|").encode("ascii")
