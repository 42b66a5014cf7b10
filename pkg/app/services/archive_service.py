import heapq
import logging
import os
import tempfile
import time
from bisect import bisect_right
from contextlib import ExitStack
from datetime import datetime
from functools import lru_cache
from itertools import groupby
from operator import attrgetter, itemgetter
from pathlib import Path
from typing import Dict, Iterator, List, Literal, NamedTuple, Optional, Tuple

from pydantic import BaseModel

from app.exceptions import DateOrderError, IngestError, MalformedDate, NTriplesSyntaxError, UnknownSubject
from app.models.memento import (
    IngestReport,
    LookupKind,
    LookupResult,
    MementoRecord,
    Neighbors,
    SnapshotEntry,
    SnapshotManifest,
)
from app.models.temporal import TimestampUTC, VersionInterval, to_utc
from app.utils.http_date import Clock, format_path_date, parse_iso_datetime, utc_now
from app.utils.iri import iri_to_uri
from app.utils.ntriples import NTriplesReader

logger = logging.getLogger(__name__)

RECORD_LOG = "records.jsonl"
META_FILE = "archive.json"
LOCK_FILE = "ingest.lock"
DEFAULT_CHUNK_SIZE = 200_000


class LogRecord(BaseModel):
    """One line of the append-only record log."""

    kind: Literal["memento", "current"]
    id: int
    subject: str
    start: TimestampUTC
    end: Optional[TimestampUTC] = None
    created_at: TimestampUTC
    representation: str


class ArchiveMeta(BaseModel):
    created_at: TimestampUTC
    base_url: str
    snapshot_dates: List[TimestampUTC]
    report: IngestReport


class _IndexEntry(NamedTuple):
    start: datetime
    end: Optional[datetime]
    offset: int
    id: int


def memento_uri(base_url: str, subject: str, start: datetime) -> str:
    return f"{base_url.rstrip('/')}/memento/{format_path_date(start)}/{iri_to_uri(subject)}"


def read_manifest(path: Path) -> SnapshotManifest:
    """Read a manifest file: one ``<ISO-8601 date> <path>`` line per snapshot."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise IngestError(f"Cannot read manifest {path}: {e}")

    entries = []
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(None, 1)
        if len(parts) != 2:
            raise IngestError(f"{path}:{number}: expected '<date> <path>', got {line!r}")
        try:
            version_date = parse_iso_datetime(parts[0])
        except MalformedDate as e:
            raise IngestError(f"{path}:{number}: {e}")
        source = Path(parts[1])
        if not source.is_absolute():
            source = path.parent / source
        entries.append(SnapshotEntry(version_date=version_date, source=source))

    if not entries:
        raise IngestError(f"Manifest {path} lists no snapshots")
    return SnapshotManifest(entries=entries)


def check_manifest_order(manifest: SnapshotManifest) -> None:
    for previous, current in zip(manifest.entries, manifest.entries[1:]):
        if not previous.version_date < current.version_date:
            raise DateOrderError(
                f"DateOrderError: snapshot dates must be strictly increasing "
                f"({previous.version_date.isoformat()} then {current.version_date.isoformat()})"
            )
        if format_path_date(previous.version_date) == format_path_date(current.version_date):
            raise DateOrderError(
                f"DateOrderError: two snapshots on {format_path_date(current.version_date)}; "
                f"memento URIs need one snapshot per day"
            )


# Bounded-memory grouping: sorted chunk files merged with a heap.

def _write_chunk(rows: List[Tuple[str, str]], workdir: Path, name: str) -> Path:
    rows.sort(key=itemgetter(0))
    path = workdir / name
    with path.open("w", encoding="utf-8") as out:
        for subject, line in rows:
            out.write(f"{subject}\t{line}\n")
    return path


def _spill_sorted_chunks(
    entry: SnapshotEntry, workdir: Path, tag: str, chunk_size: int, report: IngestReport, strict: bool
) -> List[Path]:
    chunks: List[Path] = []
    rows: List[Tuple[str, str]] = []
    try:
        with entry.source.open("rb") as stream:
            reader = NTriplesReader(stream, strict=strict)
            for triple in reader:
                if not triple.has_uri_subject:
                    report.rejected += 1
                    continue
                rows.append((str(triple.subject), triple.to_ntriples()))
                if len(rows) >= chunk_size:
                    chunks.append(_write_chunk(rows, workdir, f"{tag}-{len(chunks)}.chunk"))
                    rows = []
            report.skipped += reader.skipped
    except OSError as e:
        raise IngestError(f"Cannot read snapshot {entry.source}: {e}")
    except NTriplesSyntaxError as e:
        raise IngestError(f"Snapshot {entry.source}: {e}")

    if rows:
        chunks.append(_write_chunk(rows, workdir, f"{tag}-{len(chunks)}.chunk"))
    return chunks


def _chunk_rows(handle) -> Iterator[Tuple[str, str]]:
    for raw in handle:
        subject, _, line = raw.rstrip("\n").partition("\t")
        yield subject, line


def _subject_groups(chunks: List[Path]) -> Iterator[Tuple[str, List[str]]]:
    """Yield (subject, lines) per subject in subject order, lines in document order."""
    with ExitStack() as stack:
        handles = [stack.enter_context(path.open("r", encoding="utf-8")) for path in chunks]
        merged = heapq.merge(*(_chunk_rows(handle) for handle in handles), key=itemgetter(0))
        for subject, rows in groupby(merged, key=itemgetter(0)):
            yield subject, [line for _, line in rows]


def _count_distinct(subject_files: List[Path]) -> int:
    with ExitStack() as stack:
        handles = [stack.enter_context(path.open("r", encoding="utf-8")) for path in subject_files]
        merged = heapq.merge(*((line.rstrip("\n") for line in handle) for handle in handles))
        return sum(1 for _ in groupby(merged))


def build_archive(
    manifest: SnapshotManifest,
    archive_path: Path,
    base_url: str,
    clock: Clock = utc_now,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    strict: bool = False,
) -> IngestReport:
    """Write the record log and metadata of an archive from dated snapshots.

    Every subject of snapshot i (except the last) becomes a Memento valid over
    [date_i, date_i+1). The last snapshot is stored as the current
    representation served by the original resource, never as a Memento.
    """
    check_manifest_order(manifest)
    archive_path = Path(archive_path)
    archive_path.mkdir(parents=True, exist_ok=True)
    lock = archive_path / LOCK_FILE
    try:
        lock_fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise IngestError(f"Archive {archive_path} is locked by another ingestion ({lock})")

    started = time.perf_counter()
    now = clock()
    report = IngestReport()
    log_path = archive_path / RECORD_LOG
    tmp_log = archive_path / f"{RECORD_LOG}.tmp"
    entries = manifest.entries
    try:
        with tempfile.TemporaryDirectory(prefix="ingest-", dir=archive_path) as workdir, tmp_log.open("wb") as log:
            workdir = Path(workdir)
            next_id = 1
            subject_files = []
            for i, entry in enumerate(entries):
                is_current = i == len(entries) - 1
                start = entry.version_date
                end = None if is_current else entries[i + 1].version_date
                logger.info(f"Ingesting snapshot {format_path_date(start)} from {entry.source}")

                chunks = _spill_sorted_chunks(entry, workdir, f"s{i}", chunk_size, report, strict)
                subject_file = workdir / f"s{i}.subjects"
                written = 0
                with subject_file.open("w", encoding="utf-8") as subjects_out:
                    for subject, lines in _subject_groups(chunks):
                        record = LogRecord(
                            kind="current" if is_current else "memento",
                            id=next_id,
                            subject=subject,
                            start=start,
                            end=end,
                            created_at=max(now, start),
                            representation="".join(f"{line}\n" for line in lines),
                        )
                        log.write(record.model_dump_json().encode("utf-8") + b"\n")
                        subjects_out.write(f"{subject}\n")
                        next_id += 1
                        written += 1
                for chunk in chunks:
                    chunk.unlink()
                subject_files.append(subject_file)

                if is_current:
                    report.current += written
                else:
                    report.records += written
                logger.info(f"Snapshot {format_path_date(start)}: {written} subjects")

            report.subjects = _count_distinct(subject_files)

        os.replace(tmp_log, log_path)
        report.elapsed = time.perf_counter() - started
        meta = ArchiveMeta(created_at=now, base_url=base_url, snapshot_dates=manifest.dates, report=report)
        (archive_path / META_FILE).write_text(meta.model_dump_json(indent=2), encoding="utf-8")
    finally:
        os.close(lock_fd)
        lock.unlink(missing_ok=True)
        if tmp_log.exists():
            tmp_log.unlink()

    if report.skipped or report.rejected:
        logger.warning(f"Ingest skipped {report.skipped} malformed lines, rejected {report.rejected} blank-node subjects")
    logger.info(f"Ingest finished: {report.summary()}")
    return report


def ingest(
    manifest: SnapshotManifest,
    archive_path: Path,
    base_url: str,
    clock: Clock = utc_now,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    strict: bool = False,
) -> "Archive":
    build_archive(manifest, archive_path, base_url, clock=clock, chunk_size=chunk_size, strict=strict)
    return Archive.open(archive_path, base_url=base_url)


class Archive:
    """Read-only view of an ingested archive.

    The per-subject interval index is rebuilt from the record log on open;
    representations are read from the log on demand.
    """

    def __init__(self, path: Path, meta: ArchiveMeta, index: Dict[str, List[_IndexEntry]],
                 current: Dict[str, int], base_url: str):
        self.path = Path(path)
        self.meta = meta
        self.base_url = base_url.rstrip("/")
        self._index = index
        self._starts = {subject: [e.start for e in entries] for subject, entries in index.items()}
        self._current = current
        self._read = lru_cache(maxsize=4096)(self._read_uncached)

    @classmethod
    def open(cls, path: Path, base_url: Optional[str] = None) -> "Archive":
        path = Path(path)
        index: Dict[str, List[_IndexEntry]] = {}
        current: Dict[str, int] = {}
        offset = 0
        try:
            meta = ArchiveMeta.model_validate_json((path / META_FILE).read_text(encoding="utf-8"))
            with (path / RECORD_LOG).open("rb") as log:
                for line in log:
                    record = LogRecord.model_validate_json(line)
                    if record.kind == "current":
                        current[record.subject] = offset
                    else:
                        index.setdefault(record.subject, []).append(
                            _IndexEntry(record.start, record.end, offset, record.id)
                        )
                    offset += len(line)
        except OSError as e:
            raise IngestError(f"Not an archive: {path}: {e}")
        for entries in index.values():
            entries.sort(key=attrgetter("start"))

        logger.info(f"Opened archive {path}: {len(index)} subjects with mementos, {len(current)} current")
        return cls(path, meta, index, current, base_url or meta.base_url)

    @property
    def snapshot_dates(self) -> List[datetime]:
        return self.meta.snapshot_dates

    @property
    def latest_snapshot(self) -> datetime:
        return self.meta.snapshot_dates[-1]

    @property
    def created_at(self) -> datetime:
        return self.meta.created_at

    def subjects(self) -> List[str]:
        return sorted(set(self._index) | set(self._current))

    def has_subject(self, subject: str) -> bool:
        return subject in self._index or subject in self._current

    def _read_uncached(self, offset: int) -> LogRecord:
        with (self.path / RECORD_LOG).open("rb") as log:
            log.seek(offset)
            return LogRecord.model_validate_json(log.readline())

    def _record(self, entry: _IndexEntry) -> MementoRecord:
        raw = self._read(entry.offset)
        return MementoRecord(
            id=raw.id,
            subject=raw.subject,
            interval=VersionInterval(start=raw.start, end=raw.end),
            memento_uri=memento_uri(self.base_url, raw.subject, raw.start),
            created_at=raw.created_at,
            representation=raw.representation,
        )

    def current(self, subject: str) -> Optional[bytes]:
        offset = self._current.get(subject)
        if offset is None:
            return None
        return self._read(offset).representation.encode("utf-8")

    def has_current(self, subject: str) -> bool:
        return subject in self._current

    def has_mementos(self, subject: str) -> bool:
        return bool(self._index.get(subject))

    def latest_version(self, subject: str) -> Optional[MementoRecord]:
        entries = self._index.get(subject)
        return self._record(entries[-1]) if entries else None

    def list_versions(self, subject: str) -> List[MementoRecord]:
        return [self._record(entry) for entry in self._index.get(subject, [])]

    def records_starting_at(self, subject: str, start: datetime) -> List[MementoRecord]:
        return [self._record(entry) for entry in self._index.get(subject, []) if entry.start == start]

    def record_by_date(self, subject: str, path_date: str) -> Optional[MementoRecord]:
        for entry in self._index.get(subject, []):
            if format_path_date(entry.start) == path_date:
                return self._record(entry)
        return None

    def earliest(self, subject: str) -> Optional[datetime]:
        entries = self._index.get(subject)
        if entries:
            return entries[0].start
        if subject in self._current:
            return self.latest_snapshot
        return None

    def lookup(self, subject: str, t: datetime) -> LookupResult:
        entries = self._index.get(subject, [])
        has_current = subject in self._current
        if not entries and not has_current:
            raise UnknownSubject(subject)

        t = to_utc(t)
        if has_current and t >= self.latest_snapshot:
            return LookupResult(kind=LookupKind.current)
        if not entries or t < entries[0].start:
            return LookupResult(kind=LookupKind.out_of_range)
        # Greatest start <= t: the covering record, or the last known state inside a gap.
        position = bisect_right(self._starts[subject], t) - 1
        return LookupResult(kind=LookupKind.memento, record=self._record(entries[position]))

    def neighbors(self, subject: str, record: MementoRecord) -> Neighbors:
        entries = self._index.get(subject, [])
        position = next((i for i, entry in enumerate(entries) if entry.id == record.id), None)
        if position is None:
            raise UnknownSubject(subject)
        return Neighbors(
            first=self._record(entries[0]),
            last=self._record(entries[-1]),
            prev=self._record(entries[position - 1]) if position > 0 else None,
            next=self._record(entries[position + 1]) if position + 1 < len(entries) else None,
        )


def open_archive(path: Path, base_url: Optional[str] = None) -> Archive:
    return Archive.open(path, base_url=base_url)
