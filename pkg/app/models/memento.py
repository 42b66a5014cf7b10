from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator

from app.models.link import LinkEntry
from app.models.temporal import ResourceUri, TimestampUTC, VersionInterval


class SnapshotEntry(BaseModel):
    version_date: TimestampUTC
    source: Path


class SnapshotManifest(BaseModel):
    """Dated snapshots of the data set; the last entry is the current version."""

    entries: List[SnapshotEntry] = Field(..., min_length=1)

    @property
    def dates(self) -> List[datetime]:
        return [entry.version_date for entry in self.entries]

    @property
    def current(self) -> SnapshotEntry:
        return self.entries[-1]


class MementoRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: int
    subject: ResourceUri
    interval: VersionInterval
    memento_uri: ResourceUri
    created_at: TimestampUTC
    representation: bytes

    @field_validator("representation", mode="before")
    @classmethod
    def _decode_representation(cls, value):
        if isinstance(value, str):
            return value.encode("utf-8")
        return value

    @field_serializer("representation")
    def _encode_representation(self, value: bytes) -> str:
        # Representations are N-Triples, so UTF-8 text is lossless.
        return value.decode("utf-8")


class LookupKind(str, Enum):
    memento = "MEMENTO"
    current = "CURRENT"
    out_of_range = "OUT_OF_RANGE"


class LookupResult(BaseModel):
    kind: LookupKind
    record: Optional[MementoRecord] = None


class Neighbors(BaseModel):
    first: MementoRecord
    last: MementoRecord
    prev: Optional[MementoRecord] = None
    next: Optional[MementoRecord] = None


class IngestReport(BaseModel):
    subjects: int = 0
    records: int = 0
    current: int = 0
    skipped: int = 0
    rejected: int = 0
    elapsed: float = 0.0

    def summary(self) -> str:
        return f"subjects={self.subjects} records={self.records} elapsed={self.elapsed:.2f}"


class MementoResponse(BaseModel):
    """Final response of a datetime-negotiated retrieval."""

    final_uri: ResourceUri
    body: bytes
    media_type: str
    content_datetime: Optional[TimestampUTC] = None
    links: List[LinkEntry] = Field(default_factory=list)
    hops: int = 0
    requested_datetime: Optional[TimestampUTC] = None
    coverage_warning: bool = False

    @property
    def is_memento(self) -> bool:
        return self.content_datetime is not None
