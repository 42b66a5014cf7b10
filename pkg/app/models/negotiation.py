from datetime import datetime
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field, field_validator

from app.models.link import LinkEntry
from app.models.memento import MementoRecord
from app.models.temporal import ResourceUri, TimestampUTC

DEFAULT_ACCEPT_MEDIA = ["application/rdf+xml"]


class NegotiationRequest(BaseModel):
    subject: ResourceUri
    accept_datetime: Optional[TimestampUTC] = None
    explicit_negotiate: bool = False
    accept_media: List[str] = Field(default_factory=lambda: list(DEFAULT_ACCEPT_MEDIA))

    @field_validator("accept_media")
    @classmethod
    def _default_media(cls, value: List[str]) -> List[str]:
        return [media for media in value if media] or list(DEFAULT_ACCEPT_MEDIA)


class DecisionKind(str, Enum):
    redirect_to_memento = "REDIRECT_TO_MEMENTO"
    redirect_to_original = "REDIRECT_TO_ORIGINAL"
    multiple_choices = "MULTIPLE_CHOICES"
    not_acceptable = "NOT_ACCEPTABLE"


class KnownRange(BaseModel):
    earliest: TimestampUTC
    latest: TimestampUTC


class NegotiationDecision(BaseModel):
    """Outcome of datetime negotiation for one TimeGate request.

    ``location`` is set for both redirect kinds, ``record`` only when a memento
    was selected, ``candidates`` only for multiple choices (ascending start) and
    ``known_range`` only for not-acceptable.
    """

    kind: DecisionKind
    subject: ResourceUri
    record: Optional[MementoRecord] = None
    location: Optional[ResourceUri] = None
    links: List[LinkEntry] = Field(default_factory=list)
    candidates: List[MementoRecord] = Field(default_factory=list)
    known_range: Optional[KnownRange] = None

    @property
    def is_redirect(self) -> bool:
        return self.kind in (DecisionKind.redirect_to_memento, DecisionKind.redirect_to_original)

    @property
    def selected_start(self) -> Optional[datetime]:
        return self.record.interval.start if self.record else None
