from enum import Enum
from typing import Dict, List

from pydantic import BaseModel, Field, field_validator

from app.models.temporal import ResourceUri


class LinkRelation(str, Enum):
    timegate = "timegate"
    timebundle = "timebundle"
    original = "original"
    first_memento = "first-memento"
    last_memento = "last-memento"
    prev_memento = "prev-memento"
    next_memento = "next-memento"


def rel_token(rel) -> str:
    """Canonical lowercase token for a LinkRelation or any extension relation."""
    if isinstance(rel, LinkRelation):
        return rel.value
    return str(rel).lower()


class LinkEntry(BaseModel):
    target: ResourceUri
    rels: List[str] = Field(..., min_length=1)
    params: Dict[str, str] = Field(default_factory=dict)

    @field_validator("rels", mode="before")
    @classmethod
    def _canonical_rels(cls, value):
        return [rel_token(rel) for rel in value]

    def has_rel(self, rel) -> bool:
        return rel_token(rel) in self.rels
