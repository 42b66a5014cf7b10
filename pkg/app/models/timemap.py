from typing import List

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.models.temporal import ResourceUri, TimestampUTC, VersionInterval


class TimeMapMemento(BaseModel):
    model_config = ConfigDict(frozen=True)

    uri: ResourceUri
    interval: VersionInterval

    @field_validator("interval")
    @classmethod
    def _closed_interval(cls, value: VersionInterval) -> VersionInterval:
        if value.end is None:
            raise ValueError("a memento listed in a TimeMap needs an end datetime")
        return value


class TimeMapDoc(BaseModel):
    """A TimeMap: the mementos of one original resource and the TimeGate covering them.

    ``warnings`` collects repairs made while parsing (swapped or overlapping
    periods); built documents never carry any.
    """

    timemap_uri: ResourceUri
    timebundle_uri: ResourceUri
    original: ResourceUri
    timegate: ResourceUri
    covers: VersionInterval
    mementos: List[TimeMapMemento] = Field(..., min_length=1)
    created: TimestampUTC
    modified: TimestampUTC
    warnings: List[str] = Field(default_factory=list)

    @field_validator("mementos")
    @classmethod
    def _ascending(cls, value: List[TimeMapMemento]) -> List[TimeMapMemento]:
        return sorted(value, key=lambda memento: memento.interval.start)

    def overlaps(self) -> List[str]:
        """URIs of mementos whose interval overlaps the following one."""
        return [
            current.uri
            for current, following in zip(self.mementos, self.mementos[1:])
            if following.interval.start < current.interval.end
        ]
