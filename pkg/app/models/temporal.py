from datetime import datetime, timezone
from typing import Annotated, Optional
from urllib.parse import urlsplit

from pydantic import AfterValidator, BaseModel, ConfigDict, model_validator


def to_utc(value: datetime) -> datetime:
    """Normalize a datetime to an aware UTC instant at second granularity.

    Naive values are taken to already be UTC.
    """
    if value.tzinfo is None:
        value = value.replace(tzinfo=timezone.utc)
    return value.astimezone(timezone.utc).replace(microsecond=0)


def is_absolute_uri(value: str) -> bool:
    parts = urlsplit(value)
    return bool(parts.scheme) and bool(parts.netloc)


def _check_absolute(value: str) -> str:
    if not value or not is_absolute_uri(value):
        raise ValueError(f"not an absolute URI: {value!r}")
    return value


TimestampUTC = Annotated[datetime, AfterValidator(to_utc)]
ResourceUri = Annotated[str, AfterValidator(_check_absolute)]


class VersionInterval(BaseModel):
    """Half-open validity span [start, end); an absent end is still current."""

    model_config = ConfigDict(frozen=True)

    start: TimestampUTC
    end: Optional[TimestampUTC] = None

    @model_validator(mode="after")
    def _start_before_end(self) -> "VersionInterval":
        if self.end is not None and not self.start < self.end:
            raise ValueError(f"interval start {self.start} must precede end {self.end}")
        return self

    def covers(self, t: datetime) -> bool:
        t = to_utc(t)
        return self.start <= t and (self.end is None or t < self.end)


def interval_covers(iv: VersionInterval, t: datetime) -> bool:
    return iv.covers(t)
