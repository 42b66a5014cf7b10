"""HTTP-date and ISO-8601 codecs for Accept-Datetime, Content-Datetime and TimeMap literals."""
import re
from datetime import datetime, timezone
from email.utils import format_datetime, parsedate_to_datetime
from typing import Callable

from app.exceptions import MalformedDate
from app.models.temporal import to_utc

Clock = Callable[[], datetime]

# Fixed-length form only: "Thu, 20 Mar 2008 00:00:00 GMT"
_HTTP_DATE = re.compile(
    r"(Mon|Tue|Wed|Thu|Fri|Sat|Sun), \d{2} "
    r"(Jan|Feb|Mar|Apr|May|Jun|Jul|Aug|Sep|Oct|Nov|Dec) \d{4} "
    r"\d{2}:\d{2}:\d{2} GMT"
)


def utc_now() -> datetime:
    return to_utc(datetime.now(timezone.utc))


def fixed_clock(instant: datetime) -> Clock:
    pinned = to_utc(instant)
    return lambda: pinned


def parse_http_date(raw: str) -> datetime:
    if raw is None or not _HTTP_DATE.fullmatch(raw):
        raise MalformedDate(f"Not an HTTP-date: {raw!r}")
    try:
        parsed = parsedate_to_datetime(raw)
    except (TypeError, ValueError) as e:
        raise MalformedDate(f"Invalid HTTP-date {raw!r}: {e}")
    parsed = to_utc(parsed)
    # Rejects a weekday that disagrees with the calendar date.
    if format_http_date(parsed) != raw:
        raise MalformedDate(f"Non-canonical HTTP-date: {raw!r}")
    return parsed


def format_http_date(t: datetime) -> str:
    return format_datetime(to_utc(t), usegmt=True)


def parse_iso_datetime(raw: str) -> datetime:
    value = raw.strip()
    if value.endswith("Z") or value.endswith("z"):
        value = value[:-1] + "+00:00"
    try:
        return to_utc(datetime.fromisoformat(value))
    except ValueError as e:
        raise MalformedDate(f"Not an ISO-8601 datetime: {raw!r}: {e}")


def format_iso_datetime(t: datetime) -> str:
    return to_utc(t).strftime("%Y-%m-%dT%H:%M:%SZ")


def format_path_date(t: datetime) -> str:
    """YYYYMMDD segment used in memento URIs."""
    return to_utc(t).strftime("%Y%m%d")
