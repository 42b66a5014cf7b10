"""Parser and serializer for the HTTP Link header field."""
import re
from typing import Dict, List, Optional, Tuple
from urllib.parse import urljoin

from pydantic import ValidationError

from app.exceptions import MalformedLink
from app.models.link import LinkEntry, rel_token

_TOKEN = re.compile(r"[!#$%&'*+\-.^_`|~0-9A-Za-z]+")
_WS = " \t"


def _skip_ws(raw: str, pos: int) -> int:
    while pos < len(raw) and raw[pos] in _WS:
        pos += 1
    return pos


def _read_value(raw: str, pos: int) -> Tuple[str, int]:
    if pos < len(raw) and raw[pos] == '"':
        chars = []
        pos += 1
        while pos < len(raw):
            ch = raw[pos]
            if ch == "\\" and pos + 1 < len(raw):
                chars.append(raw[pos + 1])
                pos += 2
                continue
            if ch == '"':
                return "".join(chars), pos + 1
            chars.append(ch)
            pos += 1
        raise MalformedLink(f"Unterminated quoted string in Link header: {raw!r}")

    start = pos
    while pos < len(raw) and raw[pos] not in _WS + ";,":
        pos += 1
    return raw[start:pos], pos


def parse_link_header(raw: str, base: Optional[str] = None) -> List[LinkEntry]:
    """Parse a full Link header value into entries, in header order.

    Relative targets are resolved against ``base`` when one is given. Only
    the first ``rel`` attribute of a link counts; it is split on whitespace.
    """
    raw = raw or ""
    entries: List[LinkEntry] = []
    pos = 0
    n = len(raw)

    while True:
        pos = _skip_ws(raw, pos)
        if pos >= n:
            break
        if raw[pos] != "<":
            raise MalformedLink(f"Expected '<' at offset {pos} in Link header: {raw!r}")
        close = raw.find(">", pos + 1)
        if close < 0:
            raise MalformedLink(f"Unbalanced '<' at offset {pos} in Link header: {raw!r}")
        target = raw[pos + 1:close].strip()
        pos = close + 1

        rels: Optional[List[str]] = None
        params: Dict[str, str] = {}
        while True:
            pos = _skip_ws(raw, pos)
            if pos >= n:
                break
            if raw[pos] == ",":
                pos += 1
                break
            if raw[pos] != ";":
                raise MalformedLink(f"Expected ';' or ',' at offset {pos} in Link header: {raw!r}")
            pos = _skip_ws(raw, pos + 1)
            match = _TOKEN.match(raw, pos)
            if not match:
                raise MalformedLink(f"Expected parameter name at offset {pos} in Link header: {raw!r}")
            name = match.group(0).lower()
            pos = _skip_ws(raw, match.end())
            value = ""
            if pos < n and raw[pos] == "=":
                value, pos = _read_value(raw, _skip_ws(raw, pos + 1))
            if name == "rel":
                if rels is None:
                    rels = value.split()
            elif name not in params:
                params[name] = value

        if not rels:
            raise MalformedLink(f"Link to {target!r} has no rel attribute")
        if base:
            target = urljoin(base, target)
        try:
            entries.append(LinkEntry(target=target, rels=rels, params=params))
        except ValidationError as e:
            raise MalformedLink(f"Invalid link to {target!r}: {e.errors()[0]['msg']}")

    return entries


def _quote(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_link_entry(entry: LinkEntry) -> str:
    parts = [f"<{entry.target}>", f"rel={_quote(' '.join(entry.rels))}"]
    parts.extend(f"{name}={_quote(value)}" for name, value in entry.params.items())
    return "; ".join(parts)


def format_link_header(entries: List[LinkEntry]) -> str:
    return ", ".join(format_link_entry(entry) for entry in entries)


def find_rel(entries: List[LinkEntry], rel) -> Optional[str]:
    token = rel_token(rel)
    for entry in entries:
        if token in entry.rels:
            return entry.target
    return None


def links_by_rel(entries: List[LinkEntry]) -> Dict[str, List[str]]:
    grouped: Dict[str, List[str]] = {}
    for entry in entries:
        for rel in entry.rels:
            grouped.setdefault(rel, []).append(entry.target)
    return grouped
