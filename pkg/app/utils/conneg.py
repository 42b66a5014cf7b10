"""Media-type selection from an Accept header (q-value matching)."""
from typing import List, NamedTuple, Optional, Sequence

RDF_XML = "application/rdf+xml"
TURTLE = "text/turtle"
N_TRIPLES = "application/n-triples"
TEXT_PLAIN = "text/plain"
TEXT_HTML = "text/html"

REPRESENTATION_TYPES = [RDF_XML, TURTLE, N_TRIPLES, TEXT_PLAIN, TEXT_HTML]


class MediaRange(NamedTuple):
    type: str
    subtype: str
    q: float
    position: int

    @property
    def specificity(self) -> int:
        if self.type == "*":
            return 0
        if self.subtype == "*":
            return 1
        return 2

    def matches(self, media_type: str) -> bool:
        offered_type, _, offered_subtype = media_type.partition("/")
        return self.type in ("*", offered_type) and self.subtype in ("*", offered_subtype)


def parse_accept(accept: Optional[str]) -> List[MediaRange]:
    """Media ranges of an Accept header; unparseable entries are ignored."""
    ranges = []
    for position, item in enumerate((accept or "").split(",")):
        parts = [part.strip() for part in item.split(";")]
        media = parts[0].lower()
        if "/" not in media:
            continue
        q = 1.0
        for param in parts[1:]:
            name, _, value = param.partition("=")
            if name.strip().lower() == "q":
                try:
                    q = float(value.strip())
                except ValueError:
                    q = 0.0
        main, _, sub = media.partition("/")
        ranges.append(MediaRange(main, sub, min(max(q, 0.0), 1.0), position))
    return ranges


def media_preferences(accept: Optional[str]) -> List[str]:
    """Accepted media ranges ordered by preference (q descending, then header order)."""
    ranges = sorted((r for r in parse_accept(accept) if r.q > 0), key=lambda r: (-r.q, r.position))
    return [f"{r.type}/{r.subtype}" for r in ranges]


def select_media(accept: Optional[str], offered: Sequence[str], default: Optional[str] = None) -> Optional[str]:
    """Best offered media type for an Accept header.

    A missing or empty header selects ``default`` (or the first offered type).
    Returns None when nothing offered is acceptable.
    """
    ranges = parse_accept(accept)
    if not ranges:
        return default or (offered[0] if offered else None)

    best = None
    best_key = None
    for index, media_type in enumerate(offered):
        matching = [r for r in ranges if r.matches(media_type)]
        if not matching:
            continue
        # The most specific matching range decides the q-value.
        decisive = max(matching, key=lambda r: (r.specificity, -r.position))
        if decisive.q <= 0:
            continue
        key = (decisive.q, decisive.specificity, media_type == default, -index)
        if best_key is None or key > best_key:
            best, best_key = media_type, key
    return best
