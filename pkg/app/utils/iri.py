"""Conversion between IRIs as stored in the archive and URIs as carried by HTTP."""
import re
from urllib.parse import quote, unquote_to_bytes

# Reserved characters and existing percent-escapes pass through unchanged.
_URI_SAFE = "!#$%&'()*+,/:;=?@[]~"
_ESCAPED_NON_ASCII = re.compile(r"(?:%[89A-Fa-f][0-9A-Fa-f])+")


def iri_to_uri(iri: str) -> str:
    """Percent-encode (as UTF-8) every character that may not appear in a URI or header."""
    return quote(iri, safe=_URI_SAFE)


def uri_to_iri(uri: str) -> str:
    """Decode percent-escaped UTF-8 sequences of non-ASCII characters.

    Escapes of ASCII characters are kept, so ``%2F`` or ``%28`` in a subject
    survive the round trip.
    """

    def decode(match: re.Match) -> str:
        try:
            return unquote_to_bytes(match.group(0)).decode("utf-8")
        except UnicodeDecodeError:
            return match.group(0)

    return _ESCAPED_NON_ASCII.sub(decode, uri)
