import random

import pytest

from app.exceptions import MalformedLink
from app.models.link import LinkEntry, LinkRelation
from app.utils.link_header import find_rel, format_link_header, links_by_rel, parse_link_header

TIMEGATE_LINKS = (
    '<http://dbpedia.org/resource/France>; rel="original", '
    '<http://mementoarchive.example.org/memento/20070901/http://dbpedia.org/resource/France>; '
    'rel="first-memento"; datetime="Sat, 01 Sep 2007 00:00:00 GMT", '
    '<http://mementoarchive.example.org/timebundle/http://dbpedia.org/resource/France>; rel=timebundle'
)


def test_parse_timegate_links():
    entries = parse_link_header(TIMEGATE_LINKS)
    assert [entry.rels for entry in entries] == [["original"], ["first-memento"], ["timebundle"]]
    assert entries[1].params == {"datetime": "Sat, 01 Sep 2007 00:00:00 GMT"}
    assert find_rel(entries, LinkRelation.original) == "http://dbpedia.org/resource/France"


def test_multiple_rels_in_one_link():
    entries = parse_link_header('<http://a.example/m>; rel="first-memento last-memento"')
    assert entries[0].rels == ["first-memento", "last-memento"]
    assert entries[0].has_rel(LinkRelation.last_memento)


def test_rel_is_case_insensitive():
    entries = parse_link_header('<http://a.example/tg>; REL="TimeGate"')
    assert entries[0].has_rel("timegate")
    assert find_rel(entries, "TIMEGATE") == "http://a.example/tg"


def test_first_rel_attribute_wins():
    entries = parse_link_header('<http://a.example/x>; rel="original"; rel="timegate"')
    assert entries[0].rels == ["original"]


def test_relative_targets_resolve_against_base():
    entries = parse_link_header('</timegate/http://dbpedia.org/resource/France>; rel="timegate"',
                                base="http://testserver/resource/France")
    assert entries[0].target == "http://testserver/timegate/http://dbpedia.org/resource/France"


def test_quoted_values_may_contain_separators():
    entries = parse_link_header('<http://a.example/x>; rel="memento"; title="a, b; \\"c\\""')
    assert entries[0].params["title"] == 'a, b; "c"'


def test_empty_header():
    assert parse_link_header("") == []
    assert parse_link_header("   ") == []


@pytest.mark.parametrize(
    "raw",
    [
        'http://a.example/x; rel="original"',
        '<http://a.example/x; rel="original"',
        '<http://a.example/x>',
        '<http://a.example/x>; title="no rel"',
        '<http://a.example/x>; rel="original" junk',
        '<http://a.example/x>; rel="original',
        '<relative/only>; rel="original"',
    ],
)
def test_malformed_headers(raw):
    with pytest.raises(MalformedLink):
        parse_link_header(raw)


def test_links_by_rel():
    entries = parse_link_header(
        '<http://a.example/1>; rel="memento", <http://a.example/2>; rel="memento first-memento"'
    )
    assert links_by_rel(entries) == {
        "memento": ["http://a.example/1", "http://a.example/2"],
        "first-memento": ["http://a.example/2"],
    }


def test_format_link_header():
    entries = [
        LinkEntry(target="http://a.example/o", rels=[LinkRelation.original]),
        LinkEntry(target="http://a.example/m", rels=["prev-memento"], params={"datetime": "Sat, 01 Sep 2007 00:00:00 GMT"}),
    ]
    assert format_link_header(entries) == (
        '<http://a.example/o>; rel="original", '
        '<http://a.example/m>; rel="prev-memento"; datetime="Sat, 01 Sep 2007 00:00:00 GMT"'
    )


RELS = [rel.value for rel in LinkRelation] + ["memento", "alternate", "describedby"]
PARAM_VALUES = ["Sat, 01 Sep 2007 00:00:00 GMT", "application/rdf+xml", 'say "hi"', "a;b,c", "back\\slash", ""]


def random_entry(rng: random.Random) -> LinkEntry:
    path = "/".join(rng.choice(["memento", "20080201", "resource", "France", "a-b_c", "x.y"]) for _ in range(3))
    params = {}
    for name in rng.sample(["datetime", "type", "title", "anchor"], rng.randint(0, 3)):
        params[name] = rng.choice(PARAM_VALUES)
    return LinkEntry(
        target=f"http://{rng.choice(['a.example', 'dbpedia.org', 'testserver:8085'])}/{path}",
        rels=rng.sample(RELS, rng.randint(1, 3)),
        params=params,
    )


def test_format_then_parse_is_identity():
    rng = random.Random(20080320)
    for _ in range(500):
        entries = [random_entry(rng) for _ in range(rng.randint(1, 6))]
        assert parse_link_header(format_link_header(entries)) == entries
