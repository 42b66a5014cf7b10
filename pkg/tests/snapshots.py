"""Synthetic DBpedia-like snapshot sets for the test suite."""
import random
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Dict, List, Optional

UTC = timezone.utc
RESOURCE = "http://dbpedia.org/resource/"
GDP = "http://dbpedia.org/property/gdpPppPerCapita"
LABEL = "http://www.w3.org/2000/01/rdf-schema#label"

FRANCE = f"{RESOURCE}France"
GERMANY = f"{RESOURCE}Germany"
ITALY = f"{RESOURCE}Italy"
SPAIN = f"{RESOURCE}Spain"
ATLANTIS = f"{RESOURCE}Atlantis"
GONDWANA = f"{RESOURCE}Gondwana"
GREECE = f"{RESOURCE}Ελλάδα"
# GREECE as it appears in URIs and headers: UTF-8, percent-encoded.
GREECE_ESCAPED = f"{RESOURCE}%CE%95%CE%BB%CE%BB%CE%AC%CE%B4%CE%B1"

SNAPSHOT_DATES = [
    datetime(2007, 9, 1, tzinfo=UTC),
    datetime(2008, 2, 1, tzinfo=UTC),
    datetime(2008, 8, 1, tzinfo=UTC),
    datetime(2008, 11, 1, tzinfo=UTC),
    datetime(2009, 7, 1, tzinfo=UTC),
    datetime(2009, 11, 1, tzinfo=UTC),
]
NOW = datetime(2010, 3, 1, tzinfo=UTC)

# gdpPppPerCapita literal per snapshot; None = subject absent from that snapshot.
GDP_TABLE: Dict[str, List[Optional[str]]] = {
    FRANCE: ["29,000", "$30,100", "31500 (2008 est.)", "3.2e4", "33000", "34,250"],
    GERMANY: ["31,400", "32,000", "$33,200", "34100", "35,000", "35,900"],
    ITALY: ["28,300", "29,100", None, "30,200", "unknown", "31,000"],
    SPAIN: [None, None, "26,100", "27,000", "€28,200", "29,400"],
    ATLANTIS: [None, None, None, None, None, "1"],
    GONDWANA: ["12", "13", None, None, None, None],
}
GDP_VALUES: Dict[str, List[Optional[float]]] = {
    FRANCE: [29000.0, 30100.0, 31500.0, 32000.0, 33000.0, 34250.0],
    GERMANY: [31400.0, 32000.0, 33200.0, 34100.0, 35000.0, 35900.0],
    ITALY: [28300.0, 29100.0, None, 30200.0, None, 31000.0],
    SPAIN: [None, None, 26100.0, 27000.0, 28200.0, 29400.0],
    ATLANTIS: [None, None, None, None, None, 1.0],
    GONDWANA: [12.0, 13.0, None, None, None, None],
}


def subject_lines(subject: str, value: str) -> List[str]:
    name = subject[len(RESOURCE):]
    return [
        f'<{subject}> <{LABEL}> "{name}"@en .',
        f'<{subject}> <{GDP}> "{value}" .',
    ]


def write_snapshot_set(
    directory: Path,
    table: Dict[str, List[Optional[str]]] = GDP_TABLE,
    dates: List[datetime] = SNAPSHOT_DATES,
    extra_lines: Optional[Dict[int, List[str]]] = None,
) -> Path:
    """Write one N-Triples file per date plus a manifest; returns the manifest path."""
    directory.mkdir(parents=True, exist_ok=True)
    manifest = []
    for index, date in enumerate(dates):
        lines = []
        for subject, values in table.items():
            if values[index] is not None:
                lines.extend(subject_lines(subject, values[index]))
        lines.extend((extra_lines or {}).get(index, []))
        name = f"snapshot-{index}.nt"
        (directory / name).write_text("\n".join(lines) + "\n", encoding="utf-8")
        manifest.append(f"{date.isoformat()} {name}")
    path = directory / "manifest.txt"
    path.write_text("# test snapshots\n" + "\n".join(manifest) + "\n", encoding="utf-8")
    return path


def random_table(rng: random.Random, subjects: int, snapshots: int) -> Dict[str, List[Optional[str]]]:
    table = {}
    for i in range(subjects):
        presence = [rng.random() < 0.7 for _ in range(snapshots)]
        if not any(presence):
            presence[rng.randrange(snapshots)] = True
        table[f"http://example.org/thing/{i}"] = [str(rng.randint(1, 10_000)) if p else None for p in presence]
    return table


def random_dates(rng: random.Random, snapshots: int) -> List[datetime]:
    dates = []
    current = datetime(2005, 1, 1, tzinfo=UTC)
    for _ in range(snapshots):
        current += timedelta(days=rng.randint(1, 400))
        dates.append(current)
    return dates


def oracle_lookup(values: List[Optional[str]], dates: List[datetime], t: datetime):
    """Brute force: ("current", None), ("memento", snapshot index) or ("out-of-range", None)."""
    last = len(dates) - 1
    if values[last] is not None and t >= dates[last]:
        return "current", None
    selected = None
    for index in range(last):
        if values[index] is not None and dates[index] <= t:
            selected = index
    if selected is None:
        return "out-of-range", None
    return "memento", selected
