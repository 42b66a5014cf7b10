#!/usr/bin/env python3
"""
Sample data for local development.
Writes six dated DBpedia-like N-Triples snapshots plus a manifest, and
optionally ingests them into an archive.
"""

import sys
from pathlib import Path
from typing import Dict, List, Optional

import typer

# Add the repository root to the Python path
sys.path.append(str(Path(__file__).resolve().parent.parent))

from app.services.archive_service import build_archive, read_manifest  # noqa: E402

RESOURCE = "http://dbpedia.org/resource/"
PROPERTY = "http://dbpedia.org/property/"
RDFS_LABEL = "http://www.w3.org/2000/01/rdf-schema#label"

SNAPSHOT_DATES = ["2007-09-01", "2008-02-01", "2008-08-01", "2008-11-01", "2009-07-01", "2009-11-01"]

# gdpPppPerCapita literal per snapshot; None means the country is absent from that snapshot.
GDP: Dict[str, List[Optional[str]]] = {
    "France": ["29,000", "$30,100", "31500 (2008 est.)", "3.2e4", "33000", "34,250"],
    "Germany": ["31,400", "32,000", "$33,200", "34100", "35,000", "35,900"],
    "Italy": ["28,300", "29,100", None, "30,200", "unknown", "31,000"],
    "Spain": [None, None, "26,100", "27,000", "€28,200", "29,400"],
}
CAPITALS = {"France": "Paris", "Germany": "Berlin", "Italy": "Rome", "Spain": "Madrid"}


def snapshot_lines(index: int) -> List[str]:
    lines = []
    for country, values in GDP.items():
        value = values[index]
        if value is None:
            continue
        subject = f"<{RESOURCE}{country}>"
        lines.append(f'{subject} <{RDFS_LABEL}> "{country}"@en .')
        lines.append(f"{subject} <{PROPERTY}capital> <{RESOURCE}{CAPITALS[country]}> .")
        lines.append(f'{subject} <{PROPERTY}gdpPppPerCapita> "{value}" .')
        capital = f"<{RESOURCE}{CAPITALS[country]}>"
        lines.append(f'{capital} <{RDFS_LABEL}> "{CAPITALS[country]}"@en .')
    return lines


def write_snapshots(directory: Path) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    manifest = []
    for index, date in enumerate(SNAPSHOT_DATES):
        name = f"dbpedia-{date}.nt"
        (directory / name).write_text("\n".join(snapshot_lines(index)) + "\n", encoding="utf-8")
        manifest.append(f"{date} {name}")
    manifest_path = directory / "manifest.txt"
    manifest_path.write_text("\n".join(manifest) + "\n", encoding="utf-8")
    return manifest_path


def main(
    directory: Path = typer.Argument(Path("data/snapshots"), help="Where to write snapshots and manifest"),
    archive: Optional[Path] = typer.Option(None, "--archive", help="Also ingest into this archive"),
    base_url: str = typer.Option("http://127.0.0.1:8085", "--base-url"),
):
    manifest_path = write_snapshots(directory)
    print(f"Wrote {len(SNAPSHOT_DATES)} snapshots, manifest {manifest_path}")
    if archive is not None:
        report = build_archive(read_manifest(manifest_path), archive, base_url)
        print(report.summary())


if __name__ == "__main__":
    typer.run(main)
