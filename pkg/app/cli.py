"""Command line: ingest snapshots, serve the archive, and query it as a client."""
import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Optional

import typer
import uvicorn

from app.config.settings import MementoUris, ServiceConfig, load_settings
from app.exceptions import MalformedDate, MementoClientError, MementoError, OutOfRange
from app.main import create_app
from app.services.archive_service import DEFAULT_CHUNK_SIZE, build_archive, open_archive, read_manifest
from app.services.memento_client import DEFAULT_MEDIA, MementoClient
from app.services.timemap_service import build_timemap, serialize_rdfxml
from app.services.timeseries_service import SERIES_FORMATS, emit, read_series_spec, run_series, series_from_archive
from app.utils.http_date import Clock, fixed_clock, format_http_date, parse_http_date, parse_iso_datetime, utc_now

logger = logging.getLogger(__name__)

EXIT_ERROR = 1
EXIT_NOT_ACCEPTABLE = 2

app = typer.Typer(help="Memento archive of versioned linked data.", no_args_is_help=True, add_completion=False)


def parse_datetime_option(raw: str) -> datetime:
    """ISO-8601 (``2008-03-20``) or HTTP-date (``Thu, 20 Mar 2008 00:00:00 GMT``)."""
    try:
        return parse_iso_datetime(raw)
    except MalformedDate:
        return parse_http_date(raw)


def make_clock(fixed_now: Optional[str]) -> Clock:
    return fixed_clock(parse_datetime_option(fixed_now)) if fixed_now else utc_now


def make_client(settings: ServiceConfig, timegate_base: Optional[str] = None, verify_coverage: bool = False) -> MementoClient:
    return MementoClient(
        max_redirects=settings.max_redirects, timegate_base=timegate_base, verify_coverage=verify_coverage
    )


def fail(message: str, code: int = EXIT_ERROR):
    typer.echo(message, err=True)
    raise typer.Exit(code)


def write_output(data: bytes, out: Optional[Path]) -> None:
    if out is None:
        typer.echo(data.decode("utf-8"), nl=False)
    else:
        out.write_bytes(data)
        logger.info(f"Wrote {len(data)} bytes to {out}")


@app.callback()
def main(
    log_level: Optional[str] = typer.Option(
        None, "--log-level", envvar="MEMENTO_LOG_LEVEL", help="Logging level (logs go to stderr)"
    ),
):
    logging.basicConfig(
        stream=sys.stderr,
        level=(log_level or "INFO").upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


@app.command()
def ingest(
    manifest: Path = typer.Argument(..., help="Manifest file: one '<ISO date> <snapshot path>' line per snapshot"),
    archive: Optional[Path] = typer.Option(None, "--archive", envvar="MEMENTO_ARCHIVE_PATH", help="Archive directory"),
    base_url: Optional[str] = typer.Option(None, "--base-url", help="Base URL memento URIs are minted under"),
    chunk_size: int = typer.Option(DEFAULT_CHUNK_SIZE, "--chunk-size", min=1, help="Triples held in memory per sort chunk"),
    strict: bool = typer.Option(False, "--strict", help="Abort on the first malformed N-Triples line"),
    fixed_now: Optional[str] = typer.Option(None, "--fixed-now", help="Pin the clock (ISO-8601)"),
):
    """Build an archive from dated N-Triples snapshots."""
    settings = load_settings(archive_path=archive, base_url=base_url)
    try:
        report = build_archive(
            read_manifest(manifest),
            settings.archive_path,
            settings.base_url,
            clock=make_clock(fixed_now),
            chunk_size=chunk_size,
            strict=strict,
        )
    except MementoError as e:
        fail(f"Ingest failed: {e}")
    typer.echo(report.summary())


@app.command()
def serve(
    archive: Optional[Path] = typer.Option(None, "--archive", envvar="MEMENTO_ARCHIVE_PATH", help="Archive directory"),
    listen: Optional[str] = typer.Option(None, "--listen", help="host:port"),
    base_url: Optional[str] = typer.Option(None, "--base-url", help="Public base URL of the service"),
    fixed_now: Optional[str] = typer.Option(None, "--fixed-now", help="Pin the clock (ISO-8601)"),
):
    """Serve TimeGates, Mementos and TimeMaps over HTTP."""
    host = port = None
    if listen:
        host, _, port = listen.rpartition(":")
        if not host or not port.isdigit():
            fail(f"--listen expects host:port, got {listen!r}")
    settings = load_settings(archive_path=archive, host=host, port=int(port) if port else None)
    if base_url is None and listen:
        settings = settings.model_copy(update={"base_url": f"http://{settings.listen}"})
    elif base_url:
        settings = settings.model_copy(update={"base_url": base_url.rstrip("/")})

    try:
        clock = make_clock(fixed_now)
        handle = open_archive(settings.archive_path, settings.base_url)
    except MementoError as e:
        fail(f"Cannot start: {e}")
    service = create_app(settings, archive=handle, clock=clock)
    logger.info(f"Serving {settings.archive_path} on {settings.listen} as {settings.base_url}")
    uvicorn.run(service, host=settings.host, port=settings.port, log_level=settings.log_level.lower())


@app.command()
def get(
    uri: str = typer.Argument(..., help="Original resource, TimeGate or memento URI"),
    at: Optional[str] = typer.Option(None, "--datetime", help="Accept-Datetime (ISO-8601 or HTTP-date)"),
    accept: str = typer.Option(DEFAULT_MEDIA, "--accept", help="Accept media type"),
    timegate_base: Optional[str] = typer.Option(None, "--timegate-base", help="TimeGate base used when no Link is found"),
    verify_coverage: bool = typer.Option(False, "--verify-coverage", help="Check the memento's interval in the TimeMap"),
):
    """Fetch a resource as it was at a datetime (or as it is now)."""
    settings = load_settings()
    try:
        t = parse_datetime_option(at) if at else None
    except MalformedDate as e:
        fail(str(e))

    client = make_client(settings, timegate_base=timegate_base, verify_coverage=verify_coverage)
    try:
        response = client.get(uri, t, media=accept)
    except OutOfRange as e:
        earliest = format_http_date(e.earliest) if e.earliest else "?"
        latest = format_http_date(e.latest) if e.latest else "?"
        fail(f"406 Not Acceptable: {e}\nKnown range: {earliest} .. {latest}", EXIT_NOT_ACCEPTABLE)
    except MementoClientError as e:
        fail(f"Request failed: {e}")

    typer.echo(f"URI: {response.final_uri}")
    typer.echo(f"Content-Datetime: {format_http_date(response.content_datetime) if response.content_datetime else '-'}")
    for entry in response.links:
        typer.echo(f"Link: {' '.join(entry.rels)} <{entry.target}>")
    if response.coverage_warning:
        typer.echo("Warning: the returned memento may not cover the requested datetime", err=True)
    typer.echo("")
    typer.echo(response.body.decode("utf-8", errors="replace"), nl=False)


@app.command()
def timemap(
    subject: str = typer.Argument(..., help="Subject URI"),
    archive: Optional[Path] = typer.Option(None, "--archive", envvar="MEMENTO_ARCHIVE_PATH", help="Archive directory"),
    base_url: Optional[str] = typer.Option(None, "--base-url", help="Base URL of the service the TimeMap points into"),
    out: Optional[Path] = typer.Option(None, "--out", help="Write to a file instead of stdout"),
    fixed_now: Optional[str] = typer.Option(None, "--fixed-now", help="Stamp created/modified with this datetime"),
):
    """Print the RDF/XML TimeMap of a subject."""
    settings = load_settings(archive_path=archive, base_url=base_url)
    try:
        handle = open_archive(settings.archive_path, settings.base_url)
        doc = build_timemap(
            handle,
            subject,
            MementoUris.from_settings(settings),
            stamp=parse_datetime_option(fixed_now) if fixed_now else None,
        )
    except MementoError as e:
        fail(str(e))
    write_output(serialize_rdfxml(doc), out)


@app.command()
def timeseries(
    spec: Path = typer.Argument(..., help="Series spec: resource/time/property lines"),
    fmt: str = typer.Option("csv", "--format", help=f"One of: {', '.join(SERIES_FORMATS)}"),
    archive: Optional[Path] = typer.Option(None, "--archive", help="Compute from this archive instead of over HTTP"),
    timegate_base: Optional[str] = typer.Option(None, "--timegate-base", help="Overrides the spec's timegate line"),
    workers: int = typer.Option(4, "--workers", min=1, help="Concurrent fetches"),
    out: Optional[Path] = typer.Option(None, "--out", help="Write to a file instead of stdout"),
):
    """Extract a property across versions into a time series."""
    if fmt not in SERIES_FORMATS:
        fail(f"Unknown format {fmt!r}; expected one of {', '.join(SERIES_FORMATS)}")
    try:
        series = read_series_spec(spec)
        if timegate_base:
            series = series.model_copy(update={"timegate_base": timegate_base})
        if archive is not None:
            result = series_from_archive(series, open_archive(archive))
        else:
            result = run_series(series, make_client(load_settings()), max_workers=workers)
    except MementoError as e:
        fail(f"Time series failed: {e}")
    write_output(emit(result, fmt), out)
