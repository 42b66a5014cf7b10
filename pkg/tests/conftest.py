import pytest
from fastapi.testclient import TestClient

from app.config.settings import MementoUris, ServiceConfig
from app.main import create_app
from app.services.archive_service import Archive, build_archive, read_manifest
from app.services.memento_client import MementoClient
from app.services.timegate_service import TimeGate
from app.utils.http_date import fixed_clock
from tests.snapshots import FRANCE, GREECE, NOW, SNAPSHOT_DATES, write_snapshot_set

BASE_URL = "http://testserver"

# Noise in the first snapshot: one blank-node subject and one malformed line.
EXTRA_LINES = {0: ['_:b0 <http://example.org/p> "blank" .', "<http://example.org/broken> this is not a triple"]}


@pytest.fixture(scope="session")
def archive_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("dbpedia")
    manifest = write_snapshot_set(root / "snapshots", extra_lines=EXTRA_LINES)
    build_archive(read_manifest(manifest), root / "archive", BASE_URL, clock=fixed_clock(NOW), chunk_size=3)
    return root / "archive"


@pytest.fixture(scope="session")
def archive(archive_dir) -> Archive:
    return Archive.open(archive_dir)


@pytest.fixture
def settings(archive_dir) -> ServiceConfig:
    return ServiceConfig(base_url=BASE_URL, archive_path=archive_dir)


@pytest.fixture
def uris(settings) -> MementoUris:
    return MementoUris.from_settings(settings)


@pytest.fixture
def timegate(archive, uris) -> TimeGate:
    return TimeGate(archive, uris, clock=fixed_clock(NOW))


@pytest.fixture
def app(settings, archive):
    return create_app(settings, archive=archive, clock=fixed_clock(NOW))


@pytest.fixture
def client(app) -> TestClient:
    return TestClient(app)


@pytest.fixture
def memento_client(client) -> MementoClient:
    return MementoClient(http=client)


@pytest.fixture(scope="session")
def unicode_archive(tmp_path_factory) -> Archive:
    root = tmp_path_factory.mktemp("unicode")
    table = {GREECE: ["24,000", "25,500", "26,900"], FRANCE: ["29,000", "$30,100", "31500 (2008 est.)"]}
    manifest = write_snapshot_set(root / "snapshots", table=table, dates=SNAPSHOT_DATES[:3])
    build_archive(read_manifest(manifest), root / "archive", BASE_URL, clock=fixed_clock(NOW))
    return Archive.open(root / "archive")


@pytest.fixture
def unicode_client(settings, unicode_archive) -> TestClient:
    return TestClient(create_app(settings, archive=unicode_archive, clock=fixed_clock(NOW)))
