from pathlib import Path
from typing import Optional
from urllib.parse import quote

from decouple import config
from pydantic import BaseModel, Field, field_validator

from app.models.temporal import ResourceUri
from app.utils.iri import iri_to_uri

_NAME_SAFE = "/:@!$&()*+,;=-._~"


class ServiceConfig(BaseModel):
    host: str = "127.0.0.1"
    port: int = Field(8085, ge=1, le=65535)
    base_url: ResourceUri = "http://127.0.0.1:8085"
    archive_path: Path = Path("archive")
    default_media_type: str = "application/rdf+xml"
    resource_namespace: ResourceUri = "http://dbpedia.org/resource/"
    external_originals: bool = False
    max_redirects: int = Field(5, ge=1)
    log_level: str = "INFO"

    @field_validator("base_url")
    @classmethod
    def _strip_trailing_slash(cls, value: str) -> str:
        return value.rstrip("/")

    @property
    def listen(self) -> str:
        return f"{self.host}:{self.port}"


def load_settings(**overrides) -> ServiceConfig:
    """Build the service configuration from the environment (or .env), then apply overrides."""
    values = {
        "host": config("MEMENTO_HOST", default="127.0.0.1"),
        "port": config("MEMENTO_PORT", default=8085, cast=int),
        "base_url": config("MEMENTO_BASE_URL", default="http://127.0.0.1:8085"),
        "archive_path": config("MEMENTO_ARCHIVE_PATH", default="archive"),
        "default_media_type": config("MEMENTO_DEFAULT_MEDIA_TYPE", default="application/rdf+xml"),
        "resource_namespace": config("MEMENTO_RESOURCE_NAMESPACE", default="http://dbpedia.org/resource/"),
        "external_originals": config("MEMENTO_EXTERNAL_ORIGINALS", default=False, cast=bool),
        "max_redirects": config("MEMENTO_MAX_REDIRECTS", default=5, cast=int),
        "log_level": config("MEMENTO_LOG_LEVEL", default="INFO"),
    }
    values.update({key: value for key, value in overrides.items() if value is not None})
    return ServiceConfig(**values)


class MementoUris:
    """Mints the URIs of the service's URL layout for a subject.

    ``/resource/<name>`` emulates the original resource for subjects inside the
    configured namespace, unless external originals are enabled.
    """

    def __init__(self, base_url: str, resource_namespace: str, external_originals: bool = False):
        self.base_url = base_url.rstrip("/")
        self.resource_namespace = resource_namespace
        self.external_originals = external_originals

    @classmethod
    def from_settings(cls, settings: ServiceConfig) -> "MementoUris":
        return cls(settings.base_url, settings.resource_namespace, settings.external_originals)

    def timegate(self, subject: str) -> str:
        return f"{self.base_url}/timegate/{iri_to_uri(subject)}"

    def timebundle(self, subject: str) -> str:
        return f"{self.base_url}/timebundle/{iri_to_uri(subject)}"

    def timemap(self, subject: str, fmt: str = "rdf") -> str:
        return f"{self.base_url}/timemap/{fmt}/{iri_to_uri(subject)}"

    def original(self, subject: str) -> str:
        name = self.resource_name(subject)
        if self.external_originals or name is None:
            return iri_to_uri(subject)
        return f"{self.base_url}/resource/{quote(name, safe=_NAME_SAFE)}"

    def resource_name(self, subject: str) -> Optional[str]:
        if subject.startswith(self.resource_namespace) and len(subject) > len(self.resource_namespace):
            return subject[len(self.resource_namespace):]
        return None

    def subject_for_name(self, name: str) -> str:
        return f"{self.resource_namespace}{name}"
