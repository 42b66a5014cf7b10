from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field, model_validator

from app.models.temporal import ResourceUri, TimestampUTC


class SeriesSpec(BaseModel):
    """Resources swept over datetimes, one per version including the current one."""

    resources: List[ResourceUri] = Field(..., min_length=1)
    times: List[TimestampUTC] = Field(..., min_length=1)
    property: ResourceUri
    timegate_base: Optional[ResourceUri] = None

    @model_validator(mode="after")
    def _strictly_increasing(self) -> "SeriesSpec":
        for earlier, later in zip(self.times, self.times[1:]):
            if not earlier < later:
                raise ValueError(f"times must be strictly increasing ({earlier.isoformat()} then {later.isoformat()})")
        return self


class Anomaly(str, Enum):
    out_of_range = "out-of-range"
    missing_property = "missing-property"
    non_numeric = "non-numeric"
    multiple_values = "multiple-values"
    fetch_failed = "fetch-failed"


class NormalizedValue(BaseModel):
    raw: str
    value: Optional[float] = None
    reason: Optional[str] = None


class CellProvenance(BaseModel):
    memento_uri: Optional[str] = None
    content_datetime: Optional[TimestampUTC] = None


class SeriesCell(BaseModel):
    value: Optional[float] = None
    provenance: CellProvenance = Field(default_factory=CellProvenance)
    anomalies: List[str] = Field(default_factory=list)


class SeriesResult(BaseModel):
    """values[r][t] for every resource r and time t of the spec, in spec order."""

    resources: List[str]
    times: List[TimestampUTC]
    property: str
    cells: List[List[SeriesCell]]

    @model_validator(mode="after")
    def _shape(self) -> "SeriesResult":
        if len(self.cells) != len(self.resources) or any(len(row) != len(self.times) for row in self.cells):
            raise ValueError("cells must be a |resources| x |times| matrix")
        return self

    @property
    def values(self) -> List[List[Optional[float]]]:
        return [[cell.value for cell in row] for row in self.cells]

    @property
    def anomalies(self) -> List[List[List[str]]]:
        return [[cell.anomalies for cell in row] for row in self.cells]
