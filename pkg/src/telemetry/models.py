from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from typing import Dict, Optional, Union, Any

from pydantic import BaseModel, Field

from core.globals import VERSION


class PointStatus(Enum):
    OK = "ok"
    FAILED = "failed"


@dataclass
class PointTiming:
    event: str
    status: PointStatus
    ts_created: float
    duration_seconds: float
    point_index: Optional[int] = None
    error_message: Optional[str] = None


class TelemetryScope(Enum):
    RUN = "run"


class TeleItemStatus(Enum):
    INFO = "info"
    SUCCESS = "success"
    FAILURE = "failure"


class TeleRunPoint(BaseModel):
    version: str = "v0"
    event: str

    status: TeleItemStatus
    error_message: Optional[str] = None

    run_dir: Optional[str] = None
    point_index: Optional[int] = None
    n_channels: Optional[int] = None
    method: Optional[str] = None
    fingerprint: Optional[str] = None

    attributes: Optional[Dict[str, Any]] = None

    duration_seconds: Optional[float] = None
    timestamp: datetime = Field(default_factory=datetime.now)

    app_version: str = VERSION

    def to_dict(self) -> Dict[str, Any]:
        return {
            "version": self.version,
            "event": self.event,
            "status": self.status.value,
            "error_message": self.error_message,
            "run_dir": self.run_dir,
            "point_index": self.point_index,
            "n_channels": self.n_channels,
            "method": self.method,
            "fingerprint": self.fingerprint,
            "attributes": self.attributes,
            "duration_seconds": self.duration_seconds,
            "timestamp": self.timestamp.isoformat() if self.timestamp else None,
            "app_version": self.app_version,
        }

    def write(self, writer):
        writer.write(self)


TeleItem = Union[TeleRunPoint]
