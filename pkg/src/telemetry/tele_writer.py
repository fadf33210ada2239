import threading
from datetime import date, datetime
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import ujson as json

from core.globals import TELEMETRY_DIR
from telemetry.models import TelemetryScope, TeleItem


__all__ = ["TeleWriter"]


class TeleWriter:
    """
    Append-only jsonl sink, one file per scope and day: <base_dir>/<scope>/YYYYMMDD.jsonl.
    Shared by the worker threads of a batch.
    """

    def __init__(
            self,
            scope: TelemetryScope,
            base_dir: Optional[Path] = None,
            clock: Callable[[], datetime] = datetime.now,
    ):
        self.scope = scope
        self.scope_dir = (base_dir or TELEMETRY_DIR) / scope.value
        self.scope_dir.mkdir(parents=True, exist_ok=True)
        self.n_written = 0
        self._clock = clock
        self._lock = threading.Lock()

    def path_for(self, day: date) -> Path:
        return self.scope_dir / f"{day:%Y%m%d}.jsonl"

    def current_file_path(self) -> Path:
        return self.path_for(self._clock().date())

    def write(self, line: TeleItem) -> None:
        record = json.dumps(line.to_dict()) + "\n"
        with self._lock:
            with self.current_file_path().open("a") as f:
                f.write(record)
            self.n_written += 1

    def read(self, day: Optional[date] = None, run_dir: Optional[Path] = None) -> List[Dict[str, Any]]:
        """Lines of one day's file (today by default), optionally only those of one run directory."""
        path = self.current_file_path() if day is None else self.path_for(day)
        if not path.exists():
            return []
        lines = [json.loads(raw) for raw in path.read_text().splitlines() if raw.strip()]
        if run_dir is not None:
            lines = [line for line in lines if line.get("run_dir") == str(run_dir)]
        return lines
