import os
from pathlib import Path
from importlib.metadata import version, PackageNotFoundError


try:
    VERSION = version("macrosounder")
except PackageNotFoundError:
    VERSION = "0.0.0"


BASE_DIR: Path = Path(
    os.environ.get("SOUNDER_BASE_DIR") or Path(__file__).resolve().parent.parent.parent
)
LOGS_DIR = BASE_DIR / "logs"
TELEMETRY_DIR = BASE_DIR / "telemetry"
RUNS_DIR = BASE_DIR / "runs"
CONFIGS_DIR = BASE_DIR / "configs"
