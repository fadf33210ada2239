import sys
import logging

from contextlib import contextmanager
from datetime import datetime
from pathlib import Path
from typing import Iterator, Optional

from termcolor import colored

from core.globals import LOGS_DIR

__all__ = ['init_logger', 'run_log', 'info', 'error', 'warn', 'debug', 'exception']

logger = logging.getLogger("SOUNDER")
info = logger.info
error = logger.error
warn = logger.warning
debug = logger.debug
exception = logger.exception

FMT = '%(asctime)s %(levelname)s [%(filename)s] %(message)s'
DATE_FMT = '%Y%m%d %H:%M:%S'

# numba compiles lazily and is chatty at DEBUG
EXCLUDED_LOGGERS = ('numba',)

LEVEL_COLORS = {
    logging.DEBUG: 'dark_grey',
    logging.WARNING: 'yellow',
    logging.ERROR: 'red',
    logging.CRITICAL: 'red',
}


class ExcludeFilter(logging.Filter):
    def filter(self, record: logging.LogRecord) -> bool:
        return not record.name.startswith(EXCLUDED_LOGGERS)


class ColoredConsoleHandler(logging.Handler):
    """stderr, level name colored; stdout is left to the rich summaries."""

    def emit(self, record: logging.LogRecord) -> None:
        original_levelname = record.levelname
        color = LEVEL_COLORS.get(record.levelno)
        if color is not None:
            record.levelname = colored(record.levelname, color)
        try:
            log_entry = self.format(record)
        finally:
            record.levelname = original_levelname
        sys.stderr.write(f"{log_entry}\n")
        sys.stderr.flush()


class DailyFileHandler(logging.Handler):
    """One file per calendar day, logs/YYYYMMDD.log; rolls over on the first record of a new day."""

    def __init__(self, log_dir: Path, encoding: str = 'utf-8'):
        super().__init__()
        self.log_dir = Path(log_dir)
        self.encoding = encoding
        self.current_date: Optional[str] = None
        self.file_handler: Optional[logging.FileHandler] = None

    def _roll(self) -> logging.FileHandler:
        today = datetime.now().strftime("%Y%m%d")
        if today != self.current_date or self.file_handler is None:
            if self.file_handler is not None:
                self.file_handler.close()
            self.file_handler = logging.FileHandler(self.log_dir / f"{today}.log", encoding=self.encoding)
            self.file_handler.setFormatter(self.formatter)
            self.current_date = today
        return self.file_handler

    def emit(self, record: logging.LogRecord) -> None:
        self._roll().emit(record)

    def setFormatter(self, formatter: logging.Formatter) -> None:
        super().setFormatter(formatter)
        if self.file_handler is not None:
            self.file_handler.setFormatter(formatter)

    def close(self) -> None:
        if self.file_handler is not None:
            self.file_handler.close()
        super().close()


def init_logger(debug_on: bool, log_dir: Optional[Path] = None) -> None:
    """Console and daily-file handlers on the root logger. Safe to call again: handlers are replaced."""
    log_path = log_dir or LOGS_DIR
    log_path.mkdir(parents=True, exist_ok=True)

    formatter = logging.Formatter(FMT, DATE_FMT)
    exclude_filter = ExcludeFilter()
    handlers = [ColoredConsoleHandler(), DailyFileHandler(log_path)]
    for handler in handlers:
        handler.setFormatter(formatter)
        handler.addFilter(exclude_filter)

    logging.basicConfig(
        level=logging.DEBUG if debug_on else logging.INFO,
        handlers=handlers,
        force=True,
    )


@contextmanager
def run_log(out_dir: Path) -> Iterator[Path]:
    """Copy of every record emitted inside the block, written to <out_dir>/run.log."""
    path = Path(out_dir) / "run.log"
    path.parent.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(path, encoding='utf-8')
    handler.setFormatter(logging.Formatter(FMT, DATE_FMT))
    handler.addFilter(ExcludeFilter())
    root = logging.getLogger()
    root.addHandler(handler)
    try:
        yield path
    finally:
        root.removeHandler(handler)
        handler.close()
