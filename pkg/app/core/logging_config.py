"""
Logging configuration for the correlated channel toolkit.

Records go to stderr as JSON objects (or plain text) so that stdout only
carries command output. Optional rotating files live under LOGS_DIR.
"""

import json
import logging
import sys
from datetime import datetime, timezone
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import List, Optional

from app.core.config import settings

PLAIN_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class JSONFormatter(logging.Formatter):
    """One JSON object per record; extra_fields are merged at the top level"""

    def format(self, record):
        json_obj = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": record.levelname,
            "message": record.getMessage(),
            "logger": record.name,
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
        }

        command = getattr(record, "command", None)
        if command is not None:
            json_obj["command"] = command

        if record.exc_info:
            json_obj["exception"] = self.formatException(record.exc_info)

        if hasattr(record, "extra_fields"):
            json_obj.update(record.extra_fields)

        # numpy scalars and paths end up in extra_fields
        return json.dumps(json_obj, default=str)


class CommandFilter(logging.Filter):
    """Tags every record with the command being run"""

    def __init__(self, command: str):
        super().__init__()
        self.command = command

    def filter(self, record: logging.LogRecord) -> bool:
        if not hasattr(record, "command"):
            record.command = self.command
        return True


def _rotating_handlers(
    app_name: str, max_file_size: int, backup_count: int
) -> List[logging.Handler]:
    logs_dir = Path(settings.LOGS_DIR)
    logs_dir.mkdir(parents=True, exist_ok=True)

    general = RotatingFileHandler(
        logs_dir / f"{app_name}.log", maxBytes=max_file_size, backupCount=backup_count
    )
    errors = RotatingFileHandler(
        logs_dir / f"{app_name}_error.log", maxBytes=max_file_size, backupCount=backup_count
    )
    errors.setLevel(logging.ERROR)
    return [general, errors]


def setup_logging(
    app_name: str = "corrchan",
    log_level: str = "WARNING",
    json_format: bool = True,
    log_to_file: bool = False,
    log_to_console: bool = True,
    max_file_size: int = 10 * 1024 * 1024,  # 10MB
    backup_count: int = 5,
    command: Optional[str] = None,
) -> None:
    """
    Configure the root logger; safe to call once per command invocation.

    Raises:
        ValueError: If log_level is not a logging level name
    """
    root = logging.getLogger()
    root.setLevel(log_level.upper())

    # Remove existing handlers to prevent duplicates
    root.handlers = []

    formatter = JSONFormatter() if json_format else logging.Formatter(PLAIN_FORMAT)

    handlers: List[logging.Handler] = []
    if log_to_console:
        handlers.append(logging.StreamHandler(sys.stderr))
    if log_to_file:
        handlers.extend(_rotating_handlers(app_name, max_file_size, backup_count))

    for handler in handlers:
        handler.setFormatter(formatter)
        if command is not None:
            handler.addFilter(CommandFilter(command))
        root.addHandler(handler)


def get_logger(name: str) -> logging.Logger:
    """Get a logger with the specified name"""
    return logging.getLogger(name)
