"""Logging configuration."""
import logging
import sys
from datetime import datetime, timezone
from typing import Optional

import orjson

from jointflex.config import settings

# Context attributes passed through ``extra=`` that end up in the JSON line.
CONTEXT_FIELDS = ("run_id", "iteration", "command", "body", "n_rows", "n_cols")


class JSONFormatter(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        log_data = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }

        for field in CONTEXT_FIELDS:
            if hasattr(record, field):
                log_data[field] = getattr(record, field)

        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)

        return orjson.dumps(log_data, default=str).decode()


def setup_logging(level: Optional[str] = None, fmt: Optional[str] = None) -> None:
    """Configure application logging.

    Logs go to stderr so command output on stdout stays machine-readable.
    """
    root_logger = logging.getLogger()
    root_logger.setLevel(getattr(logging, (level or settings.LOG_LEVEL).upper()))
    root_logger.handlers = []

    console_handler = logging.StreamHandler(sys.stderr)
    if (fmt or settings.LOG_FORMAT) == "json":
        console_handler.setFormatter(JSONFormatter())
    else:
        console_handler.setFormatter(
            logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s")
        )
    root_logger.addHandler(console_handler)


def get_logger(name: str) -> logging.Logger:
    """Get logger instance."""
    return logging.getLogger(name)
