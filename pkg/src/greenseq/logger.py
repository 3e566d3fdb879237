"""Logging setup shared by the library and the CLI.

Plain text by default; one JSON object per line when ``json_logs`` is enabled.
Results go to stdout, so every handler here writes to stderr.
"""

from __future__ import annotations

import datetime
import json
import logging
import sys

from .settings import settings

_RESERVED = set(vars(logging.LogRecord("", 0, "", 0, "", (), None))) | {"message", "asctime"}


class JSONFormatter(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        payload = {
            "ts": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
            "level": record.levelname,
            "logger": record.name,
            "msg": record.getMessage(),
        }
        for key, value in vars(record).items():
            if key not in _RESERVED and key not in payload:
                payload[key] = value
        return json.dumps(payload, ensure_ascii=False, default=str)


def _build_handler(json_logs: bool) -> logging.Handler:
    handler = logging.StreamHandler(sys.stderr)
    if json_logs:
        handler.setFormatter(JSONFormatter())
    else:
        handler.setFormatter(logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s"))
    return handler


def setup_logging(level: str | None = None, json_logs: bool | None = None) -> None:
    level = (level or settings.log_level).upper()
    use_json = settings.json_logs if json_logs is None else json_logs
    root = logging.getLogger("greenseq")
    for handler in list(root.handlers):
        root.removeHandler(handler)
    root.addHandler(_build_handler(use_json))
    root.setLevel(level)
    root.propagate = False
