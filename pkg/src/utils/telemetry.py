"""JSONL run log written next to generated datasets and plots."""

from __future__ import annotations

import json
import os
import time
import uuid
from contextlib import contextmanager
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterator, Optional

from .. import __version__

DISABLED_VALUES = frozenset({"0", "false", "off"})


class TelemetryLogger:
    """
    Appends one JSON object per event to ``telemetry.log``.

    On by default. Turned off by ``TAILGATE_TELEMETRY=0|false|off``, by
    ``enabled=False`` or by passing no directory. Every event of one logger
    shares a ``run_id``. Datasets and plots never carry these timestamps.
    """

    ENV_FLAG = "TAILGATE_TELEMETRY"
    LOG_NAME = "telemetry.log"

    def __init__(self, output_dir: Optional[Path | str], enabled: Optional[bool] = None):
        self.output_dir = Path(output_dir) if output_dir is not None else None
        self.log_path = self.output_dir / self.LOG_NAME if self.output_dir is not None else None
        self.enabled = self._resolve_enabled(enabled) if self.output_dir is not None else False
        self.run_id = uuid.uuid4().hex
        self.events_written = 0

    @classmethod
    def _resolve_enabled(cls, enabled: Optional[bool]) -> bool:
        if enabled is not None:
            return enabled
        env_value = os.getenv(cls.ENV_FLAG)
        return env_value is None or env_value.strip().lower() not in DISABLED_VALUES

    @classmethod
    def for_output(cls, output_path: Path | str) -> TelemetryLogger:
        """Logger writing into the directory of ``output_path``."""
        return cls(Path(output_path).expanduser().resolve().parent)

    def log_event(self, event: str, payload: Dict[str, Any]) -> None:
        """Append ``event`` if logging is enabled; write errors are printed, not raised."""
        if not self.enabled:
            return

        entry = {
            "timestamp": datetime.now(tz=timezone.utc).isoformat(),
            "run_id": self.run_id,
            "version": __version__,
            "event": event,
            "payload": payload,
        }
        try:
            self.log_path.parent.mkdir(parents=True, exist_ok=True)
            with self.log_path.open("a", encoding="utf-8") as handle:
                handle.write(json.dumps(entry, default=str) + "\n")
            self.events_written += 1
        except Exception as exc:
            print(f"[telemetry] Failed to write event '{event}': {exc}")

    @contextmanager
    def timed(self, event: str, payload: Dict[str, Any]) -> Iterator[Dict[str, Any]]:
        """
        Log ``event`` when the block finishes, with ``duration_s`` added.

        The yielded dict is the payload; the block may add results to it.
        Nothing is logged if the block raises.
        """
        start = time.perf_counter()
        yield payload
        payload["duration_s"] = round(time.perf_counter() - start, 6)
        self.log_event(event, payload)
