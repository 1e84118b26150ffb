"""
运行日志
Console status lines and the JSON run log of a verification run.
"""

from __future__ import annotations

import json
import threading
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

from rich.console import Console

from .errors import FileIOError

_ICONS = {
    "start": "🚀",
    "pass": "✅",
    "fail": "❌",
    "error": "❌",
    "inconclusive": "⚠️",
    "files": "📄",
    "info": "🔄",
}


class RunLog:
    """Collects ``{timestamp, step, message, data}`` entries and echoes them to the console."""

    def __init__(self, console: Optional[Console] = None, quiet: bool = False):
        self.console = console or Console(stderr=True)
        self.quiet = quiet
        self.entries: List[Dict[str, Any]] = []
        self._lock = threading.Lock()

    def log(self, step: str, message: str, data: Any = None, kind: str = "info") -> None:
        """记录运行日志"""
        entry = {
            "timestamp": datetime.now().isoformat(),
            "step": step,
            "message": message,
            "data": data,
        }
        with self._lock:
            self.entries.append(entry)
        if not self.quiet:
            self.console.print(f"{_ICONS.get(kind, '🔄')} [{step}] {message}", highlight=False)

    def save(self, out_dir: str | Path, name: str = "run_log.json") -> Path:
        """保存运行日志"""
        path = Path(out_dir) / name
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with path.open("w", encoding="utf-8") as handle:
                json.dump(self.entries, handle, indent=2, default=str)
        except OSError as exc:
            raise FileIOError("could not write the run log", file_path=str(path), cause=exc) from exc
        return path
