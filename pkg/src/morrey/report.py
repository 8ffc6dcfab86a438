"""Report envelope, determinism hash and atomic persistence."""
from __future__ import annotations

import datetime as _dt
import hashlib
import json
import os
import tempfile
from importlib import resources
from pathlib import Path
from typing import Any

from . import __version__

SCHEMA_VERSION = "1.0"
_UNHASHED = ("run_info", "determinism_hash")


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def digest(obj: Any) -> str:
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()


def determinism_hash(report: dict) -> str:
    return digest({k: v for k, v in report.items() if k not in _UNHASHED})


def build_report(command: str, config: dict, status: str, result: dict, elapsed: float | None = None) -> dict:
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool": "morrey",
        "tool_version": __version__,
        "command": command,
        "config": config,
        "config_hash": digest(config),
        "seed": config.get("seed"),
        "arithmetic_mode": config.get("mode"),
        "status": status,
        "result": result,
    }
    report["determinism_hash"] = determinism_hash(report)
    report["run_info"] = {
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "elapsed_seconds": None if elapsed is None else round(elapsed, 3),
    }
    return report


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write via a temp file in the target directory, then rename over the target."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_report(path: str | os.PathLike, report: dict) -> None:
    write_atomic(path, json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n")


def load_schema() -> dict:
    text = resources.files("morrey").joinpath("schemas/report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)
