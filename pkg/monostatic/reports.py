# monostatic/reports.py
"""Schema-versioned JSON and CSV outputs, written atomically."""
import csv
import io
import json
import os
import threading
from dataclasses import asdict, is_dataclass
from enum import Enum
from typing import Any, List, Optional, Sequence

import numpy as np

from . import TOOL_NAME, __version__

SCHEMA_VERSION = 1
_lock = threading.Lock()


def to_jsonable(obj: Any) -> Any:
    """Reports, dataclasses, numpy values and enums -> plain JSON types."""
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if hasattr(obj, "as_dict"):
        return to_jsonable(obj.as_dict())
    if is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(asdict(obj))
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {(f"{k:g}" if isinstance(k, float) else str(k)): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if np.isfinite(v) else None
    return obj


def envelope(report: Any, kind: str) -> Any:
    """Object reports gain schema_version/kind/tool; lists stay JSON arrays."""
    body = to_jsonable(report)
    if isinstance(body, dict):
        return {"schema_version": SCHEMA_VERSION, "kind": kind, "tool": f"{TOOL_NAME} {__version__}", **body}
    return body


def dumps(report: Any, kind: str = "report") -> str:
    return json.dumps(envelope(report, kind), ensure_ascii=False, indent=2)


def _write_unlocked(path: str, text: str) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as f:
        f.write(text)
        f.flush()
        os.fsync(f.fileno())
    os.replace(tmp, path)


def write_report(report: Any, path: str, kind: str = "report") -> str:
    with _lock:
        _write_unlocked(path, dumps(report, kind) + "\n")
    return path


def read_report(path: str) -> Any:
    with _lock:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)


def write_csv(rows: Sequence[dict], path: str, fieldnames: Optional[List[str]] = None) -> str:
    if fieldnames is None:
        fieldnames = []
        for row in rows:
            fieldnames.extend(k for k in row if k not in fieldnames)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fieldnames, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _cell(row.get(k)) for k in fieldnames})
    with _lock:
        _write_unlocked(path, buf.getvalue())
    return path


def _cell(v: Any) -> Any:
    v = to_jsonable(v)
    if v is None:
        return ""
    if isinstance(v, (dict, list)):
        return json.dumps(v, ensure_ascii=False)
    return v
