"""Bit-stable report serialization.

Reports are written as canonical JSON: object keys sorted, floats printed
with 17 significant digits, no whitespace variation, LF newlines.  The same
in-memory report therefore always serializes to the same bytes.  Non-finite
numbers are a hard error so a broken experiment cannot masquerade as a
clean report.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np


class SerializationError(ValueError):
    """A report contains something that cannot be serialized bit-stably."""


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise SerializationError(f"non-finite value {x!r} in report")
    return format(x, ".17g")


def _encode(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_encode(v) for v in obj) + "]"
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist())
    if isinstance(obj, dict):
        items = []
        for key in sorted(obj):
            if not isinstance(key, str):
                raise SerializationError(f"non-string key {key!r} in report")
            items.append(json.dumps(key, ensure_ascii=False) + ":" + _encode(obj[key]))
        return "{" + ",".join(items) + "}"
    if isinstance(obj, Path):
        return json.dumps(str(obj), ensure_ascii=False)
    raise SerializationError(f"cannot serialize {type(obj).__name__} in report")


def canonical_json(obj) -> str:
    """Canonical JSON text for ``obj`` (sorted keys, 17-digit floats)."""
    return _encode(obj) + "\n"


def write_json(obj, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(canonical_json(obj), newline="\n")
    return path


CSV_COLUMNS = ["experiment", "seed", "r", "d", "n", "verdict", "pass", "wall_time_s"]


def write_csv_summary(rows: list[dict], path) -> Path:
    """One row per experiment report.

    Wall time lives here (and on the console), not in the JSON reports,
    which must stay byte-identical across reruns.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        cells = []
        for col in CSV_COLUMNS:
            val = row.get(col, "")
            if isinstance(val, bool):
                val = "true" if val else "false"
            elif isinstance(val, float):
                val = f"{val:.3f}"
            cells.append(str(val))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", newline="\n")
    return path
