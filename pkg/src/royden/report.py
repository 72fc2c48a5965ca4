"""Deterministic machine-readable reports (CSV and JSON).

Identical inputs must produce identical bytes, so: keys are sorted, floats
are printed with 12 significant digits, CSV headers are fixed per command,
and nothing time- or environment-dependent enters the stream. NaN anywhere
is a hard error; an infinite value is allowed only in the ``lambda`` field
(extremal length of an empty family) and serializes as the token ``inf``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

from .errors import SerializationError

_INF_OK_KEYS = {"lambda"}

COMMAND_COLUMNS = {
    "capinf": ["family", "p", "n", "cap", "residual"],
    "classify": ["family", "p", "classification", "fitted_exponent", "last_cap", "note"],
    "dirichlet": ["source", "p", "n", "iterations", "residual", "energy", "converged"],
    "capacity": ["source", "p", "n", "value", "residual", "iterations", "converged", "admissible"],
    "extremal": ["source", "p", "lambda", "energy", "cuts"],
    "decompose": ["family", "p", "level", "radius", "sup_h", "drift"],
    "probe": [
        "family", "p", "radius", "oscillation", "sup", "inf",
        "energy", "drift", "residual", "verdict",
    ],
}


@dataclass
class Report:
    """Everything one CLI run emits, minus anything nondeterministic."""

    command: str
    config: dict
    results: list[dict]
    extra: dict = field(default_factory=dict)
    converged: bool = True
    error: str | None = None
    version: str = ""


def _format_float(x: float, key: str | None) -> str:
    if math.isnan(x):
        raise SerializationError(f"NaN in report field {key!r}")
    if math.isinf(x):
        if key in _INF_OK_KEYS and x > 0:
            return "inf"
        raise SerializationError(f"non-finite value in report field {key!r}")
    return f"{x:.12g}"


def _cell(x, key: str) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return _format_float(x, key)
    return str(x)


def _json_value(x, key: str | None = None) -> str:
    if x is None:
        return "null"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int,)):
        return str(x)
    if isinstance(x, float):
        s = _format_float(x, key)
        return f'"{s}"' if s == "inf" else s
    if isinstance(x, str):
        out = x.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        return f'"{out}"'
    if isinstance(x, dict):
        inner = ", ".join(
            f'{_json_value(str(k))}: {_json_value(v, str(k))}' for k, v in sorted(x.items())
        )
        return "{" + inner + "}"
    if isinstance(x, (list, tuple)):
        return "[" + ", ".join(_json_value(v, key) for v in x) + "]"
    raise SerializationError(f"cannot serialize {type(x).__name__} in report")


def emit_report(report: Report, fmt: str) -> bytes:
    """Serialize a report; bytes are identical across identical runs."""
    if fmt == "json":
        payload = {
            "command": report.command,
            "config": report.config,
            "converged": report.converged,
            "error": report.error,
            "results": report.results,
            "version": report.version,
        }
        payload.update(report.extra)
        return (_json_value(payload) + "\n").encode()
    if fmt == "csv":
        columns = COMMAND_COLUMNS[report.command]
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in report.results:
            writer.writerow([_cell(row.get(c), c) for c in columns])
        return buf.getvalue().encode()
    raise SerializationError(f"unknown report format {fmt!r}")
