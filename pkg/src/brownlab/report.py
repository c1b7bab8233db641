"""Experiment reports and their JSON/CSV serialization.

Reports are deterministic given (inputs, seed, artifact version): no
timestamps, insertion-ordered keys, full round-trip float precision.
-inf is a first-class value rendered as the string "-inf" in JSON and CSV.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__

_SPECIAL_FLOATS = {"-inf": float("-inf"), "inf": float("inf")}


@dataclass
class ExperimentReport:
    meta: dict
    inputs: dict
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)


def make_meta(command: str, seed_dict: dict | None = None) -> dict:
    meta = {"artifact": "brownlab", "version": __version__, "command": command}
    if seed_dict is not None:
        meta["seed"] = seed_dict
    return meta


def _encode(value):
    if isinstance(value, dict):
        return {str(k): _encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_encode(v) for v in value]
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        if math.isinf(value):
            return "-inf" if value < 0 else "inf"
        if math.isnan(value):
            raise ValueError("NaN is not a legal report value")
        return value
    if isinstance(value, complex):
        raise TypeError("convert complex values to [re, im] pairs before reporting")
    if value is None or isinstance(value, (int, str)):
        return value
    # numpy scalars and anything else with an item() escape hatch
    item = getattr(value, "item", None)
    if item is not None:
        return _encode(item())
    raise TypeError(f"unsupported report value type {type(value)!r}")


def _decode(value):
    if isinstance(value, dict):
        return {k: _decode(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_decode(v) for v in value]
    if isinstance(value, str) and value in _SPECIAL_FLOATS:
        return _SPECIAL_FLOATS[value]
    return value


def report_to_json(report: ExperimentReport, indent: int = 2) -> str:
    payload = {
        "meta": _encode(report.meta),
        "inputs": _encode(report.inputs),
        "rows": _encode(report.rows),
        "summary": _encode(report.summary),
    }
    return json.dumps(payload, indent=indent, allow_nan=False) + "\n"


def report_from_json(text: str) -> ExperimentReport:
    payload = json.loads(text)
    return ExperimentReport(
        meta=_decode(payload["meta"]),
        inputs=_decode(payload["inputs"]),
        rows=_decode(payload["rows"]),
        summary=_decode(payload["summary"]),
    )


def _csv_cell(value) -> str:
    enc = _encode(value)
    if isinstance(enc, bool):
        return "1" if enc else "0"
    if isinstance(enc, (list, dict)):
        return json.dumps(enc, separators=(",", ":"))
    return str(enc)


def report_to_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    for key, val in report.meta.items():
        buf.write(f"# {key}: {json.dumps(_encode(val), separators=(',', ':'))}\n")
    buf.write(f"# inputs: {json.dumps(_encode(report.inputs), separators=(',', ':'))}\n")
    buf.write(f"# summary: {json.dumps(_encode(report.summary), separators=(',', ':'))}\n")
    writer = csv.writer(buf, lineterminator="\n")
    if report.rows:
        cols = list(report.rows[0].keys())
        writer.writerow(cols)
        for row in report.rows:
            writer.writerow([_csv_cell(row.get(c)) for c in cols])
    return buf.getvalue()


def write_report(report: ExperimentReport, path, fmt: str = "csv") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        path.write_text(report_to_json(report))
    elif fmt == "csv":
        path.write_text(report_to_csv(report))
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    return path


def write_eigenvalue_csv(path, eigs, meta: dict) -> Path:
    """Eigenvalue listing: provenance comments, 're,im' header, one row per value."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# {k}: {json.dumps(_encode(v), separators=(',', ':'))}" for k, v in meta.items()]
    lines.append("re,im")
    for z in eigs:
        z = complex(z)
        lines.append(f"{z.real!r},{z.imag!r}")
    path.write_text("\n".join(lines) + "\n")
    return path
