"""Schema-versioned JSON reports and their flat CSV mirror."""

from __future__ import annotations

import csv
import io
import json
from typing import Any, Iterable, Sequence

SCHEMA = "ekr-report/1"


def make_report(command: str, instance: dict, results: Sequence[dict], **extra: Any) -> dict:
    report = {"schema": SCHEMA, "command": command, "instance": dict(instance), "results": list(results)}
    for key, value in extra.items():
        if value is not None:
            report[key] = value
    return report


def validate_report(report: dict) -> None:
    """Raise ValueError when a report lacks the fixed top-level layout."""
    if report.get("schema") != SCHEMA:
        raise ValueError(f"unsupported schema {report.get('schema')!r}")
    if not isinstance(report.get("instance"), dict):
        raise ValueError("report.instance must be an object")
    if not isinstance(report.get("results"), list):
        raise ValueError("report.results must be a list")


def dumps(report: dict) -> str:
    # sorted keys and fixed separators keep reruns byte-identical
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=True) + "\n"


def _scalar(v: Any) -> Any:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, (list, tuple)):
        return " ".join(str(_scalar(x)) for x in v)
    return v


def flatten(row: dict, prefix: str = "") -> dict:
    """Nested dicts become dotted keys; lists become space-joined strings."""
    out: dict = {}
    for key, value in row.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            out.update(flatten(value, name + "."))
        elif isinstance(value, list) and value and isinstance(value[0], (dict, list)):
            continue  # witnesses and examples stay JSON-only
        else:
            out[name] = _scalar(value)
    return out


def csv_rows(report: dict) -> list[dict]:
    inst = flatten(report["instance"], "instance.")
    return [{**inst, **flatten(r)} for r in report["results"]]


def to_csv(rows: Iterable[dict], columns: Sequence[str] | None = None) -> str:
    rows = list(rows)
    if columns is None:
        columns = []
        for r in rows:
            for k in r:
                if k not in columns:
                    columns.append(k)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _scalar(r.get(k)) for k in columns})
    return buf.getvalue()


def report_csv(report: dict, columns: Sequence[str] | None = None) -> str:
    return to_csv(csv_rows(report), columns)
