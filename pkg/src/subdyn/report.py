"""Run reports: one deterministic JSON payload plus flat CSV tables.

The payload is fully determined by (config, seed): keys are sorted, floats
are written with repr precision, and anything time-dependent (timestamp,
wall time) goes into a separate metadata.json so byte-comparison of
report.json is meaningful.
"""

from __future__ import annotations

import csv
import dataclasses
import datetime
import json
import math
import pathlib

import numpy as np

SCHEMA = "subdyn-report/1"
REPORT_NAME = "report.json"
METADATA_NAME = "metadata.json"


def json_safe(value):
    """Recursively convert report values into strict-JSON types.

    Complex numbers become {"re": ..., "im": ...}; NaN becomes None and
    infinities become "inf"/"-inf" strings, since strict JSON has no
    spelling for them.
    """
    if isinstance(value, dict):
        return {str(k): json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    if isinstance(value, np.ndarray):
        return [json_safe(v) for v in value.tolist()]
    if isinstance(value, (complex, np.complexfloating)):
        c = complex(value)
        return {"re": json_safe(c.real), "im": json_safe(c.imag)}
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        f = float(value)
        if math.isnan(f):
            return None
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f
    return value


@dataclasses.dataclass(frozen=True)
class RunReport:
    """Everything one scenario run produced, minus the time-dependent parts."""

    scenario: str
    config: dict
    payload: dict
    diagnostics: dict
    tables: dict[str, tuple[tuple[str, ...], list[tuple]]]

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "scenario": self.scenario,
            "config": json_safe(self.config),
            "payload": json_safe(self.payload),
            "diagnostics": json_safe(self.diagnostics),
            "tables": sorted(self.tables),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def _csv_cell(value) -> str:
    if isinstance(value, (complex, np.complexfloating)):
        raise ValueError("split complex values into _re/_im columns before writing")
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: pathlib.Path, header, rows) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_csv_cell(v) for v in row])


def write_report(report: RunReport, out_dir, wall_time_s: float) -> pathlib.Path:
    """Persist report.json, metadata.json and every CSV table into out_dir."""
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report_path = out / REPORT_NAME
    report_path.write_text(report.to_json())
    metadata = {
        "written_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "wall_time_s": wall_time_s,
    }
    (out / METADATA_NAME).write_text(json.dumps(metadata, sort_keys=True, indent=2) + "\n")
    for name, (header, rows) in sorted(report.tables.items()):
        write_csv(out / f"{name}.csv", header, rows)
    return report_path
