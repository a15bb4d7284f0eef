"""CSV and JSON rendering of engine results for the CLI."""

import csv
import io
import json
import math
import os
from pathlib import Path
from typing import Any, Iterable, Sequence

import click

from dqdcorr.engine.errors import OutputError
from dqdcorr.engine.model import BASIS_LABELS
from dqdcorr.engine.scan import PointReport, SweepResult

STDOUT = "-"

SWEEP_COLUMNS = (
    "axis",
    "axis_value",
    "concurrence",
    "c_l1_total",
    "c_l1_local",
    "c_cc",
    "path_flag",
)


def format_number(x: float) -> str:
    """12 significant digits, '.' decimal separator, no negative zero."""
    return f"{float(x) + 0.0:.12g}"


def _json_number(x: float) -> float | str:
    # JSON has no inf/nan
    if not math.isfinite(x):
        return format_number(x)
    return float(format_number(x))


def point_record(report: PointReport) -> dict[str, Any]:
    p, el, m = report.params, report.state.elements, report.measures
    record: dict[str, Any] = {
        "d1": p.delta1,
        "d2": p.delta2,
        "v": p.v,
        "t": report.temp.t,
        "theta": m.theta,
    }
    for i, e in enumerate(report.spectrum.energies, start=1):
        record[f"e{i}"] = float(e)
    record.update(el._asdict())
    record["z_shifted"] = report.state.z
    record["shift"] = report.state.shift
    record.update(
        concurrence=m.concurrence,
        c_l1_total=m.c_l1_total,
        c_l1_local=m.c_l1_local,
        c_l1_a=m.c_l1_a,
        c_l1_b=m.c_l1_b,
        c_cc=m.c_cc,
    )
    for label, amp in zip(BASIS_LABELS, report.ground_amplitudes):
        record[f"ground_{label.lower()}"] = float(amp)
    record["path_flag"] = report.path_flag
    return record


def sweep_records(result: SweepResult) -> list[dict[str, Any]]:
    return [{"axis": result.spec.axis, **row._asdict()} for row in result.rows]


def _cell(value: Any) -> str:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return str(value)
    return format_number(value)


def render_csv(records: Sequence[dict[str, Any]], columns: Iterable[str] | None = None) -> str:
    """Header row plus one row per record, LF line endings."""
    columns = list(columns) if columns is not None else list(records[0]) if records else []
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for record in records:
        writer.writerow([_cell(record[c]) for c in columns])
    return buf.getvalue()


def render_json(payload: Any) -> str:
    def convert(value: Any) -> Any:
        if isinstance(value, dict):
            return {k: convert(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return [convert(v) for v in value]
        if isinstance(value, float):
            return _json_number(value)
        return value

    return json.dumps(convert(payload), indent=2) + "\n"


def render_sweep(result: SweepResult, fmt: str) -> str:
    if fmt == "json":
        return render_json({**result.to_dict(), "rows": sweep_records(result)})
    return render_csv(sweep_records(result), SWEEP_COLUMNS)


def render_record(record: dict[str, Any], fmt: str) -> str:
    if fmt == "json":
        return render_json(record)
    return render_csv([record])


def check_writable(path: str | Path) -> None:
    """Fail before any computation if ``path`` cannot be written.

    Raises:
        OutputError: the target is a directory, its parent is missing, or the
            parent is not writable.
    """
    if str(path) == STDOUT:
        return
    target = Path(path)
    if target.is_dir():
        raise OutputError(str(path), "is a directory")
    parent = target.parent if str(target.parent) else Path(".")
    if not parent.is_dir():
        raise OutputError(str(path), f"directory {parent} does not exist")
    if target.exists() and not os.access(target, os.W_OK):
        raise OutputError(str(path), "permission denied")
    if not target.exists() and not os.access(parent, os.W_OK):
        raise OutputError(str(path), f"directory {parent} is not writable")


def write_output(text: str, path: str | Path = STDOUT) -> None:
    """Write ``text`` to ``path``, or to stdout for ``-``."""
    if str(path) == STDOUT:
        click.echo(text, nl=False)
        return
    try:
        with open(path, "w", newline="") as f:
            f.write(text)
    except OSError as e:
        raise OutputError(str(path), e.strerror or str(e)) from e
