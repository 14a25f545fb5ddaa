"""Trace CSV and summary JSON serialization.

Trace files are plain comma-separated text with LF line endings and the
fixed header ``iter,f,dx,dy,residual`` followed by one column per extra
metric.  Floats are written with ``repr``, the shortest representation
that round-trips exactly, so a written trace parses back bitwise equal.
"""

import json
from pathlib import Path

from .engine import IterateTrace, TraceRecord
from .exceptions import ConfigError

__all__ = ["TRACE_FIELDS", "write_trace_csv", "read_trace_csv", "write_json"]

TRACE_FIELDS = ("iter", "f", "dx", "dy", "residual")


def _fmt(x):
    return repr(float(x))


def write_trace_csv(path, trace):
    """Write a trace to ``path``; returns the path."""
    path = Path(path)
    header = ",".join(TRACE_FIELDS + tuple(trace.extra_names))
    lines = [header]
    for rec in trace.records:
        cells = [str(int(rec.k)), _fmt(rec.f), _fmt(rec.dx), _fmt(rec.dy),
                 _fmt(rec.residual)]
        cells.extend(_fmt(v) for v in rec.extras)
        lines.append(",".join(cells))
    path.write_bytes(("\n".join(lines) + "\n").encode("utf-8"))
    return path


def read_trace_csv(path):
    """Parse a trace CSV back into an :class:`IterateTrace`.

    Only the scalar records survive a round trip; the final iterate pair
    and the stop reason are not stored in the CSV and come back as None.
    Malformed files raise :class:`ConfigError` naming the offending line
    (1-based, header included).
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"cannot read trace file {path}: {err}") from err
    lines = text.splitlines()
    if not lines:
        raise ConfigError(f"{path}: empty trace file (line 1)")
    header = lines[0].split(",")
    if tuple(header[: len(TRACE_FIELDS)]) != TRACE_FIELDS:
        raise ConfigError(
            f"{path}: bad trace header at line 1, expected it to start with "
            f"{','.join(TRACE_FIELDS)!r}"
        )
    extra_names = tuple(header[len(TRACE_FIELDS) :])
    width = len(header)
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != width:
            raise ConfigError(
                f"{path}: expected {width} fields at line {lineno}, got {len(cells)}"
            )
        try:
            k = int(cells[0])
            values = [float(c) for c in cells[1:]]
        except ValueError as err:
            raise ConfigError(f"{path}: malformed value at line {lineno}: {err}") from err
        records.append(
            TraceRecord(k, values[0], values[1], values[2], values[3],
                        tuple(values[4:]))
        )
    return IterateTrace(records=records, extra_names=extra_names)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (int,)):
        return int(obj)
    if isinstance(obj, float):
        return obj if obj == obj and abs(obj) != float("inf") else None
    if hasattr(obj, "item"):  # numpy scalars
        return _jsonable(obj.item())
    return obj


def write_json(path, payload):
    """Write a summary JSON document; non-finite floats become null."""
    path = Path(path)
    text = json.dumps(_jsonable(payload), indent=2, allow_nan=False)
    path.write_bytes((text + "\n").encode("utf-8"))
    return path
