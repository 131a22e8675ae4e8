"""Reader for measured-trace CSV files.

Rows are ``t_s,value`` or ``t_s,value,weight``. Blank lines and lines whose
first non-blank character is ``#`` are ignored, and a single header row
(non-numeric first field) may precede the data.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import DomainError, TraceFormatError
from .fit import TraceData


def parse_trace(text: str, source: str = "<trace>") -> TraceData:
    rows: list[tuple[int, list[float]]] = []
    width = None
    header_seen = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = [f.strip() for f in stripped.split(",")]
        if not rows and not header_seen and fields[0][:1].isalpha():
            header_seen = True
            continue
        if len(fields) not in (2, 3):
            raise TraceFormatError(f"{source}:{lineno}: expected 2 or 3 columns, got {len(fields)}")
        if width is not None and len(fields) != width:
            raise TraceFormatError(f"{source}:{lineno}: column count changed from {width} to {len(fields)}")
        width = len(fields)
        try:
            values = [float(f) for f in fields]
        except ValueError:
            raise TraceFormatError(f"{source}:{lineno}: non-numeric field in {stripped!r}") from None
        rows.append((lineno, values))
    if not rows:
        raise TraceFormatError(f"{source}: no data rows")
    lines = [r[0] for r in rows]
    table = np.array([r[1] for r in rows])
    t, value = table[:, 0], table[:, 1]
    weight = table[:, 2] if width == 3 else None
    bad = np.nonzero(np.diff(t) <= 0)[0]
    if bad.size:
        raise TraceFormatError(f"{source}:{lines[bad[0] + 1]}: time does not increase")
    out_of_range = np.nonzero((value < -0.1) | (value > 1.1))[0]
    if out_of_range.size:
        raise TraceFormatError(f"{source}:{lines[out_of_range[0]]}: value outside [-0.1, 1.1]")
    try:
        return TraceData(t, value, weight)
    except DomainError as exc:
        raise TraceFormatError(f"{source}: {exc}") from exc


def read_trace(path: str | Path) -> TraceData:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise TraceFormatError(f"cannot read trace {path}: {exc}") from exc
    return parse_trace(text, source=str(path))
