"""Trace CSV, JSON report and SVG plot writers.

Floats are written with ``repr`` (shortest round-trip form), so reading a
trace back gives bit-identical records and identical runs give identical
bytes.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .core import IterationRecord, RunTrace, Status

TRACE_COLUMNS = ["iter", "f", "subgrad_norm", "step_length", "oracle_evals", "status"]
SCHEMA_VERSION = 1


def write_trace_csv(trace: RunTrace, path) -> None:
    x0 = trace.records[0].x
    dim = 0 if x0 is None else x0.shape[0]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_COLUMNS + [f"x_{i}" for i in range(dim)])
        for r in trace.records:
            row = [r.n, repr(r.f_value), repr(r.subgrad_norm), repr(r.step_length), r.oracle_evals, r.status.value]
            if dim:
                row += [repr(float(v)) for v in r.x]
            w.writerow(row)


def read_trace_csv(path) -> list:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    if header[: len(TRACE_COLUMNS)] != TRACE_COLUMNS:
        raise ValueError(f"{path}: unexpected trace header {header}")
    dim = len(header) - len(TRACE_COLUMNS)
    out = []
    for row in body:
        x = None
        if dim:
            x = np.array([float(v) for v in row[len(TRACE_COLUMNS):]])
            x.flags.writeable = False
        out.append(
            IterationRecord(
                n=int(row[0]),
                x=x,
                f_value=float(row[1]),
                subgrad_norm=float(row[2]),
                step_length=float(row[3]),
                oracle_evals=int(row[4]),
                status=Status(row[5]),
            )
        )
    return out


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return _clean(obj.item())
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def write_json(payload: dict, path) -> None:
    doc = {"schema_version": SCHEMA_VERSION}
    doc.update(payload)
    Path(path).write_text(json.dumps(_clean(doc), indent=2, allow_nan=False) + "\n")


def write_svg_plot(trace: RunTrace, path, title: str = "") -> None:
    """Two stacked panels: log10 |v_n| and f(x_n) against n."""
    n = np.arange(len(trace.records), dtype=float)
    norms = trace.subgrad_norms()
    floor = 1e-300
    logv = np.log10(np.maximum(norms, floor))
    fvals = trace.f_values()

    W, H, pad = 640, 220, 50
    panels = [("log10 |v_n|", logv), ("f(x_n)", fvals)]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{2 * H + 30}" '
        f'font-family="sans-serif" font-size="11">',
        f'<text x="{W / 2}" y="16" text-anchor="middle" font-size="13">{_esc(title)}</text>',
    ]
    for k, (label, ys) in enumerate(panels):
        top = 25 + k * H
        x_lo, x_hi = 0.0, max(n[-1], 1.0)
        y_lo, y_hi = float(np.min(ys)), float(np.max(ys))
        if y_hi - y_lo < 1e-300:
            y_lo, y_hi = y_lo - 1.0, y_hi + 1.0

        def px(v):
            return pad + (v - x_lo) / (x_hi - x_lo) * (W - 2 * pad)

        def py(v):
            return top + H - pad / 2 - (v - y_lo) / (y_hi - y_lo) * (H - pad)

        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(n, ys))
        parts += [
            f'<rect x="{pad}" y="{top + pad / 2}" width="{W - 2 * pad}" height="{H - pad}" '
            f'fill="none" stroke="#888"/>',
            f'<polyline points="{pts}" fill="none" stroke="#1f5fa8" stroke-width="1.5"/>',
            f'<text x="{pad}" y="{top + pad / 2 - 4}">{label}</text>',
            f'<text x="{pad - 4}" y="{top + pad / 2 + 10}" text-anchor="end">{y_hi:.3g}</text>',
            f'<text x="{pad - 4}" y="{top + H - pad / 2}" text-anchor="end">{y_lo:.3g}</text>',
            f'<text x="{W - pad}" y="{top + H - pad / 2 + 14}" text-anchor="end">n = {int(x_hi)}</text>',
        ]
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
