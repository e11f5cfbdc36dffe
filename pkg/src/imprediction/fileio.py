"""Reading samples and writing curves, regions and reports."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from .errors import ParameterDomainError


def ingest(path) -> tuple[float, ...]:
    """Read one number per line (or a single-column CSV with optional header).

    Blank lines are skipped.  Positivity is a model concern and is checked
    when the values are bound to a model, not here.
    """
    path = Path(path)
    if not path.exists():
        raise ParameterDomainError(f"no such file: {path}")
    values = []
    with path.open(newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            cells = [c.strip() for c in row if c.strip()]
            if not cells:
                continue
            if len(cells) > 1:
                raise ParameterDomainError(f"{path}:{lineno}: expected a single column, got {len(cells)}")
            try:
                value = float(cells[0])
            except ValueError:
                if not values and lineno == 1:
                    continue  # header
                raise ParameterDomainError(f"{path}:{lineno}: cannot parse {cells[0]!r} as a number") from None
            if not math.isfinite(value):
                raise ParameterDomainError(f"{path}:{lineno}: non-finite value {cells[0]!r}")
            values.append(value)
    if not values:
        raise ParameterDomainError(f"{path}: no data")
    return tuple(values)


def dumps_json(payload) -> str:
    """Deterministic JSON: sorted keys, no timestamps, shortest float repr."""
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"


def curve_to_csv(curve) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(["y", "plausibility"])
    for y, pl in zip(curve.grid.tolist(), curve.pl.tolist()):
        writer.writerow([repr(y), repr(pl)])
    return buf.getvalue()


def region_to_csv(region) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    d = region.to_dict()
    writer.writerow(["kind", "alpha", "lower", "upper"])
    writer.writerow([d["kind"], d["alpha"], "" if d["lower"] is None else repr(d["lower"]),
                     "" if d["upper"] is None else repr(d["upper"])])
    return buf.getvalue()


def render_curve_svg(curve, alpha=None, title="", width=640, height=400) -> str:
    """Plausibility curve as a standalone SVG 1.1 document, with a dashed line at ``alpha``."""
    left, right, top, bottom = 60, 20, 30, 50
    pw, ph = width - left - right, height - top - bottom
    xs, ys = curve.grid, curve.pl
    x0, x1 = float(xs.min()), float(xs.max())
    span = (x1 - x0) or 1.0

    def sx(x):
        return left + (x - x0) / span * pw

    def sy(p):
        return top + (1.0 - p) * ph

    path = " ".join(
        f"{'M' if i == 0 else 'L'}{sx(x):.2f},{sy(p):.2f}" for i, (x, p) in enumerate(zip(xs.tolist(), ys.tolist()))
    )
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#000"/>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        yv = sy(frac)
        parts.append(f'<text x="{left - 8}" y="{yv + 4:.2f}" font-size="11" text-anchor="end">{frac:g}</text>')
        xv = left + frac * pw
        parts.append(
            f'<text x="{xv:.2f}" y="{top + ph + 16}" font-size="11" text-anchor="middle">{x0 + frac * span:.4g}</text>'
        )
    if alpha is not None:
        parts.append(
            f'<line x1="{left}" y1="{sy(alpha):.2f}" x2="{left + pw}" y2="{sy(alpha):.2f}" '
            'stroke="#888" stroke-dasharray="6,4"/>'
        )
    parts.append(f'<path d="{path}" fill="none" stroke="#000" stroke-width="1.5"/>')
    parts.append(f'<text x="{left + pw / 2:.2f}" y="{height - 10}" font-size="12" text-anchor="middle">y</text>')
    parts.append(
        f'<text x="15" y="{top + ph / 2:.2f}" font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 15 {top + ph / 2:.2f})">plausibility ({curve.assertion.value})</text>'
    )
    if title:
        parts.append(f'<text x="{width / 2:.2f}" y="18" font-size="13" text-anchor="middle">{_escape(title)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _escape(text):
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
