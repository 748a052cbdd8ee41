"""Record serialisation (CSV/JSON), the key = value config format, and tiny SVG charts."""
from __future__ import annotations

import csv
import io as _io
import json
import math
import os
from xml.sax.saxutils import escape

import numpy as np

from .errors import ParameterError

__all__ = ["SCHEMAS", "format_value", "to_csv", "to_json", "emit", "parse_csv", "read_config", "svg_line_chart"]

SCHEMAS = {
    "lyapunov": ["theta", "n", "epsilon", "decoration", "gamma_hat", "std_err", "tail_prob", "ci_lo", "ci_hi",
                 "samples", "master_seed"],
    "resonance": ["n", "delta", "threshold", "tail_prob", "ci_lo", "ci_hi", "samples", "master_seed"],
    "regularity": ["theta", "n", "eps", "frac_both_singular", "ci_lo", "ci_hi", "samples"],
    "localization": ["k", "center", "decay_rate", "fit_r2", "theta_k"],
    "edl": ["offset", "mean_kernel", "ci_lo", "ci_hi", "fitted_rate"],
    "verify": ["check_name", "trials", "failures", "worst_error", "worst_seed"],
    "matrix": ["row", "col", "re", "im"],
}
SCHEMAS["ldt"] = SCHEMAS["lyapunov"]


def format_value(v) -> str:
    """Text form used in CSV cells: floats with 17 significant digits, None as empty."""
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, np.integer):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _json_value(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, str):
        return json.dumps(v, ensure_ascii=False)
    s = format_value(v)
    if isinstance(v, bool):
        return s
    try:
        f = float(s)
    except ValueError:
        return json.dumps(s, ensure_ascii=False)
    if not math.isfinite(f):
        return "null"
    return s


def _fields(schema):
    if isinstance(schema, str):
        if schema not in SCHEMAS:
            raise ParameterError(f"unknown record schema {schema!r}")
        return SCHEMAS[schema]
    return list(schema)


def to_csv(records, schema) -> str:
    fields = _fields(schema)
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for rec in records:
        w.writerow([format_value(rec.get(k)) for k in fields])
    return buf.getvalue()


def to_json(records, schema) -> str:
    fields = _fields(schema)
    rows = ["{" + ", ".join(f"{json.dumps(k)}: {_json_value(rec.get(k))}" for k in fields) + "}" for rec in records]
    if not rows:
        return "[]\n"
    return "[\n  " + ",\n  ".join(rows) + "\n]\n"


def emit(records, schema, fmt: str = "csv", path=None) -> str:
    """Serialise records; write to ``path`` (None or ``-`` means return only)."""
    if fmt == "csv":
        text = to_csv(records, schema)
    elif fmt == "json":
        text = to_json(records, schema)
    else:
        raise ParameterError(f"format must be csv or json, got {fmt!r}")
    if path not in (None, "-"):
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise ParameterError(f"cannot write output file {path!r}: {exc}") from exc
    return text


def parse_csv(text: str) -> list[dict]:
    """Read back a CSV written by :func:`to_csv`; numeric cells become int/float."""
    out = []
    for rec in csv.DictReader(_io.StringIO(text)):
        row = {}
        for k, v in rec.items():
            if v == "":
                row[k] = None
                continue
            try:
                row[k] = int(v)
            except ValueError:
                try:
                    row[k] = float(v)
                except ValueError:
                    row[k] = v
        out.append(row)
    return out


def read_config(path) -> dict:
    """``key = value`` lines, ``#`` comments, UTF-8.  Keys are normalised to underscores."""
    if not os.path.exists(path):
        raise ParameterError(f"config file {path!r} not found")
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep or not key.strip():
                raise ParameterError(f"{path}:{lineno}: expected 'key = value'")
            out[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return out


def svg_line_chart(xs, ys, title: str = "", xlabel: str = "", ylabel: str = "", log_y: bool = True,
                   fit=None, width: int = 480, height: int = 320) -> str:
    """Minimal SVG polyline of ``(x, y)`` points; ``fit = (slope, intercept)`` adds the fitted line
    (in ``log y`` when ``log_y``)."""
    pts = [(float(x), float(y)) for x, y in zip(xs, ys) if y is not None and math.isfinite(float(y))
           and (not log_y or float(y) > 0)]
    tr = (lambda y: math.log(y)) if log_y else (lambda y: y)
    pad = 48
    if pts:
        x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
        y0, y1 = min(tr(p[1]) for p in pts), max(tr(p[1]) for p in pts)
    else:
        x0, x1, y0, y1 = 0.0, 1.0, 0.0, 1.0
    x1 = x1 if x1 > x0 else x0 + 1.0
    y1 = y1 if y1 > y0 else y0 + 1.0
    sx = lambda x: pad + (x - x0) / (x1 - x0) * (width - 2 * pad)
    sy = lambda y: height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<text x="{width / 2:.1f}" y="{pad / 2:.1f}" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<text x="{width / 2:.1f}" y="{height - 10}" text-anchor="middle" font-size="12">{escape(xlabel)}</text>',
        f'<text x="14" y="{height / 2:.1f}" font-size="12" transform="rotate(-90 14 {height / 2:.1f})" '
        f'text-anchor="middle">{escape(ylabel + (" (log)" if log_y else ""))}</text>',
    ]
    if pts:
        poly = " ".join(f"{sx(x):.2f},{sy(tr(y)):.2f}" for x, y in pts)
        parts.append(f'<polyline points="{poly}" fill="none" stroke="steelblue" stroke-width="2"/>')
        parts += [f'<circle cx="{sx(x):.2f}" cy="{sy(tr(y)):.2f}" r="3" fill="steelblue"/>' for x, y in pts]
    if fit is not None and all(math.isfinite(v) for v in fit):
        slope, icpt = fit
        parts.append(f'<line x1="{sx(x0):.2f}" y1="{sy(icpt + slope * x0):.2f}" x2="{sx(x1):.2f}" '
                     f'y2="{sy(icpt + slope * x1):.2f}" stroke="firebrick" stroke-dasharray="4 3"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
