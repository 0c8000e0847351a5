"""Text, SVG and JSON renderings of the KMS spectrum (one row per sink and
per component, drawn against a common beta axis)."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

from kmsgraph.classify import RowShape, SpectrumRow

FULL = "="
RAY = "-"
OPEN_END = "o"
POINT = "●"
CIRCLE_TAG = "[circle]"


def closed_form(value: float, tol: float = 1e-9) -> str:
    """``±ln(k)/m`` (k <= 16, m <= 4) when ``value`` is that close to one,
    else a short decimal.  Smaller ``m`` wins, then smaller ``k``."""
    if abs(value) <= tol:
        return "0"
    sign = "-" if value < 0 else ""
    for m in range(1, 5):
        for k in range(2, 17):
            if abs(abs(value) - math.log(k) / m) <= tol:
                return f"{sign}ln({k})" + (f"/{m}" if m > 1 else "")
    return f"{value:.6g}"


def _axis_limit(rows: list[SpectrumRow]) -> float:
    vals = [abs(r.value) for r in rows if r.value is not None]
    return max([1.0] + [1.5 * v for v in vals])


def _describe(r: SpectrumRow) -> str:
    if r.shape is RowShape.FULL_LINE:
        text = "all beta"
    elif r.shape is RowShape.OPEN_RAY:
        text = f"beta {'>' if r.direction == '+' else '<'} {closed_form(r.value)}"
        if r.source and r.source != r.label:
            text += f" (from {r.source})"
    elif r.shape is RowShape.POINT:
        text = f"beta = {closed_form(r.value)}"
    else:
        text = "none"
    if r.circle and r.shape is not RowShape.ABSENT:
        text += f" {CIRCLE_TAG}"
    return text


def render_ascii(rows: list[SpectrumRow], width: int = 41) -> str:
    """One line per row: label, a bar on the common axis, and a description."""
    lim = _axis_limit(rows)
    cols = width - 1

    def pos(x: float) -> int:
        return min(cols, max(0, round((x + lim) / (2 * lim) * cols)))

    pad = max([len(r.label) for r in rows] + [4])
    lines = []
    for r in rows:
        bar = [" "] * width
        if r.shape is RowShape.FULL_LINE:
            bar = [FULL] * width
        elif r.shape is RowShape.OPEN_RAY:
            p = pos(r.value)
            span = range(p, width) if r.direction == "+" else range(0, p + 1)
            for i in span:
                bar[i] = RAY
            bar[p] = OPEN_END
        elif r.shape is RowShape.POINT:
            bar[pos(r.value)] = POINT
        lines.append(f"{r.label:<{pad}}  {''.join(bar)}  {_describe(r)}")
    axis = ["-"] * width
    axis[pos(0.0)] = "+"
    lines.append(f"{'beta':<{pad}}  {''.join(axis)}")
    ticks = [" "] * (width + 8)
    for x, text in ((-lim, f"{-lim:.3g}"), (0.0, "0"), (lim, f"{lim:.3g}")):
        start = min(max(pos(x) - len(text) // 2, 0), width + 8 - len(text))
        ticks[start : start + len(text)] = text
    lines.append(" " * (pad + 2) + "".join(ticks).rstrip())
    return "\n".join(lines) + "\n"


def render_svg(rows: list[SpectrumRow], width: int = 640) -> str:
    lim = _axis_limit(rows)
    left, right, step, top = 70, 170, 34, 30
    span = width - left - right

    def x(v: float) -> float:
        return left + (v + lim) / (2 * lim) * span

    h = top + step * (len(rows) + 1) + 20
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{h}" font-family="sans-serif" font-size="12">'
    ]
    for i, r in enumerate(rows):
        y = top + step * i
        out.append(f'<text x="8" y="{y + 4}">{escape(r.label)}</text>')
        out.append(f'<line x1="{left}" y1="{y}" x2="{left + span}" y2="{y}" stroke="#ddd"/>')
        if r.shape is RowShape.FULL_LINE:
            out.append(f'<line x1="{left}" y1="{y}" x2="{left + span}" y2="{y}" stroke="black" stroke-width="3"/>')
        elif r.shape is RowShape.OPEN_RAY:
            x0 = x(r.value)
            x1 = left + span if r.direction == "+" else left
            out.append(f'<line x1="{x0:.2f}" y1="{y}" x2="{x1}" y2="{y}" stroke="black" stroke-width="3"/>')
            out.append(f'<circle cx="{x0:.2f}" cy="{y}" r="4" fill="white" stroke="black"/>')
        elif r.shape is RowShape.POINT:
            out.append(f'<circle cx="{x(r.value):.2f}" cy="{y}" r="4" fill="black"/>')
        out.append(f'<text x="{left + span + 10}" y="{y + 4}">{escape(_describe(r))}</text>')
    ya = top + step * len(rows)
    out.append(f'<line x1="{left}" y1="{ya}" x2="{left + span}" y2="{ya}" stroke="black"/>')
    for v in (-lim, 0.0, lim):
        out.append(f'<line x1="{x(v):.2f}" y1="{ya - 4}" x2="{x(v):.2f}" y2="{ya + 4}" stroke="black"/>')
        out.append(f'<text x="{x(v):.2f}" y="{ya + 18}" text-anchor="middle">{v:.3g}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def row_json(r: SpectrumRow) -> dict:
    return {
        "label": r.label,
        "kind": r.kind,
        "shape": r.shape.value,
        "value": r.value,
        "value_label": None if r.value is None else closed_form(r.value),
        "direction": r.direction,
        "circle": r.circle,
        "source": r.source,
    }
