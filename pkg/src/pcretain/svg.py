"""Pareto chart as a standalone SVG document, no plotting dependency.

Element ids: ``title``, ``axes``, ``bar-1``..``bar-p``, ``cumulative-line``,
``cumulative-point-1``..``cumulative-point-p``, ``cutoff-line`` (horizontal, at the
cutoff percentage) and ``cutoff-marker`` (vertical, at the retained count).
"""

from __future__ import annotations

from pathlib import Path

from .retain import ParetoData

WIDTH = 800
HEIGHT = 500
MARGIN_LEFT = 70
MARGIN_RIGHT = 70
MARGIN_TOP = 50
MARGIN_BOTTOM = 70


def _escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def _n(v: float) -> str:
    return f"{v:.2f}"


def pareto_svg(data: ParetoData, title: str = "Pareto chart of explained variance") -> str:
    p = len(data.component_ids)
    left, right = MARGIN_LEFT, WIDTH - MARGIN_RIGHT
    top, bottom = MARGIN_TOP, HEIGHT - MARGIN_BOTTOM
    slot = (right - left) / p
    bar_w = slot * 0.7

    def y(pct: float) -> float:
        return bottom - (bottom - top) * max(0.0, min(pct, 100.0)) / 100.0

    def xc(i: int) -> float:
        return left + slot * (i + 0.5)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<text id="title" x="{WIDTH / 2:.0f}" y="28" text-anchor="middle" font-family="sans-serif" '
        f'font-size="16">{_escape(title)}</text>',
        f'<g id="axes" stroke="#333333" stroke-width="1">'
        f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}"/>'
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}"/>'
        f'<line x1="{right}" y1="{top}" x2="{right}" y2="{bottom}"/></g>',
    ]
    ticks = ['<g id="ticks" font-family="sans-serif" font-size="11" fill="#333333">']
    for pct in range(0, 101, 20):
        ticks.append(f'<text x="{left - 8}" y="{_n(y(pct) + 4)}" text-anchor="end">{pct}%</text>')
        ticks.append(f'<text x="{right + 8}" y="{_n(y(pct) + 4)}" text-anchor="start">{pct}%</text>')
    step = max(1, p // 20)
    for i, label in enumerate(data.component_ids):
        if i % step == 0 or i == p - 1:
            ticks.append(f'<text x="{_n(xc(i))}" y="{bottom + 18}" text-anchor="middle">{_escape(label)}</text>')
    ticks.append(f'<text x="{WIDTH / 2:.0f}" y="{HEIGHT - 20}" text-anchor="middle">Principal component</text>')
    ticks.append("</g>")
    out.extend(ticks)

    out.append('<g id="bars" fill="#4c78a8">')
    for i, pct in enumerate(data.individual_percent):
        h = bottom - y(pct)
        out.append(f'<rect id="bar-{i + 1}" x="{_n(xc(i) - bar_w / 2)}" y="{_n(y(pct))}" '
                   f'width="{_n(bar_w)}" height="{_n(h)}"/>')
    out.append("</g>")

    pts = " ".join(f"{_n(xc(i))},{_n(y(c))}" for i, c in enumerate(data.cumulative_percent))
    out.append(f'<polyline id="cumulative-line" points="{pts}" fill="none" stroke="#e45756" stroke-width="2"/>')
    out.append('<g id="cumulative-points" fill="#e45756">')
    for i, c in enumerate(data.cumulative_percent):
        out.append(f'<circle id="cumulative-point-{i + 1}" cx="{_n(xc(i))}" cy="{_n(y(c))}" r="4"/>')
    out.append("</g>")

    yc = y(data.cutoff_percent)
    out.append(f'<line id="cutoff-line" x1="{left}" y1="{_n(yc)}" x2="{right}" y2="{_n(yc)}" '
               f'stroke="#54a24b" stroke-width="1.5" stroke-dasharray="6,4" '
               f'data-percent="{data.cutoff_percent:.6g}"/>')
    xk = xc(data.cutoff_index - 1)
    out.append(f'<line id="cutoff-marker" x1="{_n(xk)}" y1="{top}" x2="{_n(xk)}" y2="{bottom}" '
               f'stroke="#54a24b" stroke-width="1.5" data-component="{data.cutoff_index}"/>')
    out.append(f'<text id="cutoff-label" x="{_n(xk + 6)}" y="{top + 14}" font-family="sans-serif" '
               f'font-size="12" fill="#54a24b">retain {data.cutoff_index} '
               f'({data.cutoff_percent:.6g}% cut-off)</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_pareto_svg(data: ParetoData, path, title: str | None = None) -> Path:
    path = Path(path)
    text = pareto_svg(data) if title is None else pareto_svg(data, title)
    path.write_text(text, encoding="utf-8")
    return path
