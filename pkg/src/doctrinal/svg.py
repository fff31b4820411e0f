"""Deterministic SVG rendering of ROC points and their AOT triangles.

Output is plain text built from fixed-precision coordinates, so the same
points always give the same bytes.
"""

from __future__ import annotations

from dataclasses import dataclass
from xml.sax.saxutils import escape

SIZE = 400
MARGIN = 50
PALETTE = ("#1b6ca8", "#d1495b", "#2a9d8f", "#7b5ea7", "#e9a03b", "#555555")


@dataclass(frozen=True)
class RocPoint:
    label: str
    series: str
    fpr: float
    tpr: float


def _xy(fpr: float, tpr: float) -> tuple[str, str]:
    return f"{MARGIN + fpr * SIZE:.3f}", f"{MARGIN + (1 - tpr) * SIZE:.3f}"


def render_roc(points: list[RocPoint], title: str = "ROC space") -> str:
    """Unit ROC square with the chance diagonal, one dot and triangle per point.

    The triangle joins (0, 0), (FPR, TPR) and (1, 1); its area is the AOT.
    Series keep their first-seen order in the legend.
    """
    series = list(dict.fromkeys(p.series for p in points))
    colour = {s: PALETTE[i % len(PALETTE)] for i, s in enumerate(series)}
    width = SIZE + 2 * MARGIN + 120
    height = SIZE + 2 * MARGIN
    x0, y0 = _xy(0, 0)
    x1, y1 = _xy(1, 1)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f"<title>{escape(title)}</title>",
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{SIZE}" height="{SIZE}" fill="white" stroke="black"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}" stroke="#999999" stroke-dasharray="4 4"/>',
    ]
    for k in range(5):
        v = k / 4
        x, _ = _xy(v, 0)
        _, y = _xy(0, v)
        out.append(f'<text x="{x}" y="{MARGIN + SIZE + 16}" text-anchor="middle">{v:.2f}</text>')
        out.append(f'<text x="{MARGIN - 6}" y="{y}" text-anchor="end" dominant-baseline="middle">{v:.2f}</text>')
    out.append(f'<text x="{MARGIN + SIZE / 2:.0f}" y="{height - 8}" text-anchor="middle">FPR</text>')
    out.append(f'<text x="14" y="{MARGIN + SIZE / 2:.0f}" text-anchor="middle" '
               f'transform="rotate(-90 14 {MARGIN + SIZE / 2:.0f})">TPR</text>')
    for p in points:
        x, y = _xy(p.fpr, p.tpr)
        c = colour[p.series]
        out.append(f'<polygon points="{x0},{y0} {x},{y} {x1},{y1}" fill="{c}" fill-opacity="0.08" '
                   f'stroke="{c}" stroke-opacity="0.4"/>')
    for p in points:
        x, y = _xy(p.fpr, p.tpr)
        out.append(f'<circle cx="{x}" cy="{y}" r="3" fill="{colour[p.series]}">'
                   f"<title>{escape(p.label)}: FPR={p.fpr:.4f}, TPR={p.tpr:.4f}</title></circle>")
    for i, s in enumerate(series):
        ly = MARGIN + 10 + 18 * i
        lx = MARGIN + SIZE + 16
        out.append(f'<circle cx="{lx}" cy="{ly}" r="4" fill="{colour[s]}"/>')
        out.append(f'<text x="{lx + 10}" y="{ly}" dominant-baseline="middle">{escape(s)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
