"""Minimal standalone SVG plotting: line charts and heatmaps.

The batch reports need deterministic, dependency-free figures, so this
module writes SVG text directly.  Numbers are formatted with a fixed
``%.6g`` so regenerating a figure from the same data is byte-identical.
Only the two chart types the reports use are provided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

__all__ = ["LinePlot", "heatmap_svg"]

_PALETTE = [
    "#1f6fb4",
    "#d95f02",
    "#1b9e77",
    "#7570b3",
    "#e7298a",
    "#66a61e",
    "#a6761d",
    "#666666",
]

_W, _H = 640, 440
_ML, _MR, _MT, _MB = 72, 24, 36, 56


def _f(x: float) -> str:
    return "%.6g" % x


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        return [lo]
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


@dataclass
class LinePlot:
    """Accumulates series and renders one x/y chart."""

    title: str = ""
    x_label: str = ""
    y_label: str = ""
    log_y: bool = False
    series: list = field(default_factory=list)
    vlines: list = field(default_factory=list)
    regions: list = field(default_factory=list)

    def add_series(
        self,
        xs: Sequence[float],
        ys: Sequence[float],
        label: str = "",
        dashed: bool = False,
        markers: bool = True,
    ) -> None:
        pts = [
            (float(x), float(y))
            for x, y in zip(xs, ys)
            if math.isfinite(x) and math.isfinite(y)
        ]
        self.series.append((pts, label, dashed, markers))

    def add_vline(self, x: float, label: str = "") -> None:
        self.vlines.append((float(x), label))

    def add_region(self, x0: float, x1: float, label: str = "") -> None:
        """Shade [x0, x1]; used to annotate temporal regimes."""
        self.regions.append((float(x0), float(x1), label))

    def _bounds(self):
        xs = [p[0] for pts, *_ in self.series for p in pts]
        ys = [p[1] for pts, *_ in self.series for p in pts]
        xs += [x for x, _ in self.vlines]
        if not xs:
            xs, ys = [0.0, 1.0], [0.0, 1.0]
        if self.log_y:
            ys = [y for y in ys if y > 0] or [1e-3, 1.0]
        x0, x1 = min(xs), max(xs)
        y0, y1 = min(ys), max(ys)
        if x1 == x0:
            x1 = x0 + 1
        if y1 == y0:
            y1 = y0 + 1 if not self.log_y else y0 * 10
        return x0, x1, y0, y1

    def render(self) -> str:
        x0, x1, y0, y1 = self._bounds()
        if self.log_y:
            ly0, ly1 = math.log10(y0), math.log10(y1)

        def px(x: float) -> float:
            return _ML + (x - x0) / (x1 - x0) * (_W - _ML - _MR)

        def py(y: float) -> float:
            if self.log_y:
                f = (math.log10(y) - ly0) / (ly1 - ly0) if y > 0 else 0.0
            else:
                f = (y - y0) / (y1 - y0)
            return _H - _MB - f * (_H - _MT - _MB)

        out = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
            f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
            f'<rect width="{_W}" height="{_H}" fill="white"/>',
        ]
        for rx0, rx1, label in self.regions:
            a, b = max(rx0, x0), min(rx1, x1)
            if b <= a:
                continue
            out.append(
                f'<rect x="{_f(px(a))}" y="{_MT}" width="{_f(px(b) - px(a))}" '
                f'height="{_H - _MT - _MB}" fill="#dddddd" opacity="0.5"/>'
            )
            if label:
                out.append(
                    f'<text x="{_f((px(a) + px(b)) / 2)}" y="{_MT + 14}" '
                    f'text-anchor="middle" fill="#555555">{label}</text>'
                )
        # axes and ticks
        out.append(
            f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
            f'height="{_H - _MT - _MB}" fill="none" stroke="black"/>'
        )
        for t in _nice_ticks(x0, x1):
            out.append(
                f'<line x1="{_f(px(t))}" y1="{_H - _MB}" x2="{_f(px(t))}" '
                f'y2="{_H - _MB + 5}" stroke="black"/>'
                f'<text x="{_f(px(t))}" y="{_H - _MB + 18}" '
                f'text-anchor="middle">{_f(t)}</text>'
            )
        y_ticks = (
            [10.0**k for k in range(math.ceil(ly0), math.floor(ly1) + 1)]
            if self.log_y
            else _nice_ticks(y0, y1)
        )
        for t in y_ticks:
            out.append(
                f'<line x1="{_ML - 5}" y1="{_f(py(t))}" x2="{_ML}" '
                f'y2="{_f(py(t))}" stroke="black"/>'
                f'<text x="{_ML - 8}" y="{_f(py(t) + 4)}" '
                f'text-anchor="end">{_f(t)}</text>'
            )
        for x, label in self.vlines:
            out.append(
                f'<line x1="{_f(px(x))}" y1="{_MT}" x2="{_f(px(x))}" '
                f'y2="{_H - _MB}" stroke="#888888" stroke-dasharray="4,3"/>'
            )
            if label:
                out.append(
                    f'<text x="{_f(px(x) + 4)}" y="{_MT + 26}" '
                    f'fill="#555555">{label}</text>'
                )
        # series
        for k, (pts, label, dashed, markers) in enumerate(self.series):
            color = _PALETTE[k % len(_PALETTE)]
            drawable = [
                (x, y) for x, y in pts if not (self.log_y and y <= 0)
            ]
            if not drawable:
                continue
            path = " ".join(f"{_f(px(x))},{_f(py(y))}" for x, y in drawable)
            dash = ' stroke-dasharray="6,4"' if dashed else ""
            out.append(
                f'<polyline points="{path}" fill="none" stroke="{color}" '
                f'stroke-width="1.5"{dash}/>'
            )
            if markers:
                for x, y in drawable:
                    out.append(
                        f'<circle cx="{_f(px(x))}" cy="{_f(py(y))}" r="2.5" '
                        f'fill="{color}"/>'
                    )
        # legend
        ly = _MT + 8
        for k, (_, label, dashed, _) in enumerate(self.series):
            if not label:
                continue
            color = _PALETTE[k % len(_PALETTE)]
            out.append(
                f'<line x1="{_W - _MR - 120}" y1="{ly}" x2="{_W - _MR - 96}" '
                f'y2="{ly}" stroke="{color}" stroke-width="2"'
                + (' stroke-dasharray="6,4"' if dashed else "")
                + "/>"
                f'<text x="{_W - _MR - 90}" y="{ly + 4}">{label}</text>'
            )
            ly += 16
        # labels
        if self.title:
            out.append(
                f'<text x="{_W / 2:.0f}" y="20" text-anchor="middle" '
                f'font-size="14">{self.title}</text>'
            )
        if self.x_label:
            out.append(
                f'<text x="{_W / 2:.0f}" y="{_H - 12}" '
                f'text-anchor="middle">{self.x_label}</text>'
            )
        if self.y_label:
            out.append(
                f'<text x="16" y="{_H / 2:.0f}" text-anchor="middle" '
                f'transform="rotate(-90 16 {_H / 2:.0f})">{self.y_label}</text>'
            )
        out.append("</svg>")
        return "\n".join(out)

    def write(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write(self.render())


def _heat_color(f: float) -> str:
    """Dark blue -> teal -> yellow ramp on [0, 1]."""
    stops = [
        (0.0, (13, 8, 135)),
        (0.33, (30, 110, 161)),
        (0.66, (53, 183, 121)),
        (1.0, (253, 231, 37)),
    ]
    f = min(max(f, 0.0), 1.0)
    for (f0, c0), (f1, c1) in zip(stops, stops[1:]):
        if f <= f1:
            w = (f - f0) / (f1 - f0)
            r, g, b = (round(a + w * (b_ - a)) for a, b_ in zip(c0, c1))
            return f"#{r:02x}{g:02x}{b:02x}"
    return "#fde725"


def heatmap_svg(
    matrix: Sequence[Sequence[float]],
    x_values: Sequence[float],
    y_values: Sequence[float],
    title: str = "",
    x_label: str = "",
    y_label: str = "",
) -> str:
    """Render matrix[i][j] as colored cells; row i spans y_values[i], column
    j spans x_values[j].  Values are clamped to [0, 1] for coloring."""
    rows = len(matrix)
    cols = len(matrix[0])
    if len(y_values) != rows or len(x_values) != cols:
        raise ValueError(
            f"axis lengths ({len(y_values)}, {len(x_values)}) do not match "
            f"the {rows}x{cols} matrix"
        )
    plot_w, plot_h = _W - _ML - _MR - 60, _H - _MT - _MB
    cw, ch = plot_w / cols, plot_h / rows
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
    ]
    for i in range(rows):
        for j in range(cols):
            x = _ML + j * cw
            y = _H - _MB - (i + 1) * ch
            out.append(
                f'<rect x="{_f(x)}" y="{_f(y)}" width="{_f(cw + 0.5)}" '
                f'height="{_f(ch + 0.5)}" fill="{_heat_color(float(matrix[i][j]))}"/>'
            )
    out.append(
        f'<rect x="{_ML}" y="{_MT}" width="{_f(plot_w)}" height="{_f(plot_h)}" '
        f'fill="none" stroke="black"/>'
    )
    # sparse edge labels
    for j in (0, cols - 1):
        out.append(
            f'<text x="{_f(_ML + (j + 0.5) * cw)}" y="{_H - _MB + 18}" '
            f'text-anchor="middle">{_f(float(x_values[j]))}</text>'
        )
    for i in (0, rows - 1):
        out.append(
            f'<text x="{_ML - 8}" y="{_f(_H - _MB - (i + 0.5) * ch + 4)}" '
            f'text-anchor="end">{_f(float(y_values[i]))}</text>'
        )
    # colorbar
    bar_x = _W - _MR - 40
    steps = 24
    for k in range(steps):
        f0 = k / steps
        y = _H - _MB - (k + 1) / steps * plot_h
        out.append(
            f'<rect x="{bar_x}" y="{_f(y)}" width="16" '
            f'height="{_f(plot_h / steps + 0.5)}" fill="{_heat_color(f0 + 0.5 / steps)}"/>'
        )
    out.append(
        f'<text x="{bar_x + 20}" y="{_H - _MB + 4}">0</text>'
        f'<text x="{bar_x + 20}" y="{_MT + 10}">1</text>'
    )
    if title:
        out.append(
            f'<text x="{_W / 2:.0f}" y="20" text-anchor="middle" '
            f'font-size="14">{title}</text>'
        )
    if x_label:
        out.append(
            f'<text x="{_W / 2:.0f}" y="{_H - 12}" '
            f'text-anchor="middle">{x_label}</text>'
        )
    if y_label:
        out.append(
            f'<text x="16" y="{_H / 2:.0f}" text-anchor="middle" '
            f'transform="rotate(-90 16 {_H / 2:.0f})">{y_label}</text>'
        )
    out.append("</svg>")
    return "\n".join(out)
