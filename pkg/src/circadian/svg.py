"""Minimal SVG line plots: axes, tick labels, polylines. No plotting dependency."""
from __future__ import annotations

from xml.sax.saxutils import escape


class LinePlot:
    def __init__(self, width=480, height=480, margin=50, title=""):
        self.width = width
        self.height = height
        self.margin = margin
        self.title = title
        self.series = []  # (points, color, dash, label)
        self.xlabel = ""
        self.ylabel = ""

    def add(self, points, color="black", dash=None, label=None):
        pts = [(float(x), float(y)) for x, y in points]
        if pts:
            self.series.append((pts, color, dash, label))
        return self

    def _bounds(self):
        xs = [x for pts, *_ in self.series for x, _ in pts]
        ys = [y for pts, *_ in self.series for _, y in pts]
        x0, x1 = min(xs, default=0.0), max(xs, default=1.0)
        y0, y1 = min(ys, default=0.0), max(ys, default=1.0)
        if x1 <= x0:
            x1 = x0 + 1.0
        if y1 <= y0:
            y1 = y0 + 1.0
        return x0, x1, y0, y1

    def render(self) -> str:
        W, H, m = self.width, self.height, self.margin
        x0, x1, y0, y1 = self._bounds()

        def sx(x):
            return m + (x - x0) / (x1 - x0) * (W - 2 * m)

        def sy(y):
            return H - m - (y - y0) / (y1 - y0) * (H - 2 * m)

        out = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
            f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
            f'<line x1="{m}" y1="{H - m}" x2="{W - m}" y2="{H - m}" stroke="black"/>',
            f'<line x1="{m}" y1="{m}" x2="{m}" y2="{H - m}" stroke="black"/>',
        ]
        for i in range(5):
            xv = x0 + i * (x1 - x0) / 4
            yv = y0 + i * (y1 - y0) / 4
            out.append(f'<text x="{sx(xv):.1f}" y="{H - m + 16}" font-size="10" text-anchor="middle">{xv:.3g}</text>')
            out.append(f'<text x="{m - 6}" y="{sy(yv) + 3:.1f}" font-size="10" text-anchor="end">{yv:.3g}</text>')
        if self.title:
            out.append(f'<text x="{W / 2}" y="{m / 2}" font-size="13" text-anchor="middle">{escape(self.title)}</text>')
        if self.xlabel:
            out.append(f'<text x="{W / 2}" y="{H - 10}" font-size="11" text-anchor="middle">{escape(self.xlabel)}</text>')
        if self.ylabel:
            out.append(
                f'<text x="14" y="{H / 2}" font-size="11" text-anchor="middle" '
                f'transform="rotate(-90 14 {H / 2})">{escape(self.ylabel)}</text>'
            )
        for k, (pts, color, dash, label) in enumerate(self.series):
            coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
            dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.2"{dash_attr} points="{coords}"/>')
            if label:
                ly = m + 14 * k
                out.append(
                    f'<text x="{W - m}" y="{ly}" font-size="10" text-anchor="end" fill="{color}">{escape(label)}</text>'
                )
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.render())
