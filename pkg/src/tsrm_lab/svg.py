"""Tiny standalone SVG writer for traces, profiles, and histograms.

Deliberately dependency-free: the package's plots are polylines and bar
strips, which fit in a page of string formatting.  Output is a single
self-contained SVG document with axes and tick labels.
"""

from __future__ import annotations

WIDTH = 720
HEIGHT = 360
MARGIN = 46


def _fmt(v: float) -> str:
    s = f"{v:.6g}"
    return "0" if s == "-0" else s


class _Frame:
    """Affine map from data coordinates to the SVG pixel viewport."""

    def __init__(self, xlo, xhi, ylo, yhi):
        if xhi <= xlo:
            xhi = xlo + 1.0
        if yhi <= ylo:
            yhi = ylo + 1.0
        self.xlo, self.xhi = float(xlo), float(xhi)
        self.ylo, self.yhi = float(ylo), float(yhi)
        self.w = WIDTH - 2 * MARGIN
        self.h = HEIGHT - 2 * MARGIN

    def px(self, x: float) -> float:
        return MARGIN + (x - self.xlo) / (self.xhi - self.xlo) * self.w

    def py(self, y: float) -> float:
        return HEIGHT - MARGIN - (y - self.ylo) / (self.yhi - self.ylo) * self.h


def _axes(frame: _Frame, title: str, xlabel: str, ylabel: str) -> list[str]:
    parts = [
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{frame.w}" height="{frame.h}"'
        ' fill="none" stroke="#999" stroke-width="1"/>',
        f'<text x="{WIDTH / 2:.0f}" y="20" text-anchor="middle"'
        f' font-size="14">{title}</text>',
        f'<text x="{WIDTH / 2:.0f}" y="{HEIGHT - 8}" text-anchor="middle"'
        f' font-size="12">{xlabel}</text>',
        f'<text x="14" y="{HEIGHT / 2:.0f}" text-anchor="middle" font-size="12"'
        f' transform="rotate(-90 14 {HEIGHT / 2:.0f})">{ylabel}</text>',
    ]
    for t in range(5):
        xv = frame.xlo + t * (frame.xhi - frame.xlo) / 4
        yv = frame.ylo + t * (frame.yhi - frame.ylo) / 4
        parts.append(f'<text x="{frame.px(xv):.1f}" y="{HEIGHT - MARGIN + 16}"'
                     f' text-anchor="middle" font-size="10">{_fmt(xv)}</text>')
        parts.append(f'<text x="{MARGIN - 6}" y="{frame.py(yv) + 3:.1f}"'
                     f' text-anchor="end" font-size="10">{_fmt(yv)}</text>')
    return parts


def _document(body: list[str]) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}"'
            f' height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">\n'
            '<rect width="100%" height="100%" fill="white"/>')
    return head + "\n" + "\n".join(body) + "\n</svg>\n"


def polyline(xs, ys, title: str, xlabel: str, ylabel: str,
             color: str = "#1f6feb") -> str:
    """Render one polyline with autoscaled axes."""
    xs = [float(v) for v in xs]
    ys = [float(v) for v in ys]
    if not xs:
        raise ValueError("polyline needs at least one point")
    if len(xs) != len(ys):
        raise ValueError("x and y series must have equal length")
    frame = _Frame(min(xs), max(xs), min(ys), max(ys))
    pts = " ".join(f"{frame.px(x):.2f},{frame.py(y):.2f}"
                   for x, y in zip(xs, ys))
    body = _axes(frame, title, xlabel, ylabel)
    body.append(f'<polyline points="{pts}" fill="none" stroke="{color}"'
                ' stroke-width="1.2"/>')
    return _document(body)


def step_profile(edges, counts, title: str) -> str:
    """Render per-edge counts as a horizontal step function."""
    edges = [float(v) for v in edges]
    counts = [float(v) for v in counts]
    xs, ys = [], []
    for e, c in zip(edges, counts):
        xs.extend([e - 0.5, e + 0.5])
        ys.extend([c, c])
    return polyline(xs, ys, title, "edge position", "crossings",
                    color="#d4622a")


def histogram(rows, title: str, xlabel: str) -> str:
    """Render histogram rows [bin_lo, bin_hi, count] as filled bars."""
    rows = [(float(a), float(b), float(c)) for a, b, c in rows]
    if not rows:
        raise ValueError("histogram needs at least one bin")
    top = max(c for _, _, c in rows)
    frame = _Frame(rows[0][0], rows[-1][1], 0.0, top)
    body = _axes(frame, title, xlabel, "count")
    for lo, hi, c in rows:
        x0, x1 = frame.px(lo), frame.px(hi)
        y0, y1 = frame.py(c), frame.py(0.0)
        body.append(f'<rect x="{x0:.2f}" y="{y0:.2f}" width="{x1 - x0:.2f}"'
                    f' height="{y1 - y0:.2f}" fill="#4a90d9" stroke="white"'
                    ' stroke-width="0.5"/>')
    return _document(body)
