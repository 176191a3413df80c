"""Self-contained SVG heatmaps for sweep grids.

Convenience views only: a fixed five-stop color ramp (dark violet, blue,
teal, green, yellow), gray cells for undefined values, log-scaled color when
the data spans more than three decades, a white solid masing-threshold
polyline and a blue dashed optimal-pump polyline when the grid carries them.
"""

from __future__ import annotations

import math

import numpy as np

from .sweeps import SweepGrid

RAMP = (
    (0.00, (68, 1, 84)),
    (0.25, (59, 82, 139)),
    (0.50, (33, 145, 140)),
    (0.75, (94, 201, 98)),
    (1.00, (253, 231, 37)),
)
NAN_COLOR = "#b4b4b4"
THRESHOLD_STYLE = 'stroke="#ffffff" stroke-width="2" fill="none"'
W_OPT_STYLE = 'stroke="#1f77b4" stroke-width="2" stroke-dasharray="6,4" fill="none"'
LOG_COLOR_DECADES = 3.0

MARGIN_LEFT = 70
MARGIN_RIGHT = 90
MARGIN_TOP = 40
MARGIN_BOTTOM = 50


def _ramp_color(t: float) -> str:
    t = min(1.0, max(0.0, t))
    for (t0, c0), (t1, c1) in zip(RAMP[:-1], RAMP[1:]):
        if t <= t1:
            f = 0.0 if t1 == t0 else (t - t0) / (t1 - t0)
            rgb = tuple(round(a + f * (b - a)) for a, b in zip(c0, c1))
            return "#%02x%02x%02x" % rgb
    return "#%02x%02x%02x" % RAMP[-1][1]


def _color_scale(matrix: np.ndarray) -> tuple[str, float, float]:
    """Pick linear or log color mapping from the span of the finite values."""
    finite = matrix[np.isfinite(matrix)]
    if finite.size == 0:
        return "linear", 0.0, 1.0
    lo, hi = float(finite.min()), float(finite.max())
    positive = finite[finite > 0.0]
    if positive.size == finite.size and lo > 0.0 and \
            math.log10(hi / lo) > LOG_COLOR_DECADES:
        return "log", lo, hi
    if hi == lo:
        hi = lo + 1.0
    return "linear", lo, hi


def _normalise(value: float, mode: str, lo: float, hi: float) -> float:
    if mode == "log":
        return (math.log10(value) - math.log10(lo)) \
            / (math.log10(hi) - math.log10(lo))
    return (value - lo) / (hi - lo)


def _axis_fraction(value: float, minimum: float, maximum: float,
                   scale: str) -> float:
    if maximum == minimum:
        return 0.5
    if scale == "log":
        return (math.log10(value) - math.log10(minimum)) \
            / (math.log10(maximum) - math.log10(minimum))
    return (value - minimum) / (maximum - minimum)


def _tick_values(minimum: float, maximum: float, scale: str,
                 count: int = 5) -> list[float]:
    if minimum == maximum:
        return [minimum]
    if scale == "log":
        return list(np.logspace(math.log10(minimum), math.log10(maximum), count))
    return list(np.linspace(minimum, maximum, count))


def render_heatmap(grid: SweepGrid, quantity: str, path: str,
                   width: int = 720, height: int = 560) -> None:
    """Write one quantity of the grid as a standalone SVG heatmap."""
    if quantity == "regime" or quantity not in grid.data:
        raise ValueError(f"no numeric matrix for quantity {quantity!r}")
    matrix = grid.data[quantity]
    spec = grid.spec
    ny, nx = matrix.shape
    plot_w = width - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = height - MARGIN_TOP - MARGIN_BOTTOM
    cell_w = plot_w / nx
    cell_h = plot_h / ny
    mode, lo, hi = _color_scale(matrix)

    def x_pixel(value: float) -> float:
        f = _axis_fraction(value, spec.x.minimum, spec.x.maximum, spec.x.scale)
        return MARGIN_LEFT + f * plot_w

    def y_pixel(value: float) -> float:
        f = _axis_fraction(value, spec.y.minimum, spec.y.maximum, spec.y.scale)
        return MARGIN_TOP + (1.0 - f) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
        f'<text x="{width / 2:.1f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="16">{quantity} '
        f'({mode} color scale)</text>',
    ]
    for iy in range(ny):
        for ix in range(nx):
            v = matrix[iy, ix]
            if not math.isfinite(v):
                color = NAN_COLOR
            elif mode == "log" and v <= 0.0:
                color = NAN_COLOR
            else:
                color = _ramp_color(_normalise(float(v), mode, lo, hi))
            # row iy=0 is the smallest y value, drawn at the bottom
            px = MARGIN_LEFT + ix * cell_w
            py = MARGIN_TOP + (ny - 1 - iy) * cell_h
            parts.append(f'<rect x="{px:.2f}" y="{py:.2f}" '
                         f'width="{cell_w + 0.5:.2f}" height="{cell_h + 0.5:.2f}" '
                         f'fill="{color}"/>')

    for curve, style in ((grid.threshold_curve, THRESHOLD_STYLE),
                         (grid.w_opt_curve, W_OPT_STYLE)):
        if curve is None or len(curve) < 2:
            continue
        pts = []
        for cx, cy in curve:
            fx = _axis_fraction(cx, spec.x.minimum, spec.x.maximum, spec.x.scale)
            fy = _axis_fraction(cy, spec.y.minimum, spec.y.maximum, spec.y.scale)
            if -0.02 <= fx <= 1.02 and -0.02 <= fy <= 1.02:
                pts.append(f"{x_pixel(cx):.2f},{y_pixel(cy):.2f}")
        if len(pts) >= 2:
            parts.append(f'<polyline points="{" ".join(pts)}" {style}/>')

    for value in _tick_values(spec.x.minimum, spec.x.maximum, spec.x.scale):
        px = x_pixel(value)
        parts.append(f'<line x1="{px:.1f}" y1="{MARGIN_TOP + plot_h}" '
                     f'x2="{px:.1f}" y2="{MARGIN_TOP + plot_h + 5}" '
                     f'stroke="#000"/>')
        parts.append(f'<text x="{px:.1f}" y="{MARGIN_TOP + plot_h + 20}" '
                     f'text-anchor="middle" font-family="sans-serif" '
                     f'font-size="11">{value:.3g}</text>')
    for value in _tick_values(spec.y.minimum, spec.y.maximum, spec.y.scale):
        py = y_pixel(value)
        parts.append(f'<line x1="{MARGIN_LEFT - 5}" y1="{py:.1f}" '
                     f'x2="{MARGIN_LEFT}" y2="{py:.1f}" stroke="#000"/>')
        parts.append(f'<text x="{MARGIN_LEFT - 8}" y="{py + 4:.1f}" '
                     f'text-anchor="end" font-family="sans-serif" '
                     f'font-size="11">{value:.3g}</text>')
    parts.append(f'<text x="{MARGIN_LEFT + plot_w / 2:.1f}" '
                 f'y="{height - 12}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="13">{spec.x.name}</text>')
    parts.append(f'<text x="18" y="{MARGIN_TOP + plot_h / 2:.1f}" '
                 f'text-anchor="middle" font-family="sans-serif" '
                 f'font-size="13" transform="rotate(-90 18 '
                 f'{MARGIN_TOP + plot_h / 2:.1f})">{spec.y.name}</text>')

    # color bar with end labels
    bar_x = width - MARGIN_RIGHT + 20
    bar_h = plot_h
    steps = 64
    for k in range(steps):
        t = (k + 0.5) / steps
        py = MARGIN_TOP + (1.0 - t) * bar_h
        parts.append(f'<rect x="{bar_x}" y="{py - bar_h / steps:.2f}" '
                     f'width="16" height="{bar_h / steps + 0.5:.2f}" '
                     f'fill="{_ramp_color(t)}"/>')
    parts.append(f'<text x="{bar_x + 20}" y="{MARGIN_TOP + 10}" '
                 f'font-family="sans-serif" font-size="11">{hi:.3g}</text>')
    parts.append(f'<text x="{bar_x + 20}" y="{MARGIN_TOP + bar_h}" '
                 f'font-family="sans-serif" font-size="11">{lo:.3g}</text>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")
