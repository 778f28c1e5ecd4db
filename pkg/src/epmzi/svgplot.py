"""Minimal standalone SVG line plots (polyline + labeled axis ticks).

The output files are static quick-look plots of CSV columns, so a hand-rolled
writer keeps the package free of plotting dependencies.  Every document is
self-contained: inline styling, no external assets.
"""

from __future__ import annotations

import math

import numpy as np

WIDTH = 760
HEIGHT = 480
MARGIN_LEFT = 78
MARGIN_RIGHT = 24
MARGIN_TOP = 42
MARGIN_BOTTOM = 56

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    """Round tick positions covering [lo, hi] with a 1-2-5 step."""
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return []
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(target, 2)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        step = mult * mag
        if raw <= step:
            break
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 0.5 * step:
        ticks.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return ticks


def _fmt(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-3:
        return f"{v:.3g}"
    return f"{v:.6g}"


def _data_range(arrays: list[np.ndarray]) -> tuple[float, float]:
    finite = np.concatenate([a[np.isfinite(a)] for a in arrays]) if arrays else np.array([])
    if finite.size == 0:
        return 0.0, 1.0
    lo, hi = float(finite.min()), float(finite.max())
    if hi == lo:
        pad = abs(lo) if lo != 0 else 1.0
        return lo - 0.5 * pad, hi + 0.5 * pad
    pad = 0.04 * (hi - lo)
    return lo - pad, hi + pad


def line_plot(
    x: np.ndarray,
    series: list[tuple[str, np.ndarray]],
    title: str,
    xlabel: str,
    ylabel: str,
) -> str:
    """Render named y-series against shared x as an SVG document string."""
    x = np.asarray(x, dtype=float)
    ys = [(label, np.asarray(y, dtype=float)) for label, y in series]
    for label, y in ys:
        if y.shape != x.shape:
            raise ValueError(f"series {label!r} length {y.size} != x length {x.size}")

    x_lo, x_hi = _data_range([x])
    y_lo, y_hi = _data_range([y for _, y in ys])
    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def px(v: float) -> float:
        return MARGIN_LEFT + (v - x_lo) / (x_hi - x_lo) * plot_w

    def py(v: float) -> float:
        return MARGIN_TOP + (y_hi - v) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="#333" stroke-width="1"/>',
        f'<text x="{WIDTH / 2:.1f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>',
    ]

    for tick in _nice_ticks(x_lo, x_hi):
        tx = px(tick)
        parts.append(
            f'<line x1="{tx:.1f}" y1="{MARGIN_TOP + plot_h}" x2="{tx:.1f}" '
            f'y2="{MARGIN_TOP + plot_h + 5}" stroke="#333"/>'
        )
        parts.append(
            f'<text x="{tx:.1f}" y="{MARGIN_TOP + plot_h + 19}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_fmt(tick)}</text>'
        )
    for tick in _nice_ticks(y_lo, y_hi):
        ty = py(tick)
        parts.append(
            f'<line x1="{MARGIN_LEFT - 5}" y1="{ty:.1f}" x2="{MARGIN_LEFT}" '
            f'y2="{ty:.1f}" stroke="#333"/>'
        )
        parts.append(
            f'<text x="{MARGIN_LEFT - 8}" y="{ty + 4:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{_fmt(tick)}</text>'
        )

    parts.append(
        f'<text x="{MARGIN_LEFT + plot_w / 2:.1f}" y="{HEIGHT - 14}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">{xlabel}</text>'
    )
    parts.append(
        f'<text x="20" y="{MARGIN_TOP + plot_h / 2:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 20 {MARGIN_TOP + plot_h / 2:.1f})">{ylabel}</text>'
    )

    for k, (label, y) in enumerate(ys):
        color = _COLORS[k % len(_COLORS)]
        # Break the polyline at non-finite samples instead of drawing through them.
        finite = np.isfinite(y)
        start = None
        for i in range(y.size + 1):
            inside = i < y.size and finite[i]
            if inside and start is None:
                start = i
            elif not inside and start is not None:
                pts = " ".join(
                    f"{px(x[j]):.2f},{py(y[j]):.2f}" for j in range(start, i)
                )
                parts.append(
                    f'<polyline points="{pts}" fill="none" stroke="{color}" '
                    'stroke-width="1.4"/>'
                )
                start = None
        if len(ys) > 1:
            ly = MARGIN_TOP + 16 + 16 * k
            parts.append(
                f'<line x1="{MARGIN_LEFT + plot_w - 108}" y1="{ly - 4}" '
                f'x2="{MARGIN_LEFT + plot_w - 88}" y2="{ly - 4}" stroke="{color}" '
                'stroke-width="2"/>'
            )
            parts.append(
                f'<text x="{MARGIN_LEFT + plot_w - 82}" y="{ly}" '
                f'font-family="sans-serif" font-size="11">{label}</text>'
            )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
