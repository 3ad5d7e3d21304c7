"""Minimal SVG rendering of sweep results: BER and BLER panels, log y.

No plotting dependency; the output is a plain string of SVG primitives.
Good enough to eyeball waterfall ordering, not a figure toolkit.
"""

import math

_COLORS = {"baseline": "#777777", "fixed": "#c0392b", "variable": "#2471a3"}

_PANEL_W = 430
_PANEL_H = 340
_MARGIN_L = 62
_MARGIN_R = 18
_MARGIN_T = 34
_MARGIN_B = 46
_GAP = 34


def _decades(lo, hi):
    start = math.floor(math.log10(lo))
    stop = math.ceil(math.log10(hi))
    return [10.0**e for e in range(start, stop + 1)]


def _panel(points_by_scheme, ch, value, title, x_origin, floor):
    xs = []
    ys = []
    for pts in points_by_scheme.values():
        for p in pts:
            xs.append(p.ebn0(ch))
            ys.append(max(value(p), floor))
    x_lo, x_hi = min(xs), max(xs)
    if x_hi - x_lo < 1e-9:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    y_lo = min(ys)
    y_hi = 1.0
    if y_lo >= y_hi:
        y_lo = y_hi / 10.0
    plot_w = _PANEL_W - _MARGIN_L - _MARGIN_R
    plot_h = _PANEL_H - _MARGIN_T - _MARGIN_B

    def px(x):
        return x_origin + _MARGIN_L + plot_w * (x - x_lo) / (x_hi - x_lo)

    def py(y):
        ll, lh = math.log10(y_lo), math.log10(y_hi)
        return _MARGIN_T + plot_h * (lh - math.log10(y)) / (lh - ll)

    parts = [
        f'<rect x="{x_origin + _MARGIN_L}" y="{_MARGIN_T}" width="{plot_w}" '
        f'height="{plot_h}" fill="none" stroke="#333"/>',
        f'<text x="{x_origin + _MARGIN_L + plot_w / 2:.1f}" y="{_MARGIN_T - 12}" '
        f'text-anchor="middle" font-size="14">{title}</text>',
        f'<text x="{x_origin + _MARGIN_L + plot_w / 2:.1f}" '
        f'y="{_PANEL_H - 10}" text-anchor="middle" font-size="12">Eb/N0 (dB)</text>',
    ]
    for yt in _decades(y_lo, y_hi):
        if yt < y_lo / 1.001 or yt > y_hi * 1.001:
            continue
        yy = py(yt)
        exp = round(math.log10(yt))
        parts.append(
            f'<line x1="{x_origin + _MARGIN_L}" y1="{yy:.1f}" '
            f'x2="{x_origin + _MARGIN_L + plot_w}" y2="{yy:.1f}" '
            f'stroke="#ddd" stroke-width="0.6"/>'
        )
        parts.append(
            f'<text x="{x_origin + _MARGIN_L - 6}" y="{yy + 4:.1f}" '
            f'text-anchor="end" font-size="11">1e{exp}</text>'
        )
    step = max(1, round((x_hi - x_lo) / 4))
    xt = math.ceil(x_lo)
    while xt <= x_hi:
        xx = px(xt)
        parts.append(
            f'<line x1="{xx:.1f}" y1="{_MARGIN_T + plot_h}" x2="{xx:.1f}" '
            f'y2="{_MARGIN_T + plot_h + 5}" stroke="#333"/>'
        )
        parts.append(
            f'<text x="{xx:.1f}" y="{_MARGIN_T + plot_h + 18}" '
            f'text-anchor="middle" font-size="11">{xt}</text>'
        )
        xt += step
    for scheme, pts in points_by_scheme.items():
        color = _COLORS.get(scheme, "#000")
        ordered = sorted(pts, key=lambda p: p.ebn0(ch))
        coords = " ".join(
            f"{px(p.ebn0(ch)):.1f},{py(max(value(p), floor)):.1f}" for p in ordered
        )
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="1.6"/>'
        )
        for p in ordered:
            parts.append(
                f'<circle cx="{px(p.ebn0(ch)):.1f}" '
                f'cy="{py(max(value(p), floor)):.1f}" r="3" fill="{color}"/>'
            )
    return parts


def render_sweep(points, ch, path=None):
    """Two-panel SVG (BER, BLER) for a list of PointStats; optionally save.

    Zero rates are clipped to one tenth of a single event so they stay on
    the log axis.
    """
    if not points:
        raise ValueError("points must be non-empty")
    by_scheme = {}
    for p in points:
        by_scheme.setdefault(p.scheme, []).append(p)
    floor = min(0.1 / (p.trials * p.k_info) for p in points)
    width = 2 * _PANEL_W + _GAP
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{_PANEL_H + 26}" font-family="sans-serif">',
        f'<rect width="{width}" height="{_PANEL_H + 26}" fill="white"/>',
    ]
    parts += _panel(by_scheme, ch, lambda p: p.ber, "Bit error rate", 0, floor)
    parts += _panel(
        by_scheme, ch, lambda p: p.bler, "Block error rate", _PANEL_W + _GAP, floor
    )
    lx = _MARGIN_L
    ly = _PANEL_H + 12
    for scheme in by_scheme:
        color = _COLORS.get(scheme, "#000")
        parts.append(
            f'<line x1="{lx}" y1="{ly}" x2="{lx + 22}" y2="{ly}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{lx + 27}" y="{ly + 4}" font-size="12">{scheme}</text>'
        )
        lx += 130
    parts.append("</svg>")
    text = "\n".join(parts) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text
