"""CSV tables and a small deterministic SVG line-plot writer."""
from __future__ import annotations

import csv
import io
import math
from typing import List, Sequence, Tuple

import numpy as np

SIGNIFICANT_DIGITS = 10

# colour-blind friendly palette, cycled per series
PALETTE = ("#0072b2", "#d55e00", "#009e73", "#cc79a7", "#e69f00", "#56b4e9", "#000000")
DASHES = ("", "6,3", "2,2", "8,3,2,3")


def format_number(value) -> str:
    """Scientific notation with 10 significant digits, e.g. 1.000000000e-7."""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    mantissa, exponent = f"{value:.{SIGNIFICANT_DIGITS - 1}e}".split("e")
    return f"{mantissa}e{int(exponent)}"


def csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    if not rows:
        raise ValueError("no rows to write")
    width = len(header)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ValueError(f"row {i} has {len(row)} columns, expected {width}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else format_number(v) for v in row])
    return buf.getvalue()


def emit_csv(header: Sequence[str], rows: Sequence[Sequence], path) -> None:
    """Write rows as CSV with LF line endings; raises OSError on I/O failure."""
    text = csv_text(header, rows)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# ---------------------------------------------------------------- SVG

WIDTH, HEIGHT = 640, 440
LEFT, RIGHT, TOP, BOTTOM = 90, 20, 40, 60


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick_label(v: float) -> str:
    if v == 0.0:
        return "0"
    exp = math.floor(math.log10(abs(v)))
    if -3 <= exp <= 3:
        return f"{v:.6g}"
    mant = v / 10.0**exp
    if math.isclose(mant, round(mant), abs_tol=1e-9):
        mant_s = f"{int(round(mant))}"
    else:
        mant_s = f"{mant:.3g}"
    return f"1e{exp}" if mant_s in ("1", "1.0") else f"{mant_s}e{exp}"


def _nice_step(span: float, target: int = 6) -> float:
    raw = span / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for m in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= m * mag:
            return m * mag
    return 10.0 * mag


def axis_ticks(lo: float, hi: float, scale: str) -> Tuple[float, float, List[float]]:
    """Axis limits and tick positions; decades for log axes."""
    if scale == "log":
        e_lo = math.floor(math.log10(lo) + 1e-12)
        e_hi = math.ceil(math.log10(hi) - 1e-12)
        if e_hi == e_lo:
            e_hi += 1
        ticks = [10.0**e for e in range(e_lo, e_hi + 1)]
        return ticks[0], ticks[-1], ticks
    if hi == lo:
        pad = abs(lo) * 0.1 or 1.0
        lo, hi = lo - pad, hi + pad
    step = _nice_step(hi - lo)
    start = math.floor(lo / step) * step
    stop = math.ceil(hi / step) * step
    n = int(round((stop - start) / step))
    ticks = [start + i * step for i in range(n + 1)]
    # avoid printing -0 and rounding noise
    ticks = [0.0 if abs(t) < step * 1e-9 else float(f"{t:.12g}") for t in ticks]
    return ticks[0], ticks[-1], ticks


def _transform(values, lo, hi, scale, p0, p1):
    v = np.asarray(values, dtype=float)
    if scale == "log":
        v, lo, hi = np.log10(v), math.log10(lo), math.log10(hi)
    return p0 + (v - lo) / (hi - lo) * (p1 - p0)


def svg_lineplot(
    series: Sequence[Tuple[str, Sequence[float], Sequence[float]]],
    xscale: str = "linear",
    yscale: str = "linear",
    xlabel: str = "",
    ylabel: str = "",
    title: str = "",
) -> str:
    """Render labelled (x, y) series as a standalone SVG document."""
    if not series:
        raise ValueError("at least one series is required")
    for scale in (xscale, yscale):
        if scale not in ("linear", "log"):
            raise ValueError(f"axis scale must be 'linear' or 'log', got {scale!r}")
    xs, ys = [], []
    for label, x, y in series:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.size == 0 or x.shape != y.shape:
            raise ValueError(f"series {label!r} must be non-empty with matching x and y")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError(f"series {label!r} contains non-finite values")
        if xscale == "log" and np.any(x <= 0.0):
            raise ValueError(f"series {label!r}: non-positive x on a log axis")
        if yscale == "log" and np.any(y <= 0.0):
            raise ValueError(f"series {label!r}: non-positive y on a log axis")
        xs.append(x)
        ys.append(y)
    allx, ally = np.concatenate(xs), np.concatenate(ys)
    x0, x1, xticks = axis_ticks(float(allx.min()), float(allx.max()), xscale)
    y0, y1, yticks = axis_ticks(float(ally.min()), float(ally.max()), yscale)
    px0, px1 = LEFT, WIDTH - RIGHT
    py0, py1 = HEIGHT - BOTTOM, TOP

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.2f}" y="22" text-anchor="middle" font-size="14">{_esc(title)}</text>')
    out.append(
        f'<rect x="{px0}" y="{py1}" width="{px1 - px0}" height="{py0 - py1}" '
        f'fill="none" stroke="black"/>'
    )
    for t in xticks:
        px = float(_transform(t, x0, x1, xscale, px0, px1))
        out.append(f'<line x1="{_fmt(px)}" y1="{py0}" x2="{_fmt(px)}" y2="{py0 + 5}" stroke="black"/>')
        out.append(f'<text x="{_fmt(px)}" y="{py0 + 18}" text-anchor="middle">{_tick_label(t)}</text>')
    for t in yticks:
        py = float(_transform(t, y0, y1, yscale, py0, py1))
        out.append(f'<line x1="{px0 - 5}" y1="{_fmt(py)}" x2="{px0}" y2="{_fmt(py)}" stroke="black"/>')
        out.append(f'<text x="{px0 - 8}" y="{_fmt(py + 4)}" text-anchor="end">{_tick_label(t)}</text>')
    if xlabel:
        out.append(f'<text x="{(px0 + px1) / 2:.2f}" y="{HEIGHT - 15}" text-anchor="middle">{_esc(xlabel)}</text>')
    if ylabel:
        cy = (py0 + py1) / 2
        out.append(
            f'<text x="18" y="{cy:.2f}" text-anchor="middle" '
            f'transform="rotate(-90 18 {cy:.2f})">{_esc(ylabel)}</text>'
        )
    for i, ((label, _, _), x, y) in enumerate(zip(series, xs, ys)):
        color = PALETTE[i % len(PALETTE)]
        dash = DASHES[(i // len(PALETTE)) % len(DASHES)]
        px = _transform(x, x0, x1, xscale, px0, px1)
        py = _transform(y, y0, y1, yscale, py0, py1)
        pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(px, py))
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash_attr} points="{pts}"/>')
    # legend, top right
    lx = px1 - 170
    for i, (label, _, _) in enumerate(series):
        ly = py1 + 16 + 16 * i
        color = PALETTE[i % len(PALETTE)]
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 24}" y2="{ly}" stroke="{color}" stroke-width="1.5"/>')
        out.append(f'<text x="{lx + 30}" y="{ly + 4}">{_esc(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def emit_svg_lineplot(series, path, xscale="linear", yscale="linear", xlabel="", ylabel="", title="") -> None:
    text = svg_lineplot(series, xscale, yscale, xlabel, ylabel, title)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
