"""CSV, JSON and SVG emission for spectra, 2D maps and window reports.

Output is a pure function of the input: identical results give identical bytes.
Floats in CSV/JSON use 17 significant digits so they parse back exactly.
"""

from __future__ import annotations

import json
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from . import __version__
from .spectra import ScanGrid2D, Spectrum, WindowReport

VERSION_TAG = f"tripod-eit {__version__}"


def _g(x) -> str:
    return format(float(x), ".17g")


def _meta_lines(params, evaluator, model, extra=()) -> list[str]:
    lines = [f"# {VERSION_TAG}", f"# evaluator: {evaluator}"]
    if model:
        lines.append(f"# model: {model}")
    lines.append("# params: " + json.dumps(params.to_dict()))
    lines += [f"# {k}: {v}" for k, v in extra]
    return lines


def spectrum_csv(s: Spectrum, extra=()) -> str:
    lines = _meta_lines(s.params, s.evaluator, s.model, extra)
    lines.append("delta_c,re_h,im_h")
    lines += [f"{_g(x)},{_g(z.real)},{_g(z.imag)}" for x, z in zip(s.delta_c, s.h)]
    return "\n".join(lines) + "\n"


def grid_csv(g: ScanGrid2D, extra=()) -> str:
    lines = _meta_lines(g.params, g.evaluator, g.model, [("axis", g.axis), *extra])
    lines.append("axis_value,delta_c,im_h")
    for v, row in zip(g.axis_values, g.absorption):
        sv = _g(v)
        lines += [f"{sv},{_g(x)},{_g(y)}" for x, y in zip(g.delta_c, row)]
    return "\n".join(lines) + "\n"


def read_spectrum_csv(text: str):
    """Parse :func:`spectrum_csv` output into (metadata dict, delta_c, h)."""
    meta, rows = {}, []
    lines = iter(text.splitlines())
    for line in lines:
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(": ")
            if value:
                meta[key] = value
            continue
        if line.strip() != "delta_c,re_h,im_h":
            raise ValueError(f"unexpected CSV header {line!r}")
        break
    for line in lines:
        if line.strip():
            rows.append([float(v) for v in line.split(",")])
    arr = np.array(rows, dtype=float).reshape(-1, 3)
    return meta, arr[:, 0], arr[:, 1] + 1j * arr[:, 2]


def spectrum_json(s: Spectrum, report: WindowReport | None = None) -> str:
    doc = {
        "version": VERSION_TAG,
        "params": s.params.to_dict(),
        "evaluator": s.evaluator,
        "model": s.model,
        "delta_c": s.delta_c.tolist(),
        "re_h": s.h.real.tolist(),
        "im_h": s.h.imag.tolist(),
    }
    if report is not None:
        doc["windows"] = report.to_dict()
    return json.dumps(doc, indent=1) + "\n"


def grid_json(g: ScanGrid2D) -> str:
    doc = {
        "version": VERSION_TAG,
        "params": g.params.to_dict(),
        "evaluator": g.evaluator,
        "model": g.model,
        "axis": g.axis,
        "axis_values": g.axis_values.tolist(),
        "delta_c": g.delta_c.tolist(),
        "absorption": g.absorption.tolist(),
    }
    return json.dumps(doc) + "\n"


# -- SVG ------------------------------------------------------------------------

W, H = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 40, 50

RE_COLOR = "#1f4fbf"  # dispersion
IM_COLOR = "#c8102e"  # absorption

# heatmap ramp, linear in absorption over [0, max]: (fraction, rgb)
RAMP = ((0.0, (255, 255, 255)), (0.5, (253, 141, 60)), (1.0, (127, 0, 0)))


def ramp_color(f: float) -> str:
    f = min(max(f, 0.0), 1.0)
    for (f0, c0), (f1, c1) in zip(RAMP[:-1], RAMP[1:]):
        if f <= f1:
            t = (f - f0) / (f1 - f0)
            rgb = [round(a + t * (b - a)) for a, b in zip(c0, c1)]
            return "#%02x%02x%02x" % tuple(rgb)
    return "#%02x%02x%02x" % RAMP[-1][1]


def _ticks(lo, hi, n=6):
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / n
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    start = np.ceil(lo / step) * step
    return [float(t) for t in np.arange(start, hi + step * 1e-9, step)]


def _fmt_tick(t):
    return f"{t:.6g}" if abs(t) > 1e-12 else "0"


class _Frame:
    def __init__(self, xlo, xhi, ylo, yhi):
        self.xlo, self.xhi, self.ylo, self.yhi = xlo, xhi, ylo, yhi

    def x(self, v):
        return LEFT + (v - self.xlo) / (self.xhi - self.xlo) * (W - LEFT - RIGHT)

    def y(self, v):
        return H - BOTTOM - (v - self.ylo) / (self.yhi - self.ylo) * (H - TOP - BOTTOM)


def _axes(fr: _Frame, title, xlabel, ylabel) -> list[str]:
    out = [
        f'<rect x="{LEFT}" y="{TOP}" width="{W - LEFT - RIGHT}" height="{H - TOP - BOTTOM}" fill="none" stroke="#000"/>',
        f'<text x="{W / 2:.1f}" y="{TOP - 14}" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<text x="{W / 2:.1f}" y="{H - 10}" text-anchor="middle" font-size="13">{escape(xlabel)}</text>',
        f'<text x="16" y="{(H - BOTTOM + TOP) / 2:.1f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 16 {(H - BOTTOM + TOP) / 2:.1f})">{escape(ylabel)}</text>',
    ]
    for t in _ticks(fr.xlo, fr.xhi):
        px = fr.x(t)
        out.append(f'<line x1="{px:.2f}" y1="{H - BOTTOM}" x2="{px:.2f}" y2="{H - BOTTOM + 5}" stroke="#000"/>')
        out.append(f'<text x="{px:.2f}" y="{H - BOTTOM + 18}" text-anchor="middle" font-size="11">{_fmt_tick(t)}</text>')
    for t in _ticks(fr.ylo, fr.yhi):
        py = fr.y(t)
        out.append(f'<line x1="{LEFT - 5}" y1="{py:.2f}" x2="{LEFT}" y2="{py:.2f}" stroke="#000"/>')
        out.append(f'<text x="{LEFT - 8}" y="{py + 4:.2f}" text-anchor="end" font-size="11">{_fmt_tick(t)}</text>')
    return out


def _doc(body: list[str]) -> str:
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" '
        'font-family="sans-serif">\n'
        f'<rect width="{W}" height="{H}" fill="#fff"/>\n'
    )
    return head + "\n".join(body) + "\n</svg>\n"


def spectrum_svg(s: Spectrum, title: str = "") -> str:
    """Dispersion (Re h) and absorption (Im h) against delta_c."""
    x = s.delta_c
    ys = np.concatenate([s.h.real, s.h.imag])
    lo, hi = float(ys.min()), float(ys.max())
    pad = 0.05 * (hi - lo or 1.0)
    fr = _Frame(float(x[0]), float(x[-1]), lo - pad, hi + pad)
    body = _axes(fr, title or f"{s.evaluator}", "delta_c", "h")
    if fr.ylo < 0 < fr.yhi:
        body.append(f'<line x1="{LEFT}" y1="{fr.y(0):.2f}" x2="{W - RIGHT}" y2="{fr.y(0):.2f}" stroke="#999" stroke-dasharray="3,3"/>')
    for vals, color, name in ((s.h.real, RE_COLOR, "Re h (dispersion)"), (s.h.imag, IM_COLOR, "Im h (absorption)")):
        pts = " ".join(f"{fr.x(a):.2f},{fr.y(b):.2f}" for a, b in zip(x, vals))
        body.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"><title>{name}</title></polyline>')
    body.append(f'<text x="{W - RIGHT - 8}" y="{TOP + 16}" text-anchor="end" font-size="12" fill="{RE_COLOR}">Re h</text>')
    body.append(f'<text x="{W - RIGHT - 8}" y="{TOP + 32}" text-anchor="end" font-size="12" fill="{IM_COLOR}">Im h</text>')
    return _doc(body)


def grid_svg(g: ScanGrid2D, title: str = "") -> str:
    """Heatmap of Im h: delta_c across, the scanned parameter upward."""
    right_pad = 70
    xs, ys, a = g.delta_c, g.axis_values, g.absorption
    vmax = float(a.max()) if a.max() > 0 else 1.0
    dx = (xs[-1] - xs[0]) / (len(xs) - 1)
    dy = (ys[-1] - ys[0]) / (len(ys) - 1)
    fr = _Frame(xs[0] - dx / 2, xs[-1] + dx / 2, ys[0] - dy / 2, ys[-1] + dy / 2)
    plot_w = W - LEFT - RIGHT - right_pad
    scale_x = plot_w / (fr.xhi - fr.xlo)

    def px(v):
        return LEFT + (v - fr.xlo) * scale_x

    body = []
    for r, yv in enumerate(ys):
        y0, y1 = fr.y(yv + dy / 2), fr.y(yv - dy / 2)
        colors = [ramp_color(v / vmax) for v in a[r]]
        c = 0
        while c < len(xs):
            e = c
            while e + 1 < len(xs) and colors[e + 1] == colors[c]:
                e += 1
            x0, x1 = px(xs[c] - dx / 2), px(xs[e] + dx / 2)
            body.append(f'<rect x="{x0:.2f}" y="{y0:.2f}" width="{x1 - x0:.2f}" height="{y1 - y0:.2f}" fill="{colors[c]}"/>')
            c = e + 1
    # frame and ticks drawn over the cells, narrower than a line plot
    body.append(f'<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{H - TOP - BOTTOM}" fill="none" stroke="#000"/>')
    body.append(f'<text x="{LEFT + plot_w / 2:.1f}" y="{TOP - 14}" text-anchor="middle" font-size="14">{escape(title or g.axis + " scan")}</text>')
    body.append(f'<text x="{LEFT + plot_w / 2:.1f}" y="{H - 10}" text-anchor="middle" font-size="13">delta_c</text>')
    mid = (H - BOTTOM + TOP) / 2
    body.append(f'<text x="16" y="{mid:.1f}" text-anchor="middle" font-size="13" transform="rotate(-90 16 {mid:.1f})">{escape(g.axis)}</text>')
    for t in _ticks(xs[0], xs[-1]):
        body.append(f'<text x="{px(t):.2f}" y="{H - BOTTOM + 18}" text-anchor="middle" font-size="11">{_fmt_tick(t)}</text>')
    for t in _ticks(ys[0], ys[-1]):
        body.append(f'<text x="{LEFT - 8}" y="{fr.y(t) + 4:.2f}" text-anchor="end" font-size="11">{_fmt_tick(t)}</text>')
    # color bar
    bx, bw = W - RIGHT - 40, 14
    steps = 64
    bh = (H - TOP - BOTTOM) / steps
    for k in range(steps):
        f = (k + 0.5) / steps
        body.append(f'<rect x="{bx}" y="{H - BOTTOM - (k + 1) * bh:.2f}" width="{bw}" height="{bh + 0.3:.2f}" fill="{ramp_color(f)}"/>')
    body.append(f'<text x="{bx + bw + 3}" y="{H - BOTTOM:.1f}" font-size="10">0</text>')
    body.append(f'<text x="{bx + bw + 3}" y="{TOP + 8}" font-size="10">{vmax:.3g}</text>')
    return _doc(body)


# -- files ----------------------------------------------------------------------


def write_text(path: Path, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def render_text(result, fmt: str, title: str = "", extra=(), report=None) -> str:
    """One artifact as text; ``report`` is embedded in spectrum JSON."""
    if isinstance(result, Spectrum):
        table = {"csv": lambda: spectrum_csv(result, extra), "json": lambda: spectrum_json(result, report),
                 "svg": lambda: spectrum_svg(result, title)}
    elif isinstance(result, ScanGrid2D):
        table = {"csv": lambda: grid_csv(result, extra), "json": lambda: grid_json(result),
                 "svg": lambda: grid_svg(result, title)}
    elif isinstance(result, WindowReport):
        table = {"json": lambda: json.dumps(result.to_dict(), indent=1) + "\n"}
    else:
        raise TypeError(f"cannot render {type(result).__name__}")
    if fmt not in table:
        raise ValueError(f"{type(result).__name__} has no {fmt} rendering")
    return table[fmt]()


def render_outputs(result, formats, out_dir, stem: str, title: str = "", extra=(), report=None) -> list[Path]:
    """Write ``result`` (Spectrum, ScanGrid2D or WindowReport) as ``out_dir/stem.<fmt>``."""
    return [
        write_text(Path(out_dir) / f"{stem}.{fmt}", render_text(result, fmt, title, extra, report))
        for fmt in formats
    ]
