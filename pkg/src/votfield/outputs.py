"""CSV emission and deterministic SVG rendering of run results.

All emitters are pure functions of their inputs: floats are written with
repr (CSV) or fixed precision (SVG), nothing timestamped or random, so
rerunning with the same data reproduces byte-identical files.
"""

import csv
from pathlib import Path

import numpy as np

from .errors import ConfigError

SWEEP_COLUMNS = ("a_target", "a_mp", "n_trials", "mean_vot", "sd_vot", "sem_vot",
                 "skewness", "ch_ms", "frac_stabilized", "mean_time_to_threshold",
                 "readout_method", "master_seed")

PLOT_KINDS = ("sweep_line", "field_evolution_heatmap", "surface_2d")


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _open_csv(path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def emit_sweep_csv(result, path):
    """One row per condition, grid order (a_target outer asc, a_mp inner asc)."""
    path = _open_csv(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        for c in result.cells:
            writer.writerow([
                _cell(c.condition.a_target), _cell(c.condition.a_mp),
                _cell(c.n_trials), _cell(c.mean_vot), _cell(c.sd_vot),
                _cell(c.sem_vot), _cell(c.skewness), _cell(c.ch_ms),
                _cell(c.frac_stabilized), _cell(c.mean_time_to_threshold),
                result.readout_method, _cell(result.master_seed),
            ])
    return path


def emit_trajectory_csv(traj, path, summary_path=None):
    """Long-format (step, x, u) dump plus a per-step summary file
    (step, max_u, n_above_threshold); the summary lands next to `path` with
    an `_summary` suffix unless given explicitly."""
    if traj.states is None:
        raise ConfigError("trajectory has no per-step states (memory-lean mode); "
                          "re-run with keep_states=True to export it")
    path = _open_csv(path)
    if summary_path is None:
        summary_path = path.with_name(path.stem + "_summary" + path.suffix)
    summary_path = _open_csv(summary_path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("step", "x", "u"))
        for t in range(len(traj)):
            row_u = traj.states[t]
            writer.writerows((t, x, repr(float(row_u[x]))) for x in range(row_u.shape[0]))
    with summary_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("step", "max_u", "n_above_threshold"))
        for t in range(len(traj)):
            writer.writerow((t, repr(float(traj.max_u[t])), int(traj.n_above[t])))
    return path, summary_path


# ------------------------------------------------------------ SVG rendering


def _f(v):
    return f"{v:.2f}"


def _hex(rgb):
    return "#%02x%02x%02x" % tuple(int(round(c)) for c in rgb)


def _blend(c0, c1, t):
    return tuple(c0[i] + (c1[i] - c0[i]) * t for i in range(3))


_BLUE = (42, 76, 170)
_YELLOW = (238, 201, 21)
_RED = (188, 36, 38)
_WHITE = (255, 255, 255)


def _diverging(v, vmax, pos_color, neg_color):
    if vmax <= 0:
        return _hex(_WHITE)
    t = max(-1.0, min(1.0, v / vmax))
    if t >= 0:
        return _hex(_blend(_WHITE, pos_color, t))
    return _hex(_blend(_WHITE, neg_color, -t))


def _tick_step(span, target_ticks=8):
    if span <= 0:
        return 1.0
    raw = span / target_ticks
    mag = 10.0 ** np.floor(np.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            return mult * mag
    return 10.0 * mag


def _ticks(lo, hi, step):
    first = np.ceil(lo / step) * step
    vals = []
    v = first
    while v <= hi + 1e-9:
        vals.append(round(v, 9))
        v += step
    return vals


class _Svg:
    def __init__(self, width, height):
        self.width = width
        self.height = height
        self.parts = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">',
            f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
        ]

    def line(self, x1, y1, x2, y2, stroke="#000000", width=1.0, dash=None):
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(f'<line x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" '
                          f'stroke="{stroke}" stroke-width="{_f(width)}"{d}/>')

    def rect(self, x, y, w, h, fill):
        self.parts.append(f'<rect x="{_f(x)}" y="{_f(y)}" width="{_f(w)}" height="{_f(h)}" '
                          f'fill="{fill}"/>')

    def circle(self, cx, cy, r, fill):
        self.parts.append(f'<circle cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(r)}" fill="{fill}"/>')

    def polyline(self, pts, stroke="#000000", width=1.5):
        coords = " ".join(f"{_f(x)},{_f(y)}" for x, y in pts)
        self.parts.append(f'<polyline points="{coords}" fill="none" stroke="{stroke}" '
                          f'stroke-width="{_f(width)}"/>')

    def text(self, x, y, s, size=11, anchor="start", fill="#000000"):
        self.parts.append(f'<text x="{_f(x)}" y="{_f(y)}" font-family="sans-serif" '
                          f'font-size="{size}" text-anchor="{anchor}" fill="{fill}">{s}</text>')

    def write(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(self.parts) + "\n</svg>\n", encoding="utf-8")
        return path


class _Axes:
    """Maps data coordinates onto a margin-framed plot box."""

    def __init__(self, svg, xlim, ylim, left=62, right=16, top=28, bottom=46):
        self.svg = svg
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        self.l, self.t = left, top
        self.w = svg.width - left - right
        self.h = svg.height - top - bottom

    def px(self, x):
        return self.l + (x - self.x0) / (self.x1 - self.x0) * self.w

    def py(self, y):
        return self.t + (self.y1 - y) / (self.y1 - self.y0) * self.h

    def frame(self, xlabel, ylabel):
        s = self.svg
        s.line(self.l, self.t + self.h, self.l + self.w, self.t + self.h)
        s.line(self.l, self.t, self.l, self.t + self.h)
        s.text(self.l + self.w / 2, s.height - 10, xlabel, anchor="middle")
        s.text(14, self.t + self.h / 2, ylabel, anchor="middle")
        # rotate y label around its anchor point
        self.svg.parts[-1] = self.svg.parts[-1].replace(
            "<text ", f'<text transform="rotate(-90 14 {_f(self.t + self.h / 2)})" ', 1)

    def xticks(self, vals, fmt="{:g}"):
        for v in vals:
            x = self.px(v)
            self.svg.line(x, self.t + self.h, x, self.t + self.h + 4)
            self.svg.text(x, self.t + self.h + 16, fmt.format(v), size=10, anchor="middle")

    def yticks(self, vals, fmt="{:g}"):
        for v in vals:
            y = self.py(v)
            self.svg.line(self.l - 4, y, self.l, y)
            self.svg.text(self.l - 7, y + 3.5, fmt.format(v), size=10, anchor="end")


def _render_sweep_line(result, path):
    """mean_vot ± SEM against a_mp, reference line at the target center,
    highlighted conditions marked."""
    xs = list(result.a_mp_values)
    rows = list(result.a_target_values)
    svg = _Svg(640, 440)
    means = [c.mean_vot for c in result.cells]
    sems = [0.0 if np.isnan(c.sem_vot) else c.sem_vot for c in result.cells]
    lo = min(min(m - s for m, s in zip(means, sems)), result.p_target) - 1.5
    hi = max(max(m + s for m, s in zip(means, sems)), result.p_target) + 1.5
    xpad = 0.25 if len(xs) > 1 else 1.0
    ax = _Axes(svg, (min(xs) - xpad, max(xs) + xpad), (lo, hi))
    svg.text(ax.l, 18, f"mean VOT vs competitor amplitude (n={result.cells[0].n_trials}, "
                       f"{result.readout_method})", size=12)
    ax.frame("competitor amplitude a_mp", "mean VOT (ms)")
    ax.xticks(_ticks(min(xs), max(xs), max(1.0, _tick_step(max(xs) - min(xs)))))
    ax.yticks(_ticks(lo, hi, _tick_step(hi - lo)))
    yref = ax.py(result.p_target)
    svg.line(ax.l, yref, ax.l + ax.w, yref, stroke="#777777", dash="6,4")
    svg.text(ax.l + ax.w, yref - 5, f"{result.p_target:g} ms", size=10, anchor="end",
             fill="#777777")
    shades = ["#000000", "#555555", "#999999"]
    for r in range(len(rows)):
        cells = result.cells[r * len(xs):(r + 1) * len(xs)]
        pts = [(ax.px(x), ax.py(c.mean_vot)) for x, c in zip(xs, cells)]
        color = shades[r % len(shades)]
        svg.polyline(pts, stroke=color)
        for x, c in zip(xs, cells):
            if not np.isnan(c.sem_vot) and c.sem_vot > 0:
                svg.line(ax.px(x), ax.py(c.mean_vot - c.sem_vot),
                         ax.px(x), ax.py(c.mean_vot + c.sem_vot), stroke=color)
            svg.circle(ax.px(x), ax.py(c.mean_vot), 2.5, color)
        for x, c in zip(xs, cells):
            if x in (0.0, -3.0, -6.0):
                svg.circle(ax.px(x), ax.py(c.mean_vot), 4.5, "#bc2426")
                svg.text(ax.px(x), ax.t + 12, f"a_mp={x:g}", size=10, anchor="middle",
                         fill="#bc2426")
    return svg.write(path)


def _render_heatmap(traj, path):
    """Activation over (time step, field position), diverging around u = 0."""
    if traj.states is None:
        raise ConfigError("trajectory has no per-step states (memory-lean mode); "
                          "re-run with keep_states=True to plot it")
    states = traj.states
    n_rows, n = states.shape
    svg = _Svg(700, 460)
    ax = _Axes(svg, (0, n_rows), (0, n), left=62, right=90, top=28, bottom=46)
    vmax = float(np.max(np.abs(states)))
    svg.text(ax.l, 18, "field evolution (activation u; threshold at 0)", size=12)
    cw = ax.w / n_rows
    chh = ax.h / n
    for t in range(n_rows):
        col = states[t]
        x = ax.l + t * cw
        for i in range(n):
            svg.rect(x, ax.t + (n - 1 - i) * chh, cw + 0.05, chh + 0.05,
                     _diverging(col[i], vmax, _RED, _BLUE))
    ax.frame("time step", "VOT (ms)")
    ax.xticks(_ticks(0, n_rows - 1, max(1.0, _tick_step(n_rows, 6))))
    ax.yticks(_ticks(0, n, max(1.0, _tick_step(n, 8))))
    # colorbar
    cb_x = svg.width - 70
    cb_h = ax.h * 0.6
    cb_y = ax.t + (ax.h - cb_h) / 2
    steps = 40
    for k in range(steps):
        v = vmax * (1 - 2 * k / (steps - 1))
        svg.rect(cb_x, cb_y + k * cb_h / steps, 14, cb_h / steps + 0.05,
                 _diverging(v, vmax, _RED, _BLUE))
    svg.text(cb_x + 18, cb_y + 8, f"{vmax:.1f}", size=9)
    svg.text(cb_x + 18, cb_y + cb_h / 2 + 3, "0", size=9)
    svg.text(cb_x + 18, cb_y + cb_h, f"{-vmax:.1f}", size=9)
    svg.text(cb_x + 7, cb_y - 8, "u", size=10, anchor="middle")
    return svg.write(path)


def _render_surface(result, path):
    """ch_ms over the (a_mp, a_target) grid; yellow above the zero plane
    (hyperarticulation), blue below (trace)."""
    xs = list(result.a_mp_values)
    ys = list(result.a_target_values)
    svg = _Svg(640, 420)
    ax = _Axes(svg, (0, len(xs)), (0, len(ys)), left=62, right=120, top=28, bottom=46)
    vmax = max(1e-9, max(abs(c.ch_ms) for c in result.cells))
    svg.text(ax.l, 18, f"ch_ms over the amplitude grid (zero plane = mean VOT at "
                       f"{result.p_target:g} ms)", size=12)
    cw = ax.w / len(xs)
    chh = ax.h / len(ys)
    for r in range(len(ys)):
        for k in range(len(xs)):
            c = result.cells[r * len(xs) + k]
            svg.rect(ax.l + k * cw, ax.t + (len(ys) - 1 - r) * chh, cw + 0.05, chh + 0.05,
                     _diverging(c.ch_ms, vmax, _YELLOW, _BLUE))
    ax.frame("competitor amplitude a_mp", "target amplitude a_target")
    for k, v in enumerate(xs):
        if float(v).is_integer():
            svg.line(ax.l + (k + 0.5) * cw, ax.t + ax.h, ax.l + (k + 0.5) * cw, ax.t + ax.h + 4)
            svg.text(ax.l + (k + 0.5) * cw, ax.t + ax.h + 16, f"{v:g}", size=10,
                     anchor="middle")
    for r, v in enumerate(ys):
        if float(v).is_integer():
            y = ax.t + (len(ys) - 1 - r + 0.5) * chh
            svg.line(ax.l - 4, y, ax.l, y)
            svg.text(ax.l - 7, y + 3.5, f"{v:g}", size=10, anchor="end")
    # colorbar with the zero plane marked
    cb_x = svg.width - 100
    cb_h = ax.h * 0.7
    cb_y = ax.t + (ax.h - cb_h) / 2
    steps = 40
    for k in range(steps):
        v = vmax * (1 - 2 * k / (steps - 1))
        svg.rect(cb_x, cb_y + k * cb_h / steps, 14, cb_h / steps + 0.05,
                 _diverging(v, vmax, _YELLOW, _BLUE))
    zero_y = cb_y + cb_h / 2
    svg.line(cb_x - 3, zero_y, cb_x + 17, zero_y)
    svg.text(cb_x + 20, cb_y + 8, f"+{vmax:.1f}", size=9)
    svg.text(cb_x + 20, zero_y + 3, "0 (70 ms)", size=9)
    svg.text(cb_x + 20, cb_y + cb_h, f"-{vmax:.1f}", size=9)
    svg.text(cb_x + 7, cb_y - 8, "ch_ms", size=10, anchor="middle")
    return svg.write(path)


def render_plots(data, kind, path):
    """Render `data` as a deterministic SVG of the given kind.

    kinds: sweep_line (SweepResult), field_evolution_heatmap (Trajectory with
    states), surface_2d (SweepResult grid).
    """
    if kind == "sweep_line":
        return _render_sweep_line(data, path)
    if kind == "field_evolution_heatmap":
        return _render_heatmap(data, path)
    if kind == "surface_2d":
        return _render_surface(data, path)
    raise ConfigError(f"unknown plot kind {kind!r}; expected one of {PLOT_KINDS}")
