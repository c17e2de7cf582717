"""Figures: polar hair plots, rectangular envelope plots and a critical-orbit panel.

SVG is written by hand so the bytes depend only on the inputs; PNG goes through
matplotlib's Agg backend with fixed size, dpi and no software/date metadata.
"""

from __future__ import annotations

import cmath
import hashlib
import io
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import EmptyProfile
from .serial import dumps

RENDER_VERSION = "1"


@dataclass(frozen=True)
class RenderSpec:
    size: int = 800
    mode: str = "polar"  # polar | rectangular | orbit-overlay
    stroke: float = 0.6
    capped_stroke: float = 0.9
    invert_radius: bool = False  # display 1/r (bouquet familiarity); never touches data
    thin: int = 1  # draw every thin-th sample
    max_radius: float | None = None  # plot boundary; None picks it from the data


@dataclass
class Segment:
    theta: float
    r0: float
    r1: float
    style: str  # hair | capped

    @property
    def length(self) -> float:
        return abs(self.r1 - self.r0)


@dataclass
class Figure:
    """A rendered document plus the drawn primitives, for inspection."""
    svg: str
    segments: list = field(default_factory=list)
    polylines: dict = field(default_factory=dict)
    points: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)


def _f(v: float) -> str:
    return f"{v:.4f}"


def _svg_open(w: int, h: int) -> list[str]:
    return [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
            "<style>.hair{stroke:#222}.capped{stroke:#c0392b}.base{stroke:#888;fill:none}"
            ".lower{stroke:#1f4e9a;fill:none}.upper{stroke:#c0392b;fill:none}"
            ".band{fill:#f3c7c2;stroke:none}.orbit{fill:#222}</style>",
            f'<rect width="{w}" height="{h}" fill="white"/>']


# ---------------------------------------------------------------------------
# polar
# ---------------------------------------------------------------------------

def polar_segments(g, spec: RenderSpec) -> tuple[list[Segment], float]:
    n = len(g.angles)
    if n == 0:
        raise EmptyProfile("gap profile has no angles")
    inner = np.asarray(g.inner_radius, dtype=float)
    outer = np.asarray(g.outer_radius, dtype=float)
    capped = np.asarray(g.capped, dtype=bool) if g.capped is not None else np.zeros(n, bool)
    if spec.invert_radius:
        with np.errstate(divide="ignore"):
            inner, outer = 1.0 / np.maximum(outer, 0.0), 1.0 / np.maximum(inner, 0.0)
    finite = outer[np.isfinite(outer) & ~capped]
    bound = spec.max_radius
    if bound is None:
        top = float(np.max(finite)) if len(finite) else 1.0
        bound = max(top, float(np.max(inner[np.isfinite(inner)], initial=1.0))) * 1.05
    segs = []
    for i in range(0, n, max(1, spec.thin)):
        r0 = max(float(inner[i]), float(inner[i]) - g.err)
        r1 = float(outer[i])
        style = "hair"
        if capped[i]:
            # a hair of infinite height: toward the origin in data radius, to the
            # plot boundary when the radius is inverted or the mode is hairy
            style = "capped"
            if spec.invert_radius or g.normalization == "HairyCircle":
                r1 = bound
            else:
                r0, r1 = 0.0, float(np.min(finite)) if len(finite) else 0.0
        if not math.isfinite(r0):
            r0 = bound
        if not math.isfinite(r1) or r1 > bound:
            r1, style = bound, "capped"
        segs.append(Segment(float(g.angles[i]), r0, r1, style))
    return segs, bound


def render_polar(g, spec: RenderSpec = RenderSpec()) -> Figure:
    """One radial segment per angle, inner to outer radius, in a square panel."""
    segs, bound = polar_segments(g, spec)
    fig = Figure("", segs, meta={"bound": bound, "normalization": g.normalization})
    fig.svg = "\n".join(_svg_open(spec.size, spec.size) + _polar_body(segs, bound, spec, 0, spec.size) + ["</svg>", ""])
    return fig


def _polar_body(segs, bound, spec, x0, size):
    c = size / 2
    scale = 0.48 * size / bound
    out = [f'<g transform="translate({x0},0)">']
    for s in segs:
        ang = 2 * math.pi * s.theta
        ca, sa = math.cos(ang), -math.sin(ang)
        x1, y1 = c + scale * s.r0 * ca, c + scale * s.r0 * sa
        x2, y2 = c + scale * s.r1 * ca, c + scale * s.r1 * sa
        if s.length * scale < 0.05:
            # degenerate hair: keep the curve visible as a dot-sized stroke
            x2, y2 = x1 + 0.05 * ca, y1 + 0.05 * sa
        width = spec.capped_stroke if s.style == "capped" else spec.stroke
        out.append(f'<line class="{s.style}" x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" '
                   f'y2="{_f(y2)}" stroke-width="{width}"/>')
    out.append("</g>")
    return out


# ---------------------------------------------------------------------------
# rectangular
# ---------------------------------------------------------------------------

def render_rectangular(pair, spec: RenderSpec = RenderSpec(mode="rectangular")) -> Figure:
    """Lower and upper envelopes over [0, 1/alpha_n], flagged samples as shaded bands."""
    lower, upper = pair.lower, pair.upper
    xs = np.asarray(lower.grid_x)
    if len(xs) == 0:
        raise EmptyProfile("envelope pair has no samples")
    w, h = spec.size, spec.size // 2
    pad = 30
    lo_v, up_v = np.asarray(lower.values), np.asarray(upper.values)
    y_min = min(-1.0, float(np.min(lo_v)))
    y_max = max(float(np.max(up_v)), y_min + 1e-9)
    x_max = float(xs[-1]) if xs[-1] > 0 else 1.0

    def px(x):
        return pad + (w - 2 * pad) * x / x_max

    def py(y):
        return h - pad - (h - 2 * pad) * (y - y_min) / (y_max - y_min)

    step = max(1, spec.thin)
    body = _svg_open(w, h)
    flags = np.asarray(upper.flags, dtype=bool)
    bands = []
    i = 0
    while i < len(xs):
        if flags[i]:
            j = i
            while j + 1 < len(xs) and flags[j + 1]:
                j += 1
            bands.append((float(xs[i]), float(xs[j])))
            x1, x2 = px(xs[i]), px(xs[j])
            body.append(f'<rect class="band" x="{_f(x1)}" y="{pad}" width="{_f(max(x2 - x1, 0.5))}" height="{h - 2 * pad}"/>')
            i = j + 1
        else:
            i += 1
    lines = {}
    for name, vals in (("lower", lo_v), ("upper", up_v)):
        pts = [(float(xs[k]), float(vals[k])) for k in range(0, len(xs), step)]
        lines[name] = pts
        path = " ".join(f"{_f(px(x))},{_f(py(y))}" for x, y in pts)
        body.append(f'<polyline class="{name}" points="{path}" stroke-width="{spec.stroke}"/>')
    body.append(f'<line class="base" x1="{pad}" y1="{_f(py(-1.0))}" x2="{w - pad}" y2="{_f(py(-1.0))}" stroke-width="0.3"/>')
    body += ["</svg>", ""]
    return Figure("\n".join(body), polylines=lines, meta={"bands": bands, "level": lower.level})


# ---------------------------------------------------------------------------
# quadratic critical orbit
# ---------------------------------------------------------------------------

def quadratic_orbit(alpha: float, iterations: int, escape: float = 10.0) -> list[complex]:
    """Orbit of the critical value -4/27 under z -> e^{2 pi i alpha} z + (27/16) e^{4 pi i alpha} z^2."""
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    lam = cmath.exp(2j * math.pi * alpha)
    c2 = 27 / 16 * lam * lam
    z = complex(-4 / 27, 0.0)
    out = [z]
    for _ in range(iterations - 1):
        z = lam * z + c2 * z * z
        if abs(z) > escape:
            break
        out.append(z)
    return out


def render_orbit_overlay(g, orbit: list[complex], spec: RenderSpec = RenderSpec(mode="orbit-overlay")) -> Figure:
    """Model and critical orbit in two panels side by side (never superposed)."""
    size = spec.size
    segs, bound = polar_segments(g, spec)
    body = _svg_open(2 * size, size) + _polar_body(segs, bound, spec, 0, size)
    pts = np.asarray(orbit[:: max(1, spec.thin)], dtype=complex)
    rad = float(np.max(np.abs(pts))) * 1.05 if len(pts) else 1.0
    c = size / 2
    scale = 0.48 * size / rad
    body.append(f'<g transform="translate({size},0)">')
    for z in pts:
        body.append(f'<circle class="orbit" cx="{_f(c + scale * z.real)}" cy="{_f(c - scale * z.imag)}" r="0.5"/>')
    body += ["</g>", "</svg>", ""]
    return Figure("\n".join(body), segs, points=list(pts), meta={"orbit_radius": rad})


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def to_png(fig: Figure, spec: RenderSpec) -> bytes:
    """Deterministic raster of the figure's primitives via matplotlib Agg."""
    import matplotlib
    matplotlib.use("Agg")
    from matplotlib.collections import LineCollection
    from matplotlib.figure import Figure as MplFigure

    wide = spec.mode == "orbit-overlay"
    mfig = MplFigure(figsize=((2 if wide else 1) * spec.size / 100, spec.size / 100), dpi=100)
    if fig.segments:
        ax = mfig.add_subplot(1, 2 if wide else 1, 1)
        for style, color in (("hair", "#222222"), ("capped", "#c0392b")):
            lines = [[(s.r0 * math.cos(2 * math.pi * s.theta), s.r0 * math.sin(2 * math.pi * s.theta)),
                      (s.r1 * math.cos(2 * math.pi * s.theta), s.r1 * math.sin(2 * math.pi * s.theta))]
                     for s in fig.segments if s.style == style]
            if lines:
                ax.add_collection(LineCollection(lines, colors=color, linewidths=spec.stroke))
        b = fig.meta.get("bound", 1.0)
        ax.set_xlim(-b, b)
        ax.set_ylim(-b, b)
        ax.set_aspect("equal")
        ax.axis("off")
    if fig.polylines:
        ax = mfig.add_subplot(1, 1, 1)
        for name, color in (("lower", "#1f4e9a"), ("upper", "#c0392b")):
            pts = np.asarray(fig.polylines[name])
            ax.plot(pts[:, 0], pts[:, 1], color=color, linewidth=spec.stroke)
    if wide:
        ax = mfig.add_subplot(1, 2, 2)
        pts = np.asarray(fig.points, dtype=complex)
        ax.scatter(pts.real, pts.imag, s=0.2, c="#222222")
        ax.set_aspect("equal")
        ax.axis("off")
    buf = io.BytesIO()
    mfig.savefig(buf, format="png", metadata={"Software": None})
    return buf.getvalue()


def write_figure(fig: Figure, path: str, fmt: str, spec: RenderSpec, provenance: dict) -> str:
    """Write the figure and a JSON sidecar (path + '.json'); returns the sidecar path."""
    data = fig.svg.encode() if fmt == "svg" else to_png(fig, spec)
    with open(path, "wb") as fh:
        fh.write(data)
    side = dict(provenance)
    side.update({"render_version": RENDER_VERSION, "format": fmt, "spec": asdict(spec),
                 "sha256": hashlib.sha256(data).hexdigest(), "segments": len(fig.segments)})
    side_path = path + ".json"
    with open(side_path, "w") as fh:
        fh.write(dumps(side))
    return side_path
