"""Command-line entry point: `arithmodel <subcommand> STREAM [options]`."""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
from dataclasses import dataclass

from . import __version__
from . import intervals as I
from .cache import CACHE_ENV, Cache, default_dir, key
from .cfrac import context, format_stream, parse_stream
from .errors import ArithModelError, ConfigError
from .serial import dumps, num

CONTEXT_DEPTH = 60


@dataclass(frozen=True)
class RunConfig:
    command: str
    stream: str | None
    depth: int | None
    horizon: int
    resolution: int
    cap: float
    tol: float
    level: int
    precision: str
    fmt: str
    out: str | None
    cache_dir: str | None
    mode: str
    invert: bool
    iterations: int
    seed: int
    quick: bool
    r: float | None
    x: float | None
    y: float | None

    def validate(self):
        if self.command not in ("verify", "ymap-eval") and not self.stream:
            raise ConfigError(f"{self.command} needs a stream spec")
        if self.depth is not None and self.depth < 0:
            raise ConfigError("--depth must be >= 0")
        if self.horizon < 1:
            raise ConfigError("--horizon must be >= 1")
        if self.resolution < 1:
            raise ConfigError("--resolution must be >= 1")
        if not self.cap > 0:
            raise ConfigError("--cap must be positive")
        if self.level < -1:
            raise ConfigError("--level must be >= -1")
        if self.iterations < 1:
            raise ConfigError("--iterations must be >= 1")
        if self.command == "render" and not self.out:
            raise ConfigError("render needs --out")
        if self.command == "render" and self.figure_format() not in ("svg", "png"):
            raise ConfigError("render writes svg or png")
        if self.command == "ymap-eval" and None in (self.r, self.x, self.y):
            raise ConfigError("ymap-eval needs --r, --x and --y")
        return self

    def figure_format(self) -> str:
        if self.fmt in ("svg", "png"):
            return self.fmt
        # fall back to the output suffix when no figure format was given
        return os.path.splitext(self.out or "")[1].lstrip(".").lower()

    def params(self) -> dict:
        """Parameters that determine the result (the cache key)."""
        return {"stream": self.stream, "depth": self.depth, "horizon": self.horizon,
                "resolution": self.resolution, "cap": num(self.cap), "tol": num(self.tol),
                "level": self.level}


def _policy(cfg):
    from .classify import Policy
    J = 20 if cfg.depth is None else cfg.depth
    return Policy(depth=max(CONTEXT_DEPTH, J + 2 + cfg.horizon), herman_horizon=cfg.horizon,
                  J=max(J, 1), resolution=cfg.resolution, cap=cfg.cap)


def _ctx(cfg, need=CONTEXT_DEPTH):
    return context(parse_stream(cfg.stream), need)


def _cached(cfg, compute):
    cache = Cache(cfg.cache_dir)
    k = key(cfg.command, cfg.params())
    doc = cache.get(k)
    if doc is None:
        doc = compute()
        cache.put(k, doc)
    return doc


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_expand(cfg):
    stream = parse_stream(cfg.stream)
    depth = cfg.depth if cfg.depth is not None else 20
    avail = stream.certified_depth
    if avail is not None:
        depth = min(depth, avail)
    rows = []
    for n in range(depth):
        a, e = stream.digit(n)
        rows.append([n, a if isinstance(a, int) else f"exp({num(I.mid(a.log))})", e])
    if cfg.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "a_n", "eps_next"])
        w.writerows(rows)
        return buf.getvalue()
    return dumps({"stream": format_stream(stream), "head": list(stream.head),
                  "digits": [[a, e] for _, a, e in rows]})


def cmd_classify(cfg):
    from .classify import classify, gap_profile, validate_topology
    from .model import profile_limit

    def compute():
        pol = _policy(cfg)
        ctx = _ctx(cfg, pol.depth)
        res = classify(ctx, pol)
        doc = res.to_json()
        if res.verdict != "Undetermined":
            try:
                pair = profile_limit(ctx, -1, pol.J, pol.resolution, pol.cap, pol.c12)
                mode = "Bouquet" if res.verdict == "CantorBouquet" else "HairyCircle"
                doc["topology"] = validate_topology(gap_profile(pair, mode), cfg.tol).to_json()
            except ArithModelError as exc:
                doc["topology"] = {"error": type(exc).__name__}
        return doc
    return dumps(_cached(cfg, compute))


def cmd_classify_arith(cfg):
    from .arith import brjuno, herman_check_h

    ctx = _ctx(cfg, max(CONTEXT_DEPTH, cfg.horizon + 30))
    b = brjuno(ctx, 0, min(60, ctx.depth)).to_json()
    h = herman_check_h(ctx, 0, cfg.horizon).to_json()
    return dumps({"brjuno": {"partial": b["partial"], "tail": b["tail"], "verdict": b["verdict"]},
                  "herman": {"kind": h["kind"], "witness_m": h["witness_m"], "values": h["values"]}})


def _model_doc(cfg):
    from .model import profile_base, profile_limit
    J = 20 if cfg.depth is None else cfg.depth
    ctx = _ctx(cfg, max(CONTEXT_DEPTH, cfg.level + J + 2))
    if J == 0:
        base = profile_base(ctx, cfg.level, cfg.resolution, cfg.cap)
        return {"kind": "base", "profile": base.to_json(), "x": [num(x) for x in base.grid_x]}
    pair = profile_limit(ctx, cfg.level, J, cfg.resolution, cfg.cap)
    return {"kind": "envelopes", "pair": pair.to_json(), "x": [num(x) for x in pair.lower.grid_x]}


def cmd_model(cfg):
    doc = _cached(cfg, lambda: _model_doc(cfg))
    if cfg.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if doc["kind"] == "base":
            w.writerow(["x", "h"])
            w.writerows(zip(doc["x"], doc["profile"]["values"]))
        else:
            p = doc["pair"]
            w.writerow(["x", "lower", "upper", "flag"])
            w.writerows(zip(doc["x"], p["lower"]["values"], p["upper"]["values"], p["upper"]["flags"]))
        return buf.getvalue()
    return dumps(doc)


def cmd_render(cfg):
    from .classify import gap_profile
    from .model import profile_limit
    from .render import RenderSpec, quadratic_orbit, render_orbit_overlay, render_polar, render_rectangular, write_figure

    J = 20 if cfg.depth is None else max(cfg.depth, 1)
    level = -1 if cfg.mode != "rectangular" else cfg.level
    ctx = _ctx(cfg, max(CONTEXT_DEPTH, level + J + 2))
    pair = profile_limit(ctx, level, J, cfg.resolution, cfg.cap)
    spec = RenderSpec(mode=cfg.mode, invert_radius=cfg.invert)
    norm = "Bouquet" if pair.potentially_divergent and pair.lower.capped_fraction > 0 else "HairyCircle"
    if cfg.mode == "rectangular":
        fig = render_rectangular(pair, spec)
    elif cfg.mode == "orbit-overlay":
        rot = float(I.mid(ctx.stream.head[0] + ctx.stream.head[1] * ctx.alphas[0]))
        fig = render_orbit_overlay(gap_profile(pair, norm), quadratic_orbit(rot, cfg.iterations), spec)
    else:
        fig = render_polar(gap_profile(pair, norm), spec)
    prov = {"stream": format_stream(ctx.stream), "stream_hash": ctx.stream.stream_hash,
            "J": J, "resolution": cfg.resolution, "cap": num(cfg.cap), "normalization": norm,
            "version": __version__}
    side = write_figure(fig, cfg.out, cfg.figure_format(), spec, prov)
    return dumps({"figure": cfg.out, "sidecar": side, "segments": len(fig.segments)})


def cmd_verify(cfg):
    from .verify import run_all
    results = run_all(cfg.seed, cfg.quick)
    lines = [f"seed {cfg.seed}"] + [r.row() for r in results]
    ok = all(r.passed for r in results)
    return "\n".join(lines) + "\n", 0 if ok else 1


def cmd_orbit(cfg):
    from .render import quadratic_orbit
    ctx = _ctx(cfg, 30)
    rot = float(I.mid(ctx.stream.head[0] + ctx.stream.head[1] * ctx.alphas[0]))
    pts = quadratic_orbit(rot, cfg.iterations)
    return dumps({"alpha": num(rot), "count": len(pts),
                  "max_modulus": num(max(abs(z) for z in pts)),
                  "points": [[num(z.real), num(z.imag)] for z in pts]})


def cmd_ymap_eval(cfg):
    from .ymap import vertical_image
    ext = cfg.precision == "extended"
    im = vertical_image(cfg.r, cfg.x, cfg.y, extended=ext)
    return dumps({"re": num(cfg.r * cfg.x), "im": num(im), "precision": cfg.precision})


COMMANDS = {
    "expand": cmd_expand,
    "classify": cmd_classify,
    "classify-arith": cmd_classify_arith,
    "model": cmd_model,
    "render": cmd_render,
    "verify": cmd_verify,
    "orbit": cmd_orbit,
    "ymap-eval": cmd_ymap_eval,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="arithmodel", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("stream", nargs="?", help="periodic:..., growth:..., real:... or a JSON stream document")
    p.add_argument("--depth", type=int, help="digits (expand) or model depth J (model/classify/render)")
    p.add_argument("--horizon", type=int, default=30, help="Herman check horizon M")
    p.add_argument("--resolution", type=int, default=1024, help="samples per unit length")
    p.add_argument("--cap", type=float, default=50.0, help="height cap for divergent hairs")
    p.add_argument("--tol", type=float, default=1e-9, help="base-set tolerance for topology statistics")
    p.add_argument("--level", type=int, default=-1)
    p.add_argument("--precision", choices=["double", "extended"], default="double")
    p.add_argument("--format", dest="fmt", choices=["json", "csv", "svg", "png"], default="json")
    p.add_argument("--out", help="output file (render: required; others: instead of stdout)")
    p.add_argument("--cache-dir", default=None, help=f"cache directory (default ${CACHE_ENV})")
    p.add_argument("--mode", choices=["polar", "rectangular", "orbit-overlay"], default="polar")
    p.add_argument("--invert", action="store_true", help="render 1/r for bouquet profiles")
    p.add_argument("--iterations", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=20240611)
    p.add_argument("--quick", action="store_true", help="smaller verify samples")
    p.add_argument("--r", type=float)
    p.add_argument("--x", type=float)
    p.add_argument("--y", type=float)
    return p


def config_from_args(ns) -> RunConfig:
    cache_dir = ns.cache_dir or (str(default_dir()) if default_dir() else None)
    return RunConfig(ns.command, ns.stream, ns.depth, ns.horizon, ns.resolution, ns.cap, ns.tol,
                     ns.level, ns.precision, ns.fmt, ns.out, cache_dir, ns.mode, ns.invert,
                     ns.iterations, ns.seed, ns.quick, ns.r, ns.x, ns.y).validate()


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(build_parser().parse_args(argv))
        res = COMMANDS[cfg.command](cfg)
    except ArithModelError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    text, code = res if isinstance(res, tuple) else (res, 0)
    if cfg.out and cfg.command != "render":
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader went away (e.g. `| head`); keep the interpreter from complaining at exit
            sys.stdout = open(os.devnull, "w")
    return code


if __name__ == "__main__":
    sys.exit(main())
