"""Property suites behind `arithmodel verify`: sampled checks of Y_r and an
independent point-cloud construction of the depth-J model regions.

Every suite draws from a seeded generator and reports the seed, so a run is
reproducible from its report alone.
"""

from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass

import numpy as np
from mpmath import mp

from .ymap import vertical_image, vertical_image_many, vertical_image_turn

DEFAULT_SEED = 20240611


@dataclass
class SuiteResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    samples: int
    seconds: float

    def row(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"{mark}  {self.name:<28} worst={self.worst:.3e}  tol={self.tolerance:.1e}  n={self.samples}"

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "worst": f"{self.worst:.17g}",
                "tolerance": f"{self.tolerance:.17g}", "samples": self.samples}


def _timed(fn):
    def run(*args, **kw):
        t0 = time.perf_counter()
        res = fn(*args, **kw)
        res.seconds = time.perf_counter() - t0
        return res
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


def sample_pairs(rng, n):
    """r in (0, 1/2), two points with Im in [-1, 100] and |Re| <= 10/r."""
    r = rng.uniform(1e-6, 0.5, n)
    x = rng.uniform(-10, 10, (2, n)) / r
    y = rng.uniform(-1, 100, (2, n))
    return r, x, y


@_timed
def contraction(n=100_000, seed=DEFAULT_SEED):
    """|Y_r(w1) - Y_r(w2)| <= 0.9 |w1 - w2| + 1e-9."""
    rng = np.random.default_rng(seed)
    r, x, y = sample_pairs(rng, n)
    re1, im1 = r * x[0], _vectorised(r, x[0], y[0])
    re2, im2 = r * x[1], _vectorised(r, x[1], y[1])
    lhs = np.hypot(re1 - re2, im1 - im2)
    rhs = 0.9 * np.hypot(x[0] - x[1], y[0] - y[1]) + 1e-9
    worst = float(np.max(lhs - rhs + 1e-9))
    return SuiteResult("contraction", bool(np.all(lhs <= rhs)), worst, 1e-9, n, 0.0)


def _vectorised(r, x, y):
    return vertical_image_many(r, r * x, y)


@_timed
def image_bound(n=100_000, seed=DEFAULT_SEED):
    """Im Y_r(w) >= -0.9 - 1e-9."""
    rng = np.random.default_rng(seed + 1)
    r, x, y = sample_pairs(rng, n)
    im = _vectorised(r, x[0], y[0])
    worst = float(-0.9 - np.min(im))
    return SuiteResult("image bound", bool(np.min(im) >= -0.9 - 1e-9), worst, 1e-9, n, 0.0)


@_timed
def functional_equations(n=10_000, seed=DEFAULT_SEED, extended=False):
    """Translation by 1/r and the shifted-line identities (both signs)."""
    rng = np.random.default_rng(seed + 2)
    r = rng.uniform(1e-3, 0.5, n)
    x = rng.uniform(-10, 10, n) / r
    y = rng.uniform(-1, 100, n)
    t = rng.uniform(-1, 100, n)
    worst = 0.0
    if extended:
        count = min(n, 2000)
        with mp.workprec(113):
            for i in range(count):
                ri = mp.mpf(r[i])
                a = vertical_image(ri, mp.mpf(x[i]) + 1 / ri, y[i], extended=True)
                b = vertical_image(ri, x[i], y[i], extended=True)
                worst = max(worst, float(abs(a - b)))
                s = vertical_image(ri, 1 / ri - 1, t[i], extended=True)
                s0 = vertical_image(ri, 0, t[i], extended=True)
                worst = max(worst, float(abs(s - s0)))
        tol = 1e-15
        name = "functional eqs (extended)"
        n = count
    else:
        for i in range(n):
            a = vertical_image(r[i], x[i] + 1 / r[i], y[i])
            b = vertical_image(r[i], x[i], y[i])
            worst = max(worst, abs(a - b))
            worst = max(worst, abs(r[i] * (x[i] + 1 / r[i]) - r[i] * x[i] - 1))
            s = vertical_image(r[i], 1 / r[i] - 1, t[i])
            s0 = vertical_image(r[i], 0.0, t[i])
            worst = max(worst, abs(s - s0), abs(r[i] * (1 / r[i] - 1) - (1 - r[i])))
        tol = 1e-9
        name = "functional eqs (double)"
    return SuiteResult(name, worst < tol, worst, tol, n, 0.0)


@_timed
def fixed_point_axis(n=1_000, seed=DEFAULT_SEED):
    """|Y_r(0)| and the real part of Y_r on i[-1, 100] (zero by construction)."""
    rng = np.random.default_rng(seed + 3)
    r = rng.uniform(1e-6, 0.5, n)
    ys = rng.uniform(-1, 100, n)
    worst = 0.0
    for ri, yi in zip(r, ys):
        worst = max(worst, abs(float(vertical_image_turn(ri, 0.0, 0.0))))
        # axis: Re Y_r(iy) = r * 0; the sign flip for eps = +1 keeps it 0
        w = -complex(ri * 0.0, float(vertical_image_turn(ri, 0.0, yi))).conjugate()
        worst = max(worst, abs(w.real))
    return SuiteResult("fixed point / axis", worst < 1e-12, worst, 1e-12, n, 0.0)


# ---------------------------------------------------------------------------
# point-cloud construction of M_{-1}^J
# ---------------------------------------------------------------------------

def y_direct(r, w):
    """Y_r(w) straight from the defining quotient, numpy complex arithmetic."""
    w = np.asarray(w, dtype=complex)
    e3 = math.exp(-3 * math.pi * r)
    num = e3 - np.exp(-1j * math.pi * r) * np.exp(-2j * math.pi * r * w)
    den = e3 - cmath.exp(1j * math.pi * r)
    return r * w.real + 1j * np.log(np.abs(num / den)) / (2 * math.pi)


def level_direct(alpha, eps, w):
    v = y_direct(alpha, w)
    return -np.conj(v) if eps == 1 else v


def point_cloud_lower(alphas, digits, eps0, J, resolution, ys=None, x_oversample=24):
    """Lower boundary of M_{-1}^J at x = k / resolution, from literal unions of point clouds.

    alphas[k] = alpha_k, digits[k] = (a_k, eps_{k+1}).  M_{J-1}^0 is sampled as a
    filled rectangle; every level applies Y_{n+1} to the whole cloud and forms
    the block unions, with the J/K restrictions for the final block; level -1
    is Y_0 of the level 0 cloud, translated onto [0, 1] when eps_0 = +1.
    """
    if ys is None:
        ys = np.linspace(-1.0, 4.0, 41)
    top = J - 1
    length = 1 / alphas[top]
    xs = np.linspace(0.0, length, int(length * resolution * x_oversample) + 1)
    X, Yv = np.meshgrid(xs, ys)
    cloud = (X + 1j * Yv).ravel()
    for n in range(top - 1, -1, -1):
        a, eps = digits[n]
        inv_next = 1 / alphas[n + 1]
        img = level_direct(alphas[n + 1], eps, cloud)
        if eps == -1:
            parts = [img + l for l in range(0, a - 1)]
            parts.append(img[cloud.real <= inv_next - 1] + (a - 1))
        else:
            parts = [img + l for l in range(1, a + 1)]
            parts.append(img[cloud.real >= inv_next - 1] + (a + 1))
        cloud = np.concatenate(parts)
    out = level_direct(alphas[0], eps0, cloud)
    if eps0 == 1:
        out = out + 1
    grid_x = np.linspace(0.0, 1.0, resolution + 1)
    half = 0.5 / resolution
    order = np.argsort(out.real)
    re, im = out.real[order], out.imag[order]
    lower = np.full(len(grid_x), np.nan)
    for i, g in enumerate(grid_x):
        lo, hi = np.searchsorted(re, [g - half, g + half])
        if hi > lo:
            lower[i] = np.min(im[lo:hi])
    return grid_x, lower


def oracle_gap(values, oracle, steps=2):
    """Sup over samples of the distance from oracle[i] to the range of values on i-steps..i+steps,
    and the plain sup-norm difference."""
    worst_nb = 0.0
    for i in range(len(values)):
        nb = values[max(0, i - steps): i + steps + 1]
        worst_nb = max(worst_nb, float(nb.min() - oracle[i]), float(oracle[i] - nb.max()))
    return max(worst_nb, 0.0), float(np.max(np.abs(values - oracle)))


@_timed
def oracle_equivalence(resolution=64, J=2):
    """profile_refine against the point cloud for the golden and (2, +1) streams."""
    from .cfrac import context, parse_stream
    from .model import profile_depth

    worst, ok = 0.0, True
    for text in ("periodic:head=(1,-1);body=[(3,-1)]", "periodic:head=(0,1);body=[(2,1)]"):
        ctx = context(parse_stream(text), J + 4)
        alphas = [float(ctx.alpha(k).mid) for k in range(J + 1)]
        digits = [(ctx.digit(k), ctx.eps(k + 1)) for k in range(J + 1)]
        _, lower = point_cloud_lower(alphas, digits, ctx.eps(0), J, resolution)
        prof = profile_depth(ctx, -1, J, resolution)
        _, sup = oracle_gap(prof.values, lower)
        worst = max(worst, sup)
        ok = ok and sup <= 2.0 / resolution
    return SuiteResult("oracle equivalence", ok, worst, 2.0 / resolution, 2, 0.0)


def run_all(seed=DEFAULT_SEED, quick=False) -> list[SuiteResult]:
    n_big = 10_000 if quick else 100_000
    return [
        contraction(n_big, seed),
        image_bound(n_big, seed),
        functional_equations(10_000, seed),
        functional_equations(10_000, seed, extended=True),
        fixed_point_axis(1_000, seed),
        oracle_equivalence(),
    ]
