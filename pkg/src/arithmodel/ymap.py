"""The contraction maps Y_r and the signed level maps Y_n.

Y_r(w) = r Re w + (i/2pi) log |(e^{-3 pi r} - e^{-i pi r} e^{-2 pi i r w}) / (e^{-3 pi r} - e^{i pi r})|

Y_r preserves vertical lines, so the model only ever needs the imaginary part
on a vertical line.  Writing t = r Re w (one "turn" per period 1/r) and
z = pi r (3 + 2 Im w) - i pi (r + 2t), the numerator is -e^{-3 pi r} expm1(z), hence

    Im Y_r(w) = (-3 pi r + log|expm1(z)| - log|expm1(-pi r (3 + i))|) / 2pi,

which is what every evaluator below computes.  t only matters modulo 1.
"""

from __future__ import annotations

import math

import numpy as np
from mpmath import iv, mp

from . import intervals as I
from .errors import DomainViolation

TWO_PI = 2.0 * math.pi
# below this the float formula loses r entirely; switch to the asymptotic form
TINY_R = 1e-150
LOG_PI_SQRT10 = math.log(math.pi * math.sqrt(10.0))
LOG_SQRT10 = 0.5 * math.log(10.0)


def _check(r, y, ell=None):
    if ell is None and not (0.0 < r <= 0.5):
        raise DomainViolation(f"rotation parameter r={r} outside (0, 1/2]")
    if np.any(np.asarray(y) < -1.0 - 1e-12):
        raise DomainViolation("point below the half-plane Im w >= -1")


def _log_abs_expm1(a, b):
    """log|e^{a+ib} - 1| for float arrays, stable for a near 0 and for huge a."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.empty(np.broadcast(a, b).shape)
    a, b = np.broadcast_arrays(a, b)
    big = a > 0.5
    if np.any(big):
        ab, bb = a[big], b[big]
        with np.errstate(over="ignore", invalid="ignore"):
            e = np.exp(-ab)
            out[big] = ab + 0.5 * np.log1p(-2.0 * e * np.cos(bb) + e * e)
        out[big & np.isinf(a)] = np.inf
    small = ~big
    if np.any(small):
        as_, bs = a[small], b[small]
        re = np.expm1(as_) * np.cos(bs) - 2.0 * np.sin(0.5 * bs) ** 2
        im = np.exp(as_) * np.sin(bs)
        with np.errstate(divide="ignore"):
            out[small] = np.log(np.hypot(re, im))
    return out


def _reduce_turn(t):
    t = np.asarray(t, dtype=float)
    return t - np.round(t)


def vertical_image_turn(r, t, y, ell=None):
    """Im Y_r(x + iy) with t = r*x given directly (vectorised over t and y).

    ``ell`` = log(1/r) lets callers pass levels where r underflows a double.
    """
    t = _reduce_turn(t)
    y = np.asarray(y, dtype=float)
    if ell is None:
        ell = -math.log(r) if r > 0 else math.inf
    if r >= TINY_R:
        u = 3.0 + 2.0 * y
        num = _log_abs_expm1(math.pi * r * u, -math.pi * (r + 2.0 * t))
        den = _log_abs_expm1(-3.0 * math.pi * r, -math.pi * r)
        return (-3.0 * math.pi * r + num - den) / TWO_PI
    return _tiny_turn(r, t, y, ell)


def vertical_image_many(r, t, y):
    """Im Y_r at turn t and height y with r an array as well (all r >= TINY_R)."""
    r = np.asarray(r, dtype=float)
    if np.any(r < TINY_R) or np.any(r > 0.5):
        raise DomainViolation("vectorised evaluation needs TINY_R <= r <= 1/2")
    t = _reduce_turn(t)
    u = 3.0 + 2.0 * np.asarray(y, dtype=float)
    num = _log_abs_expm1(math.pi * r * u, -math.pi * (r + 2.0 * t))
    den = _log_abs_expm1(-3.0 * math.pi * r, -math.pi * r)
    return (-3.0 * math.pi * r + num - den) / TWO_PI


def _tiny_turn(r, t, y, ell):
    """Asymptotic evaluation for r < TINY_R (r may be 0 with only ell known).

    |t| >= 1e-9: expm1(z) -> e^{-2 pi i t} - 1, modulus 2|sin pi t|.
    smaller t:   expm1(z) = z (1 + z/2 + z^2/6), z = pi r (u - i (1 + 2t/r)).
    The denominator is pi r sqrt(10) to relative accuracy r.
    """
    t, y = np.broadcast_arrays(t, y)
    out = np.empty(t.shape)
    u = 3.0 + 2.0 * y
    far = np.abs(t) >= 1e-9
    with np.errstate(divide="ignore"):
        out[far] = (np.log(2.0 * np.abs(np.sin(math.pi * t[far]))) + ell - LOG_PI_SQRT10) / TWO_PI
    near = ~far
    if np.any(near):
        tn, un = t[near], u[near]
        if r > 0:
            q = tn / r
            mod = np.hypot(un, 1.0 + 2.0 * q)
            z = math.pi * r * (un - 1j * (1.0 + 2.0 * q))
            corr = np.log(np.abs(1.0 + z / 2.0 + z * z / 6.0))
            out[near] = (np.log(mod) - LOG_SQRT10 + corr) / TWO_PI
        else:
            # r == 0 numerically: |t|/r is astronomically large unless t == 0
            zero = tn == 0.0
            vals = np.empty(tn.shape)
            vals[zero] = (0.5 * np.log(un[zero] ** 2 + 1.0) - LOG_SQRT10) / TWO_PI
            nz = ~zero
            vals[nz] = (np.log(2.0 * np.abs(tn[nz])) + ell - LOG_SQRT10) / TWO_PI
            out[near] = vals
    return out


def vertical_image(r, x, y, extended=False, prec=113):
    """Im Y_r(x + iy): the only piece of Y_r the model needs."""
    if extended:
        return _vertical_image_mp(r, x, y, prec)
    _check(r, y)
    res = vertical_image_turn(r, np.asarray(r * np.asarray(x, dtype=float)), y)
    return float(res) if np.ndim(res) == 0 else res


def _vertical_image_mp(r, x, y, prec):
    with mp.workprec(prec):
        r, x, y = mp.mpf(r), mp.mpf(x), mp.mpf(y)
        if not (0 < r <= 0.5) or y < -1 - mp.mpf(10) ** -12:
            raise DomainViolation("argument outside the domain of Y_r")
        t = r * x
        t -= mp.nint(t)
        z = mp.pi * r * (3 + 2 * y) - 1j * mp.pi * (r + 2 * t)
        w = -mp.pi * r * (3 + 1j)
        return (-3 * mp.pi * r + mp.log(abs(mp.expm1(z))) - mp.log(abs(mp.expm1(w)))) / (2 * mp.pi)


def y_r(r, w, extended=False, prec=113):
    """Y_r(w) as a complex number (mpc in extended mode)."""
    if extended:
        with mp.workprec(prec):
            w = mp.mpc(w)
            im = _vertical_image_mp(r, w.real, w.imag, prec)
            return mp.mpc(mp.mpf(r) * w.real, im)
    w = complex(w)
    return complex(r * w.real, vertical_image(r, w.real, w.imag))


def level_map(alpha, eps, w, extended=False, prec=113):
    """Y_n for a level with parameter alpha and sign eps: Y_alpha, or -conj(Y_alpha) when eps = +1."""
    v = y_r(alpha, w, extended, prec)
    if eps == 1:
        return -v.conjugate()
    return v


def y_level(ctx, n, w, extended=False, prec=113):
    """Y_n(w) for level n of an AlphaContext (sign eps_n, parameter alpha_n)."""
    alpha = ctx.alpha(n)
    if alpha is None:
        raise DomainViolation(f"alpha_{n} is below any representable scale")
    a = mp.mpf(I.mid(alpha)) if extended else float(I.mid(alpha))
    return level_map(a, ctx.eps(n), w, extended, prec)


# ---------------------------------------------------------------------------
# rigorous enclosures on the imaginary axis
# ---------------------------------------------------------------------------

# above this log(1/r) the exact interval formula cancels catastrophically and the
# small-r bounds take over
AXIS_SMALL_ELL = 40


def _axis_exact(r, y):
    """Interval Im Y_r(iy) from |N|^2 and |D|^2 written in real functions."""
    e3 = iv.exp(-3 * iv.pi * r)
    c = iv.cos(iv.pi * r)
    g = iv.exp(2 * iv.pi * r * y)
    n2 = e3 * e3 - 2 * e3 * g * c + g * g
    d2 = e3 * e3 - 2 * e3 * c + 1
    return (iv.log(n2) - iv.log(d2)) / (4 * iv.pi)


def _axis_small_r(ell, y):
    """Interval Im Y_r(iy) for tiny r = e^{-ell}, y >= 0, from
    |expm1(z)| in |z| (1 +- |z| e^{|z|}/2) together with e^{Re z} - 1 <= |expm1(z)| <= e^{Re z} + 1."""
    u = 3 + 2 * y
    r_hi = mp.exp(-I.lo(ell))
    r_lo = mp.exp(-I.hi(ell))
    log_ratio_lo = mp.log((I.lo(u) ** 2 + 1) / 10) / 2
    log_ratio_hi = mp.log((I.hi(u) ** 2 + 1) / 10) / 2
    zmag_hi = mp.pi * r_hi * mp.sqrt(I.hi(u) ** 2 + 1)
    wmag_hi = mp.pi * r_hi * mp.sqrt(10)
    eta_w = wmag_hi * mp.exp(wmag_hi) / 2
    if zmag_hi < 0.5:
        eta_z = zmag_hi * mp.exp(zmag_hi) / 2
        num_lo = log_ratio_lo + mp.log(1 - eta_z)
        num_hi = log_ratio_hi + mp.log(1 + eta_z)
    else:
        # measure log|expm1(z)| - log|w| directly with the real-part bounds
        a_lo, a_hi = mp.pi * r_lo * I.lo(u), mp.pi * r_hi * I.hi(u)
        logw_lo = mp.log(mp.pi * r_lo * mp.sqrt(10))
        logw_hi = mp.log(wmag_hi)
        num_lo = mp.log(mp.expm1(a_lo)) - logw_hi
        num_hi = mp.log(mp.exp(a_hi) + 1) - logw_lo
    den_lo = mp.log(1 - eta_w)
    den_hi = mp.log(1 + eta_w)
    lo = (-3 * mp.pi * r_hi + num_lo - den_hi) / (2 * mp.pi)
    hi = (num_hi - den_lo) / (2 * mp.pi)
    return iv.mpf([lo, hi])


def axis_image(alpha, ell, y):
    """Rigorous interval for Im Y_alpha(iy) (equal for both signs), y an iv interval >= 0.

    Im Y_r(iy) is increasing in y, so the enclosure is built from the two endpoints.
    """
    with I.workprec(I.WORK_PREC):
        y_lo, y_hi = I.lo(y), I.hi(y)
        if y_lo < 0:
            raise DomainViolation("axis enclosures are only provided for y >= 0")
        if alpha is not None and I.hi(ell) <= AXIS_SMALL_ELL:
            lo = I.lo(_axis_exact(alpha, iv.mpf(y_lo)))
            hi = I.hi(_axis_exact(alpha, iv.mpf(y_hi))) if mp.isfinite(y_hi) else mp.inf
        else:
            lo = I.lo(_axis_small_r(ell, iv.mpf(y_lo)))
            hi = I.hi(_axis_small_r(ell, iv.mpf(y_hi))) if mp.isfinite(y_hi) else mp.inf
        return iv.mpf([lo, hi])
