"""Brjuno sums, Yoccoz's maps h_alpha / g_alpha, and the two forms of the Herman criterion.

All comparisons are interval comparisons: "v >= B" means lower(v) >= upper(B).
Verdicts are three-valued because finite digit prefixes cannot decide
membership in general; only symbolic sources (periodic, growth laws) add
certificates about the infinite tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from mpmath import iv, mp

from . import intervals as I
from .cfrac import AlphaContext, GrowthLaw, PeriodicDigits
from .errors import DepthExhausted, NonPositiveInput
from .ymap import axis_image, vertical_image_turn

DEFAULT_TERMS = 60


# ---------------------------------------------------------------------------
# Brjuno function
# ---------------------------------------------------------------------------

@dataclass
class BrjunoSum:
    base: int
    partial: object  # iv
    terms: list
    tail_bound: object = None  # iv enclosure of the omitted tail, if certified
    status: str = "Partial"  # Convergent | Partial | Divergent
    certificate: dict = field(default_factory=dict)

    @property
    def enclosure(self):
        """Interval containing B(alpha_base) (partial sum only when nothing else is known)."""
        if self.status == "Divergent":
            return iv.mpf([I.lo(self.partial), mp.inf])
        if self.tail_bound is not None:
            return self.partial + self.tail_bound
        return self.partial

    @property
    def lower(self):
        return I.lo(self.enclosure)

    @property
    def upper(self):
        return I.hi(self.enclosure)

    def terms_to_exceed(self, threshold) -> int | None:
        """Number of terms after which the partial sums certainly pass ``threshold``."""
        acc = iv.mpf(0)
        for k, t in enumerate(self.terms):
            acc = acc + t
            if I.lo(acc) > threshold:
                return k + 1
        lb = self.certificate.get("term_lower_bound")
        if self.status != "Divergent" or lb is None:
            return None
        missing = (mp.mpf(threshold) - I.lo(acc)) / lb
        return len(self.terms) + int(mp.floor(missing)) + 1

    def to_json(self) -> dict:
        from .serial import num
        return {
            "base": self.base,
            "partial": [num(I.lo(self.partial)), num(I.hi(self.partial))],
            "tail": None if self.tail_bound is None else [num(I.lo(self.tail_bound)), num(I.hi(self.tail_bound))],
            "verdict": self.status,
            "terms": len(self.terms),
            "certificate": {k: num(v) if not isinstance(v, (int, str)) else v for k, v in self.certificate.items()},
        }


def _weight(ctx: AlphaContext, start: int, stop: int):
    """prod_{i=start}^{stop-1} alpha_i as an interval (log form for astronomically small alphas)."""
    acc = iv.mpf(1)
    for i in range(start, stop):
        a = ctx.alphas[i]
        if a is None:
            return iv.exp(-sum((ctx.ells[j] for j in range(start, stop)), iv.mpf(0)))
        acc = acc * a
    return acc


def _periodic_closed_form(ctx: AlphaContext, n: int):
    """B(alpha_n) for a periodic stream, from S/(1 - weight) over one period."""
    src = ctx.stream.source
    L, p = len(src.prefix), src.period
    if n >= L:
        # alpha_n only depends on n modulo the period past the prefix
        n = L + (n - L) % p
    start = max(n, L)
    need = start + p
    if need > ctx.depth:
        raise DepthExhausted(f"closed form at level {n} needs depth {need}")
    S = iv.mpf(0)
    for k in range(p):
        S = S + _weight(ctx, start, start + k) * ctx.ells[start + k]
    B = S / (1 - _weight(ctx, start, start + p))
    # walk back through the non-periodic prefix
    for k in range(start - 1, n - 1, -1):
        B = ctx.ells[k] + ctx.alphas[k] * B
    return B


def brjuno(ctx: AlphaContext, n: int, terms: int | None = None) -> BrjunoSum:
    """Partial sum of B(alpha_n) = sum_k (alpha_n ... alpha_{n+k-1}) log(1/alpha_{n+k}).

    The number of terms defaults to what the context holds (at most DEFAULT_TERMS).
    """
    if n < 0:
        raise ValueError("base level must be >= 0")
    if terms is None:
        terms = min(DEFAULT_TERMS, ctx.depth - n)
    if terms < 1 or n + terms > ctx.depth:
        raise DepthExhausted(f"B(alpha_{n}) with {terms} terms needs depth {n + terms}, have {ctx.depth}")
    with I.workprec(ctx.prec):
        vals = []
        w = iv.mpf(1)
        for k in range(terms):
            lvl = n + k
            if k > 0:
                a = ctx.alphas[lvl - 1]
                w = w * a if a is not None else _weight(ctx, n, lvl)
            vals.append(w * ctx.ells[lvl])
        partial = sum(vals, iv.mpf(0))
        out = BrjunoSum(n, partial, vals)
        src = ctx.stream.source
        if isinstance(src, PeriodicDigits):
            last = n + terms
            try:
                tail_B = _periodic_closed_form(ctx, last)
                out.tail_bound = _weight(ctx, n, last) * tail_B
            except DepthExhausted:
                # context too shallow for the closed form: the sum stays partial
                out.tail_bound = None
            if out.tail_bound is not None:
                out.status = "Convergent"
                out.certificate = {"kind": "periodic"}
        elif isinstance(src, GrowthLaw):
            law = ctx.stream.law
            div = law.brjuno_divergence(n)
            if div is not None:
                out.status = "Divergent"
                out.certificate = {"kind": "divergent", **div}
            else:
                last = n + terms - 1
                tail = law.brjuno_tail(I.lo(ctx.ells[last]), I.hi(vals[-1]))
                if tail is not None:
                    out.tail_bound = iv.mpf([0, tail])
                    out.status = "Convergent"
                    out.certificate = {"kind": "tail-ratio", "rule": law.id}
        return out


# ---------------------------------------------------------------------------
# Yoccoz maps
# ---------------------------------------------------------------------------

def _as_iv(x):
    return x if isinstance(x, iv.mpf) else iv.mpf(x)


def _h_point(ell, y):
    """h for point-valued ell = log(1/alpha) and y (iv point arithmetic, outward rounded)."""
    if I.lo(y) >= I.hi(ell):
        return iv.exp(ell) * (y - ell + 1)
    if I.hi(y) < I.lo(ell):
        return iv.exp(y)
    return I.hull(iv.exp(ell) * (y - ell + 1), iv.exp(y))


def yoccoz_h(alpha, y, ell=None):
    """h_alpha(y) = (y - log(1/alpha) + 1)/alpha for y >= log(1/alpha), e^y below.

    ``alpha`` and ``y`` may be floats or intervals; ``ell`` = log(1/alpha) may be
    passed instead of alpha for astronomically small alpha.  h is increasing in
    y and in log(1/alpha), which gives the enclosure from endpoint evaluations.
    """
    with I.workprec(I.WORK_PREC):
        if ell is None:
            alpha = _as_iv(alpha)
            ell = iv.log(1 / alpha)
        ell = _as_iv(ell)
        y = _as_iv(y)
        lo = I.lo(_h_point(iv.mpf(I.lo(ell)), iv.mpf(I.lo(y))))
        hi = I.hi(_h_point(iv.mpf(I.hi(ell)), iv.mpf(I.hi(y))))
        return iv.mpf([lo, hi])


def _g_point(alpha, y):
    ell = iv.log(1 / alpha)
    if I.lo(y) >= I.hi(1 / alpha):
        return alpha * y + ell - 1
    if I.hi(y) < I.lo(1 / alpha):
        return iv.log(y)
    return I.hull(alpha * y + ell - 1, iv.log(y))


def yoccoz_g(alpha, y):
    """g_alpha, the inverse of h_alpha: alpha y + log(1/alpha) - 1 for y >= 1/alpha, log y below."""
    with I.workprec(I.WORK_PREC):
        alpha = _as_iv(alpha)
        y = _as_iv(y)
        if I.lo(y) <= 0:
            raise NonPositiveInput(f"g_alpha needs y > 0, got {mp.nstr(I.lo(y), 8)}")
        # increasing in y, and in alpha on the linear branch
        lo = I.lo(_g_point(iv.mpf(I.lo(alpha)), iv.mpf(I.lo(y))))
        hi = I.hi(_g_point(iv.mpf(I.hi(alpha)), iv.mpf(I.hi(y))))
        return iv.mpf([lo, hi])


# ---------------------------------------------------------------------------
# Herman criterion
# ---------------------------------------------------------------------------

@dataclass
class HermanVerdict:
    kind: str  # SatisfiedAt | FailedUpTo | UnresolvedUpTo
    m: int
    values: list = field(default_factory=list)  # (level, value_lo, value_hi, B_lo, B_hi)
    certificate: str | None = None

    def __str__(self):
        return f"{self.kind}({self.m})"

    def to_json(self) -> dict:
        from .serial import num
        return {
            "kind": self.kind,
            "witness_m": self.m,
            "values": [[lvl] + [num(v) for v in rest] for lvl, *rest in self.values],
            "certificate": self.certificate,
        }


def _brjuno_at(ctx, m, budget):
    terms = min(budget, ctx.depth - m)
    if terms < 1:
        return None
    return brjuno(ctx, m, terms)


def herman_check_h(ctx: AlphaContext, n: int = 0, M: int = 30, terms: int = DEFAULT_TERMS) -> HermanVerdict:
    """Iterate v_n = 0, v_{k+1} = h_{alpha_k}(v_k) and compare v_m with B(alpha_m) for n <= m <= n + M."""
    src = ctx.stream.source
    law = ctx.stream.law if isinstance(src, GrowthLaw) else None
    v = iv.mpf(0)
    values = []
    failing = True
    last = n + M
    for m in range(n, last + 1):
        if m >= ctx.depth:
            # past the representable levels only a symbolic certificate can speak
            if law is not None and failing and law.brjuno_divergence(m) is not None:
                return HermanVerdict("FailedUpTo", M, values, "brjuno-divergent")
            return HermanVerdict("UnresolvedUpTo", M, values, "depth")
        B = _brjuno_at(ctx, m, terms)
        B_lo, B_hi = B.lower, B.upper
        values.append((m, I.lo(v), I.hi(v), B_lo, B_hi))
        if I.lo(v) >= B_hi:
            return HermanVerdict("SatisfiedAt", m, values)
        if B.status != "Divergent" and not I.hi(v) < B_lo:
            failing = False
        if (law is not None and failing and law.monotone_worsening
                and law.herman_failure(I.hi(v), I.lo(ctx.ells[m]))):
            return HermanVerdict("FailedUpTo", M, values, f"{law.id}-invariant@{m}")
        if m < last:
            a = ctx.alphas[m]
            v = yoccoz_h(a, v) if a is not None else yoccoz_h(None, v, ell=ctx.ells[m])
    return HermanVerdict("FailedUpTo" if failing else "UnresolvedUpTo", M, values)


def _axis_compose(ctx, top, seed):
    """Im Y_0 o ... o Y_top(i * seed) for an interval seed >= 0."""
    w = seed
    for i in range(top, -1, -1):
        w = axis_image(ctx.alphas[i], ctx.ells[i], w)
        if I.lo(w) < 0:
            # the axis enclosures are built for y >= 0; Im stays >= 0 on i[0, inf)
            w = iv.mpf([0, max(I.hi(w), 0)])
    return w


def herman_check_y(ctx: AlphaContext, x: float, M: int = 30, terms: int = DEFAULT_TERMS) -> HermanVerdict:
    """Compare Im Y_0 o ... o Y_m(i B(alpha_{m+1})/2pi) with x for m = 0..M."""
    if x <= 0:
        raise ValueError("threshold must be positive")
    src = ctx.stream.source
    law = ctx.stream.law if isinstance(src, GrowthLaw) else None
    values = []
    failing = True
    with I.workprec(I.WORK_PREC):
        two_pi = 2 * iv.pi
        for m in range(M + 1):
            B = _brjuno_at(ctx, m + 1, terms) if m + 1 < ctx.depth else None
            if B is not None and B.status == "Divergent":
                # the seed is +infinity: never <= x at this m
                values.append((m, mp.inf, mp.inf, B.lower, mp.inf))
                continue
            if B is not None:
                W = _axis_compose(ctx, m, B.enclosure / two_pi)
            elif law is not None and law.brjuno_divergence(m + 1) is not None:
                values.append((m, mp.inf, mp.inf, mp.inf, mp.inf))
                continue
            else:
                j = min(m, ctx.depth - 1)
                bound = law.y_composite_lower(I.lo(ctx.ells[j])) if law is not None else None
                if bound is None:
                    return HermanVerdict("UnresolvedUpTo", M, values, "depth")
                W = _axis_compose(ctx, j - 1, iv.mpf([max(bound, 0), mp.inf])) if j > 0 else iv.mpf([bound, mp.inf])
            values.append((m, I.lo(W), I.hi(W), mp.nan, mp.nan))
            if I.hi(W) <= x:
                return HermanVerdict("SatisfiedAt", m, values)
            if not I.lo(W) > x:
                failing = False
    return HermanVerdict("FailedUpTo" if failing else "UnresolvedUpTo", M, values)


def _g_ext(alpha, y):
    # g_alpha extended by g(max(y, 1)) so the composite never leaves (0, inf)
    y = max(y, 1.0)
    if y >= 1.0 / alpha:
        return alpha * y - math.log(alpha) - 1.0
    return math.log(y)


def y_vs_g_discrepancy(ctx: AlphaContext, n: int, m: int, y: float) -> float:
    """|2pi Im Y_n o ... o Y_m(iy/2pi) - g_n o ... o g_m(y)| with g extended below 1."""
    if not m > n >= 0:
        raise ValueError("need m > n >= 0")
    if y < 1:
        raise ValueError("y must be >= 1")
    if m >= ctx.depth:
        raise DepthExhausted(f"level {m} outside context depth {ctx.depth}")
    levels = ctx.float_levels(m + 1)
    w = y / (2 * math.pi)
    g = float(y)
    for k in range(m, n - 1, -1):
        alpha, ell, _, _ = levels[k]
        w = float(vertical_image_turn(alpha, 0.0, w, ell=ell))
        g = _g_ext(alpha, g)
    return abs(2 * math.pi * w - g)
