"""The nest M_n^j through its lower boundary functions h_n^j, limits h_n and upper functions h_n^*.

Y maps vertical lines to vertical lines, so a region {Im w >= h(Re w)} is
carried to another region of the same form and only the boundary function
has to be tracked.  Going from level n to level n+1 a point x in [0, 1/alpha_n]
sits in a block l and corresponds to

    eps_{n+1} = -1:  t = x - l,  l = 0 .. a_n - 1 (the last block is the K-range)
    eps_{n+1} = +1:  t = l - x,  l = 1 .. a_n + 1 (the last block is the J-range)

with x' = t / alpha_{n+1} the position one level deeper, and
h_n^j(x) = Im Y_{alpha_{n+1}}(x' + i h_{n+1}^{j-1}(x')).  Level -1 uses t = x
(eps_0 = -1) or t = 1 - x (eps_0 = +1, translated onto [0, 1]).

Two evaluators are provided: grid refinement with interpolation
(profile_base / profile_refine) and exact per-sample chains (profile_limit),
which follow each sample down the levels without resampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import intervals as I
from .arith import brjuno
from .cfrac import AlphaContext, GrowthLaw
from .errors import (
    DepthExhausted,
    DivergentBrjuno,
    LevelMismatch,
    ResolutionTooCoarse,
)
from .ymap import vertical_image_turn

DEFAULT_CAP = 50.0
C12_WORKING = 2.0
CONTRACTION = 0.9
# positions x = t / alpha lose all fractional information once 1/alpha passes 2**40
POSITION_LIMIT_ELL = 40 * math.log(2.0)
# float error of one vertical_image evaluation, generously rounded up
STEP_ERR = 1e-12


@dataclass
class BoundaryProfile:
    level: int
    depth: int
    grid_x: np.ndarray
    values: np.ndarray
    cap: float
    err: float
    resolution: int
    flags: np.ndarray = None
    stream_hash: str = ""
    alpha_inv: tuple = (1.0, 1.0)

    def __post_init__(self):
        if self.flags is None:
            self.flags = np.zeros(len(self.grid_x), dtype=bool)

    @property
    def length(self) -> float:
        return float(self.grid_x[-1])

    @property
    def capped_fraction(self) -> float:
        return float(np.mean(self.flags))

    def interp(self, x):
        """Piecewise-linear values at x; a cell touching a flagged sample returns the
        unflagged neighbour's value and reports the cell as uncertain."""
        x = np.clip(np.asarray(x, dtype=float), 0.0, self.length)
        h = self.length / (len(self.grid_x) - 1)
        pos = x / h
        i = np.clip(np.floor(pos).astype(np.int64), 0, len(self.grid_x) - 2)
        f = pos - i
        v0, v1 = self.values[i], self.values[i + 1]
        g0, g1 = self.flags[i], self.flags[i + 1]
        out = v0 + f * (v1 - v0)
        out = np.where(g0 & ~g1, v1, out)
        out = np.where(g1 & ~g0, v0, out)
        both = g0 & g1
        out = np.where(both, np.maximum(v0, v1), out)
        return out, both

    def to_json(self) -> dict:
        from .serial import num
        return {
            "level": self.level,
            "depth": self.depth,
            "alpha_inv": [num(self.alpha_inv[0]), num(self.alpha_inv[1])],
            "resolution": self.resolution,
            "cap": num(self.cap),
            "err": num(self.err),
            "values": [num(v) for v in self.values],
            "flags": [int(f) for f in self.flags],
            "stream_hash": self.stream_hash,
        }


@dataclass
class EnvelopePair:
    lower: BoundaryProfile
    upper: BoundaryProfile
    gap_bound: float
    J: int
    seed_level: int
    upper_seed: float
    potentially_divergent: bool = False
    notes: list = field(default_factory=list)

    @property
    def effective_depth(self) -> int:
        return self.seed_level - self.lower.level

    @property
    def gap(self) -> np.ndarray:
        return self.upper.values - self.lower.values

    def to_json(self) -> dict:
        from .serial import num
        return {
            "lower": self.lower.to_json(),
            "upper": self.upper.to_json(),
            "gap_bound": num(self.gap_bound),
            "J": self.J,
            "seed_level": self.seed_level,
            "upper_seed": num(self.upper_seed),
            "potentially_divergent": self.potentially_divergent,
            "sup_gap": num(float(np.max(self.gap))),
            "capped_fraction": num(self.lower.capped_fraction),
            "notes": list(self.notes),
        }


# ---------------------------------------------------------------------------
# level data and block arithmetic
# ---------------------------------------------------------------------------

def _level(ctx: AlphaContext, k: int):
    """(alpha, ell, a_k, eps_{k+1}) as floats; alpha is 0.0 where it underflows."""
    if not 0 <= k < ctx.depth:
        raise DepthExhausted(f"level {k} outside context depth {ctx.depth}")
    return ctx.float_levels(k + 1)[k]


def level_length(ctx: AlphaContext, n: int) -> float:
    if n == -1:
        return 1.0
    alpha, ell, _, _ = _level(ctx, n)
    if ell > POSITION_LIMIT_ELL:
        raise ResolutionTooCoarse(f"level {n} has 1/alpha beyond float position range")
    return float(1.0 / I.mid(ctx.alphas[n]))


def _alpha_inv(ctx, n):
    if n == -1:
        return (1.0, 1.0)
    a = ctx.alphas[n]
    return I.as_float_pair(1 / a) if a is not None else (math.inf, math.inf)


def grid(length: float, resolution: int) -> np.ndarray:
    count = max(1, int(math.ceil(length * resolution - 1e-9)))
    return np.linspace(0.0, length, count + 1)


def block_turn(ctx: AlphaContext, m: int, x):
    """Offset t in [0, 1] of position(s) x at level m inside their block, so that the
    level m+1 position is t / alpha_{m+1}."""
    x = np.asarray(x, dtype=float)
    if m == -1:
        return x if ctx.eps(0) == -1 else 1.0 - x
    _, _, a, eps = _level(ctx, m)
    fl = np.floor(x)
    if eps == -1:
        l = np.clip(fl, 0, a - 1)
        return np.clip(x - l, 0.0, 1.0)
    l = np.minimum(fl + 1, a + 1)
    return np.clip(l - x, 0.0, 1.0)


def _image(ctx, k, t, y):
    """Im Y_{alpha_k} at turn t and height y (y is clipped below at -1)."""
    alpha, ell, _, _ = _level(ctx, k)
    return vertical_image_turn(alpha, t, np.maximum(y, -1.0), ell=ell)


# ---------------------------------------------------------------------------
# grid recursion
# ---------------------------------------------------------------------------

def profile_base(ctx: AlphaContext, n: int, resolution: int, cap: float = DEFAULT_CAP) -> BoundaryProfile:
    """h_n^0 = -1 on [0, 1/alpha_n]."""
    if n >= ctx.depth:
        raise DepthExhausted(f"level {n} outside context depth {ctx.depth}")
    xs = grid(level_length(ctx, n), resolution)
    return BoundaryProfile(n, 0, xs, np.full(len(xs), -1.0), cap, 0.0, resolution,
                           stream_hash=ctx.stream.stream_hash, alpha_inv=_alpha_inv(ctx, n))


def profile_refine(ctx: AlphaContext, n: int, child: BoundaryProfile,
                   resolution: int | None = None) -> BoundaryProfile:
    """One pullback step: h_n^{j+1} from h_{n+1}^j sampled on a grid."""
    if child.level != n + 1:
        raise LevelMismatch(f"child at level {child.level}, expected {n + 1}")
    resolution = resolution or child.resolution
    xs = grid(level_length(ctx, n), resolution)
    t = block_turn(ctx, n, xs)
    alpha = ctx.float_levels(n + 2)[n + 1][0]
    src = t / alpha
    if np.max(src) > child.length * (1 + 1e-9) + 1e-9:
        raise ResolutionTooCoarse("child grid does not cover the pulled-back positions")
    cv, uncertain = child.interp(src)
    vals = _image(ctx, n + 1, t, np.minimum(cv, child.cap))
    flags = vals >= child.cap
    cell = child.length / (len(child.grid_x) - 1)
    ok = ~child.flags[:-1] & ~child.flags[1:]
    jump = float(np.max(np.abs(np.diff(child.values))[ok])) if np.any(ok) else 0.0
    # within a cell the true child value is bracketed by the neighbours up to
    # the largest adjacent jump (continuity modulus on this grid)
    err = CONTRACTION * (child.err + jump) + STEP_ERR if cell > 0 else child.err
    flags |= uncertain & (vals >= child.cap * CONTRACTION)
    return BoundaryProfile(n, child.depth + 1, xs, np.minimum(vals, child.cap), child.cap, err,
                           resolution, flags, ctx.stream.stream_hash, _alpha_inv(ctx, n))


def profile_depth(ctx: AlphaContext, n: int, j: int, resolution: int,
                  cap: float = DEFAULT_CAP) -> BoundaryProfile:
    """h_n^j on the grid: base at level n+j, then j refinement steps."""
    prof = profile_base(ctx, n + j, resolution, cap)
    for k in range(n + j - 1, n - 1, -1):
        prof = profile_refine(ctx, k, prof, resolution)
    return prof


# ---------------------------------------------------------------------------
# per-sample chains
# ---------------------------------------------------------------------------

def _seed_level(ctx: AlphaContext, n: int, J: int) -> int:
    """Deepest level that chains from level n can reach, at most n + J."""
    L = n + J
    limit = ctx.depth - 1
    for k in range(n + 1, min(L, limit) + 1):
        if _level(ctx, k)[1] > POSITION_LIMIT_ELL and k < L:
            # positions at level k are meaningless; k still provides alpha_k for the
            # last value step, so it becomes the seed level
            return k
    return min(L, limit)


def chain_turns(ctx: AlphaContext, n: int, L: int, xs) -> list:
    """Block offsets t_m for m = n .. L-1 following each x from level n down to level L."""
    turns = []
    x = np.asarray(xs, dtype=float)
    for m in range(n, L):
        t = block_turn(ctx, m, x)
        turns.append(t)
        if m + 1 < L:
            alpha = _level(ctx, m + 1)[0]
            x = t / alpha
    return turns


def brjuno_bound(ctx: AlphaContext, k: int, c12: float = C12_WORKING) -> float:
    """U_k = B(alpha_{k+1})/2pi (upper enclosure) + c12, the working bound for max h_k^*.

    +inf when B(alpha_{k+1}) is divergent or out of reach of the context.
    """
    if k + 1 >= ctx.depth:
        return math.inf
    B = brjuno(ctx, k + 1)
    if B.status == "Divergent":
        return math.inf
    # without a tail certificate this is the partial sum only (uncertified)
    up = float(B.upper)
    return up / (2 * math.pi) + c12


def _divergent(ctx: AlphaContext) -> bool:
    src = ctx.stream.source
    return isinstance(src, GrowthLaw) and ctx.stream.law.brjuno_divergence(0) is not None


def chain_values(ctx, n, L, turns, seed, cap, bounds, divergent):
    """Evaluate values and escape flags back up a chain from the seed level L to level n."""
    v = np.full(turns[0].shape if turns else np.shape(seed), seed, dtype=float)
    flags = v >= cap
    v = np.minimum(v, cap)
    for m in range(L - 1, n - 1, -1):
        raw = _image(ctx, m + 1, turns[m - n], v)
        new_flag = raw >= cap
        # a flag persists if escape is certain for the stream, or the pulled-back value
        # still beats the finite Brjuno bound of this level
        keep = flags & (divergent | (raw >= bounds.get(m, math.inf)))
        flags = new_flag | keep
        v = np.minimum(raw, cap)
    return v, flags


def profile_limit(ctx: AlphaContext, n: int, J: int, resolution: int,
                  cap: float = DEFAULT_CAP, c12: float = C12_WORKING) -> EnvelopePair:
    """Envelopes for h_n (lower) and h_n^* (upper) from J-level chains.

    lower: chains seeded with -1 at the seed level; upper: seeded with U at the
    seed level (capped at ``cap``, which marks the pair potentially divergent).
    """
    if J < 1:
        raise ValueError("J must be >= 1")
    need = n + J + 1
    if ctx.depth < need:
        src = ctx.stream.source
        at_limit = isinstance(src, GrowthLaw) and ctx.depth >= ctx.stream.law.max_depth
        if not at_limit:
            raise DepthExhausted(f"profile_limit at level {n}, J={J} needs depth {need}, have {ctx.depth}")
    L = _seed_level(ctx, n, J)
    notes = []
    if L < n + J:
        notes.append(f"chains stop at level {L} (representable depth / position range)")
    xs = grid(level_length(ctx, n), resolution)
    turns = chain_turns(ctx, n, L, xs)
    divergent = _divergent(ctx)
    bounds = {m: brjuno_bound(ctx, m, c12) for m in range(n, L)} if not divergent else {}
    U = brjuno_bound(ctx, L, c12)
    pot_div = False
    if U > cap:
        U = cap
        pot_div = True
        notes.append("upper seed exceeds cap; set to cap")
    lo_v, lo_f = chain_values(ctx, n, L, turns, -1.0, cap, bounds, divergent)
    up_v, up_f = chain_values(ctx, n, L, turns, U, cap, bounds, divergent)
    up_v = np.maximum(up_v, lo_v)
    err = STEP_ERR * (L - n)
    common = dict(cap=cap, err=err, resolution=resolution,
                  stream_hash=ctx.stream.stream_hash, alpha_inv=_alpha_inv(ctx, n))
    lower = BoundaryProfile(n, L - n, xs, lo_v, flags=lo_f, **common)
    upper = BoundaryProfile(n, L - n, xs, up_v, flags=up_f | lo_f, **common)
    gap_bound = CONTRACTION ** (L - n) * (U + 1)
    return EnvelopePair(lower, upper, gap_bound, J, L, U, pot_div, notes)


def evaluate_points(ctx: AlphaContext, n: int, J: int, xs, cap: float = DEFAULT_CAP,
                    c12: float = C12_WORKING):
    """(lower, upper) chain values of h_n at arbitrary positions xs."""
    L = _seed_level(ctx, n, J)
    turns = chain_turns(ctx, n, L, xs)
    divergent = _divergent(ctx)
    bounds = {m: brjuno_bound(ctx, m, c12) for m in range(n, L)} if not divergent else {}
    U = min(brjuno_bound(ctx, L, c12), cap)
    lo, _ = chain_values(ctx, n, L, turns, -1.0, cap, bounds, divergent)
    up, _ = chain_values(ctx, n, L, turns, U, cap, bounds, divergent)
    return lo, np.maximum(up, lo)


# ---------------------------------------------------------------------------
# endpoints and max-vs-Brjuno
# ---------------------------------------------------------------------------

@dataclass
class Endpoint:
    index: int
    x: float
    lower: float
    upper: float


def endpoints(ctx: AlphaContext, n: int, count: int, pair: EnvelopePair) -> list[Endpoint]:
    """Orbit points x_m = {m alpha_n} (level -1: {-m alpha}) with chain brackets of h_n there."""
    if n == -1:
        # level -1 positions of deep block boundaries are {m alpha_0} (eps_0 = -1) or
        # {-m alpha_0} (eps_0 = +1), i.e. {-m alpha} in both cases
        rot = float(I.mid(-ctx.eps(0) * ctx.alphas[0]))
    else:
        rot = float(I.mid(ctx.alphas[n]))
    m = np.arange(count, dtype=np.int64)
    xs = np.mod(m * rot, 1.0)
    lo, up = evaluate_points(ctx, n, pair.J, xs, pair.lower.cap)
    err = pair.lower.err
    return [Endpoint(int(i), float(x), float(l) - err, float(u) + err) for i, x, l, u in zip(m, xs, lo, up)]


def max_vs_brjuno(ctx: AlphaContext, n: int, pair: EnvelopePair) -> float:
    """|max h_n (lower envelope) - B(alpha_{n+1})/2pi|."""
    if n + 1 >= ctx.depth:
        raise DepthExhausted(f"B(alpha_{n + 1}) outside context depth {ctx.depth}")
    B = brjuno(ctx, n + 1)
    if B.status == "Divergent":
        raise DivergentBrjuno(f"B(alpha_{n + 1}) is certified infinite")
    mid = float(I.mid(B.enclosure))
    return abs(float(np.max(pair.lower.values)) - mid / (2 * math.pi))
