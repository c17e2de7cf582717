"""Modified continued fractions: digit streams, interval enclosures of alpha_n and beta_n.

A rotation number is written as ``alpha = a_{-1} + eps_0 * alpha_0`` with
``alpha_0 = d(alpha, Z)`` and, for n >= 0, ``1/alpha_n = a_n + eps_{n+1} * alpha_{n+1}``.
The stream is the canonical object; real numbers are only a convenience entry
point whose digits are certified by forward interval evaluation.
"""

from __future__ import annotations

import ast
import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Union

from mpmath import iv, mp

from . import intervals as I
from .errors import (
    ConfigError,
    DigitsExhausted,
    HalfIntegerAmbiguity,
    PrecisionExhausted,
    RationalInput,
)

Pair = tuple[int, int]

# 1/alpha_n enclosures that contain a lattice point while narrower than
# 2**(-prec * RATIONAL_FRACTION) are reported as rational/half-integer inputs
# rather than as a precision shortfall.
RATIONAL_FRACTION = 0.5


@dataclass(frozen=True)
class LogDigit:
    """A digit too large to hold exactly; only an enclosure of log(a_n) is kept."""

    log: object  # iv.mpf

    def __ge__(self, other):
        return I.lo(self.log) >= mp.log(other)

    def __lt__(self, other):
        return not self >= other

    def __repr__(self):
        return f"LogDigit(log~{mp.nstr(I.mid(self.log), 8)})"


Digit = Union[int, LogDigit]


@dataclass(frozen=True)
class PeriodicDigits:
    body: tuple[Pair, ...]
    prefix: tuple[Pair, ...] = ()

    @property
    def period(self) -> int:
        return len(self.body)

    def __post_init__(self):
        if not self.body:
            raise ValueError("periodic body must be non-empty")
        for a, e in self.prefix + self.body:
            _check_pair(a, e)


@dataclass(frozen=True)
class GrowthLaw:
    rule: str
    params: tuple[tuple[str, int], ...] = ()

    def param_dict(self) -> dict:
        return dict(self.params)


@dataclass(frozen=True)
class RealNumber:
    value: str
    prec: int


Source = Union[PeriodicDigits, GrowthLaw, RealNumber]


def _check_pair(a, e):
    if e not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {e}")
    if a < 2:
        raise ValueError(f"digit must be >= 2, got {a}")
    if a == 2 and e == -1:
        # 1/alpha_n in (1.5, 2) would force alpha_n > 1/2
        raise ValueError("digit pair (2, -1) is not a valid modified continued fraction step")


@dataclass(frozen=True)
class DigitStream:
    head: Pair
    source: Source
    real_digits: tuple[Pair, ...] = field(default=(), repr=False)

    # ---- digit access -------------------------------------------------
    def digit(self, n: int) -> tuple[Digit, int]:
        """Return ``(a_n, eps_{n+1})``."""
        if n < 0:
            raise IndexError(n)
        src = self.source
        if isinstance(src, PeriodicDigits):
            if n < len(src.prefix):
                return src.prefix[n]
            return src.body[(n - len(src.prefix)) % src.period]
        if isinstance(src, RealNumber):
            if n >= len(self.real_digits):
                raise DigitsExhausted(
                    f"digit {n} requested beyond certified depth {len(self.real_digits)}")
            return self.real_digits[n]
        return self.law.digit(n)

    def eps(self, n: int) -> int:
        """The sign eps_n (eps_0 lives in the head)."""
        if n == 0:
            return self.head[1]
        return self.digit(n - 1)[1]

    def prefix(self, k: int) -> list[tuple[Digit, int]]:
        return [self.digit(n) for n in range(k)]

    @property
    def certified_depth(self) -> int | None:
        """Digits with index below this are exact; None means unbounded."""
        if isinstance(self.source, RealNumber):
            return len(self.real_digits)
        if isinstance(self.source, GrowthLaw):
            return self.law.max_depth
        return None

    @property
    def law(self):
        from .laws import get_rule
        if not isinstance(self.source, GrowthLaw):
            raise TypeError("stream is not growth-law sourced")
        return get_rule(self.source.rule, **self.source.param_dict())

    @property
    def kind(self) -> str:
        return {PeriodicDigits: "periodic", GrowthLaw: "growth", RealNumber: "real"}[type(self.source)]

    # ---- serialization ------------------------------------------------
    def to_json(self) -> dict:
        src = self.source
        doc = {"kind": self.kind, "head": list(self.head)}
        if isinstance(src, PeriodicDigits):
            doc["body"] = [list(p) for p in src.body]
            if src.prefix:
                doc["prefix"] = [list(p) for p in src.prefix]
        elif isinstance(src, GrowthLaw):
            doc["rule"] = src.rule
            doc["params"] = {k: v for k, v in src.params}
        else:
            doc["value"] = src.value
            doc["prec"] = src.prec
            doc["digits"] = [list(p) for p in self.real_digits]
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "DigitStream":
        kind = doc["kind"]
        head = tuple(doc["head"])
        if kind == "periodic":
            return periodic(head, [tuple(p) for p in doc["body"]],
                            [tuple(p) for p in doc.get("prefix", [])])
        if kind == "growth":
            return growth(doc["rule"], **doc.get("params", {}))
        if kind == "real":
            return cls(head, RealNumber(doc["value"], int(doc["prec"])),
                       tuple(tuple(p) for p in doc["digits"]))
        raise ValueError(f"unknown stream kind {kind!r}")

    @property
    def stream_hash(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def periodic(head: Pair, body, prefix=()) -> DigitStream:
    head = (int(head[0]), int(head[1]))
    if head[1] not in (1, -1):
        raise ValueError("head sign must be +1 or -1")
    src = PeriodicDigits(tuple((int(a), int(e)) for a, e in body),
                         tuple((int(a), int(e)) for a, e in prefix))
    return DigitStream(head, src)


def growth(rule: str, **params) -> DigitStream:
    from .laws import get_rule
    law = get_rule(rule, **params)
    src = GrowthLaw(rule, tuple(sorted((k, int(v)) for k, v in law.params.items())))
    return DigitStream(law.head, src)


# ---------------------------------------------------------------------------
# expand: real number -> certified digits
# ---------------------------------------------------------------------------

def _to_interval(x):
    if isinstance(x, Fraction):
        return iv.mpf(x.numerator) / x.denominator
    if isinstance(x, str) and "/" in x:
        p, q = x.split("/")
        return iv.mpf(int(p)) / int(q)
    if isinstance(x, iv.mpf):
        return x
    return iv.mpf(x)


def _nearest(X, level, prec, last):
    """Nearest integer to every point of X, or the appropriate error."""
    n_lo = int(mp.floor(I.lo(X) + mp.mpf(0.5)))
    n_hi = int(mp.floor(I.hi(X) + mp.mpf(0.5)))
    if n_lo != n_hi:
        if I.width(X) < mp.ldexp(1, -int(prec * RATIONAL_FRACTION)):
            raise HalfIntegerAmbiguity(level)
        raise PrecisionExhausted(last)
    return n_lo


def expand(x, depth: int, prec: int = 256, strict: bool = True) -> DigitStream:
    """Certified modified continued-fraction digits of ``x``.

    ``x`` is taken at ``prec`` bits: decimal strings become an outward-rounded
    ball, fractions (``Fraction`` or ``"p/q"``) stay exact.  With ``strict=False``
    any failure after the first certified digit truncates the stream instead of
    raising.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    with I.workprec(prec):
        X = _to_interval(x)
        tiny = mp.ldexp(1, -int(prec * RATIONAL_FRACTION))
        a_m1 = _nearest(X, -1, prec, -1)
        D = X - a_m1
        if I.contains_zero(D):
            if I.width(D) < tiny:
                raise RationalInput(0)
            raise PrecisionExhausted(-1)
        eps0 = 1 if I.lo(D) > 0 else -1
        A = D if eps0 == 1 else -D
        digits: list[Pair] = []
        try:
            for n in range(depth):
                inv = 1 / A
                a = _nearest(inv, n, prec, n - 1)
                D = inv - a
                if I.contains_zero(D):
                    if I.width(D) < tiny:
                        raise RationalInput(n + 1)
                    raise PrecisionExhausted(n - 1)
                e = 1 if I.lo(D) > 0 else -1
                digits.append((a, e))
                A = D if e == 1 else -D
        except (PrecisionExhausted, RationalInput, HalfIntegerAmbiguity):
            # the input ball stops determining digits here; keep the certified prefix
            if strict or not digits:
                raise
        value = x if isinstance(x, str) else mp.nstr(I.mid(X), int(prec * 0.30103) + 2)
        return DigitStream((a_m1, eps0), RealNumber(str(value), prec), tuple(digits))


# ---------------------------------------------------------------------------
# backward enclosure of alpha_n
# ---------------------------------------------------------------------------

# alpha_n is materialised as an mpf interval only while log(1/alpha_n) stays
# below this; deeper levels carry log(1/alpha_n) alone.
ELL_MATERIALIZE = mp.mpf(10) ** 6


@dataclass(frozen=True)
class AlphaContext:
    stream: DigitStream
    depth: int
    guard: int
    alphas: tuple  # iv.mpf or None (when alpha_n is astronomically small)
    ells: tuple  # iv enclosures of log(1/alpha_n)
    log_betas: tuple  # iv enclosures of log(beta_n) = -sum_{i<=n} ell_i
    betas: tuple  # iv.mpf or None
    prec: int = I.WORK_PREC

    def alpha(self, n: int):
        self._check(n)
        return self.alphas[n]

    def ell(self, n: int):
        self._check(n)
        return self.ells[n]

    def beta(self, n: int):
        if n == -1:
            return iv.mpf(1)
        self._check(n)
        return self.betas[n]

    def eps(self, n: int) -> int:
        return self.stream.eps(n)

    def digit(self, n: int):
        return self.stream.digit(n)[0]

    def _check(self, n):
        from .errors import DepthExhausted
        if not 0 <= n < self.depth:
            raise DepthExhausted(f"level {n} outside context depth {self.depth}")

    def float_levels(self, count: int | None = None):
        """Per-level float data ``(alpha, ell, a, eps_{n+1})`` for grid code.

        alpha underflows to 0.0 and ell overflows to inf for extreme levels;
        callers must use ell in that regime.
        """
        count = self.depth if count is None else min(count, self.depth)
        return self._float_table[:count]

    @cached_property
    def _float_table(self):
        out = []
        for n in range(self.depth):
            a, e = self.stream.digit(n)
            ell = float(I.mid(self.ells[n])) if I.mid(self.ells[n]) < 1e300 else float("inf")
            if self.alphas[n] is not None:
                alpha = float(I.mid(self.alphas[n]))
            else:
                alpha = 0.0
            a_f = float(a) if isinstance(a, int) and a < 2 ** 1000 else float("inf")
            out.append((alpha, ell, a_f, e))
        return out

    @property
    def alpha_value(self):
        """Enclosure of alpha = a_{-1} + eps_0 * alpha_0."""
        a_m1, e0 = self.stream.head
        return a_m1 + e0 * self.alphas[0]


def available_depth(stream: DigitStream) -> int | None:
    return stream.certified_depth


def enclose_alphas(stream: DigitStream, depth: int, guard: int = 20,
                   prec: int = I.WORK_PREC) -> AlphaContext:
    """Backward interval recurrence alpha_n = 1/(a_n + eps_{n+1} alpha_{n+1}).

    The recursion is seeded with alpha_{depth+guard} in [0, 1/2] and run down to
    level 0; it contracts, so the enclosure tightens as ``guard`` grows.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    total = depth + guard
    avail = stream.certified_depth
    if avail is not None and total > avail:
        raise DigitsExhausted(f"need {total} digits, stream certifies {avail}")
    with I.workprec(prec):
        digits = [stream.digit(n) for n in range(total)]
        nxt = iv.mpf([0, 0.5])  # alpha_{total}
        alphas = [None] * total
        ells = [None] * total
        for n in range(total - 1, -1, -1):
            a, e = digits[n]
            if isinstance(a, LogDigit):
                # log(a + e*alpha') = log a + log1p(e*alpha'/a), |log1p(u)| <= 2|u| for |u| <= 1/2
                E = int(mp.floor(I.lo(a.log) / mp.log(2)))
                slack = I.pow2(-E)
                ell = a.log + iv.mpf([-slack, slack])
                ells[n] = ell
                alphas[n] = iv.exp(-ell) if I.hi(ell) < ELL_MATERIALIZE else None
                nxt = alphas[n] if alphas[n] is not None else iv.mpf([0, I.pow2(-E + 1)])
                continue
            inv = a + e * nxt
            alpha = 1 / inv
            alphas[n] = alpha
            ells[n] = iv.log(inv)
            nxt = alpha
        alphas = alphas[:depth]
        ells = ells[:depth]
        log_betas, betas = [], []
        acc_log = iv.mpf(0)
        acc = iv.mpf(1)
        for n in range(depth):
            acc_log = acc_log - ells[n]
            log_betas.append(acc_log)
            if acc is not None and alphas[n] is not None:
                acc = acc * alphas[n]
            else:
                acc = None
            betas.append(acc)
    return AlphaContext(stream, depth, guard, tuple(alphas), tuple(ells),
                        tuple(log_betas), tuple(betas), prec)


def context(stream: DigitStream, depth: int, guard: int = 20, prec: int = I.WORK_PREC) -> AlphaContext:
    """Like :func:`enclose_alphas`, but clips depth and guard to what the stream certifies."""
    avail = stream.certified_depth
    if avail is not None:
        depth = min(depth, avail)
        guard = max(0, min(guard, avail - depth))
    return enclose_alphas(stream, depth, guard, prec)


def evaluate(stream: DigitStream, depth: int, prec: int = I.WORK_PREC):
    """Interval enclosure of alpha itself from ``depth`` digits."""
    ctx = enclose_alphas(stream, depth, guard=0, prec=prec)
    with I.workprec(prec):
        return ctx.alpha_value


# ---------------------------------------------------------------------------
# high type
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HighType:
    kind: str  # "Yes" | "NoAt" | "UnknownBeyond"
    index: int | None = None

    def __str__(self):
        return self.kind if self.index is None else f"{self.kind}({self.index})"


def is_high_type(stream: DigitStream, N: int, depth: int) -> HighType:
    """Check a_n >= N.  Symbolic sources are decided outright."""
    if N < 2:
        raise ValueError("N must be >= 2")
    src = stream.source
    if isinstance(src, PeriodicDigits):
        for n in range(len(src.prefix) + src.period):
            if not stream.digit(n)[0] >= N:
                return HighType("NoAt", n)
        return HighType("Yes")
    if isinstance(src, GrowthLaw):
        law = stream.law
        check = min(depth, law.max_depth)
        for n in range(check):
            if not stream.digit(n)[0] >= N:
                return HighType("NoAt", n)
        # digits of every registered law are nondecreasing beyond the checked prefix
        if law.nondecreasing:
            return HighType("Yes")
        return HighType("UnknownBeyond", check)
    check = min(depth, len(stream.real_digits))
    for n in range(check):
        if stream.digit(n)[0] < N:
            return HighType("NoAt", n)
    return HighType("UnknownBeyond", check)


# ---------------------------------------------------------------------------
# stream mini-language
# ---------------------------------------------------------------------------

REAL_DEFAULT_DEPTH = 40


def _pairs(text: str) -> list[Pair]:
    val = ast.literal_eval(text.strip())
    if isinstance(val, tuple) and len(val) == 2 and all(isinstance(v, int) for v in val):
        val = [val]
    return [(int(a), int(e)) for a, e in val]


def parse_stream(text: str) -> DigitStream:
    """Parse ``periodic:head=(1,-1);body=[(3,-1)]``, ``real:<value>;prec=256``,
    ``growth:<rule>;k=v`` or a JSON document."""
    text = text.strip()
    if text.startswith("{"):
        return DigitStream.from_json(json.loads(text))
    if ":" not in text:
        # bare numbers: exact "p/q" expands strictly (rationals are reported),
        # decimals behave like real:<value>
        if "/" in text:
            return expand(text, REAL_DEFAULT_DEPTH)
        text = "real:" + text
    kind, _, rest = text.partition(":")
    parts = [p for p in rest.split(";") if p.strip()]
    try:
        if kind == "periodic":
            fields = dict(p.split("=", 1) for p in parts)
            head = _pairs(fields["head"])[0]
            return periodic(head, _pairs(fields["body"]), _pairs(fields.get("prefix", "[]")))
        if kind == "real":
            value, opts = parts[0].strip(), dict(p.split("=", 1) for p in parts[1:])
            prec = int(opts.get("prec", 256))
            depth = int(opts.get("depth", REAL_DEFAULT_DEPTH))
            return expand(value, depth, prec=prec, strict=False)
        if kind == "growth":
            rule, opts = parts[0].strip(), dict(p.split("=", 1) for p in parts[1:])
            return growth(rule, **{k.strip(): int(v) for k, v in opts.items()})
    except (KeyError, ValueError, SyntaxError, IndexError) as exc:
        raise ConfigError(f"cannot parse stream {text!r}: {exc}") from exc
    raise ConfigError(f"unknown stream kind in {text!r}")


def format_stream(stream: DigitStream) -> str:
    src = stream.source
    head = f"({stream.head[0]},{stream.head[1]})"
    if isinstance(src, PeriodicDigits):
        body = ",".join(f"({a},{e})" for a, e in src.body)
        out = f"periodic:head={head};body=[{body}]"
        if src.prefix:
            out += ";prefix=[" + ",".join(f"({a},{e})" for a, e in src.prefix) + "]"
        return out
    if isinstance(src, GrowthLaw):
        return "growth:" + ";".join([src.rule] + [f"{k}={v}" for k, v in src.params])
    return f"real:{src.value};prec={src.prec};depth={len(stream.real_digits)}"
