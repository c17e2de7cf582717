"""Registered growth-law digit rules and the symbolic certificates they carry.

Every rule is a pure function ``n -> (a_n, eps_{n+1})`` over integers, with
head ``(0, +1)`` and all signs ``+1``.  Digits beyond 4096 bits are kept as
log-only enclosures; when even ``log a_n`` would exceed 2**63 the digit
overflows and the rule's representable depth ends there.

Because every sign is +1 we have ``1/(a_i + 1/2) <= alpha_i <= 1/a_i``; the
certificates below only use that band, never the exact alpha_i.
"""

from __future__ import annotations

from functools import lru_cache

from mpmath import iv, mp

from . import intervals as I
from .cfrac import LogDigit
from .errors import DigitOverflow

EXACT_BITS = 4096
LOG_LIMIT = mp.mpf(2) ** 63
LN2 = mp.log(2)


def _log_digit(log_value) -> LogDigit:
    """Digit round(exp(s)) known only through an enclosure of s."""
    if I.hi(log_value) > LOG_LIMIT:
        raise DigitOverflow(f"log of digit ~{mp.nstr(I.mid(log_value), 5)} exceeds 2**63")
    # log(round(e^s)) = s + O(e^{-s}); widen by a power of two that dominates it
    E = int(mp.floor(I.lo(log_value) / LN2))
    slack = I.pow2(-E + 1)
    return LogDigit(log_value + iv.mpf([-slack, slack]))


def _round_exp(make_s):
    """round(exp(s)) with s = make_s() evaluated at a precision matched to its size:
    an exact int when small enough, else a LogDigit."""
    with I.workprec(96):
        s = make_s()
    s_hi = I.hi(s)
    if s_hi > LOG_LIMIT:
        raise DigitOverflow("digit exponent beyond 2**63")
    if s_hi * 1.4427 < EXACT_BITS:
        bits = int(s_hi * 1.4427) + 128
        with I.workprec(bits):
            val = iv.exp(make_s())
            a_lo = int(mp.nint(I.lo(val)))
            a_hi = int(mp.nint(I.hi(val)))
        if a_lo != a_hi:
            raise DigitOverflow("digit rounding ambiguous at working precision")
        return a_lo
    with I.workprec(I.WORK_PREC + int(mp.log(s_hi, 2)) + 8):
        return _log_digit(make_s())


class GrowthRule:
    id = "base"
    head = (0, 1)
    nondecreasing = True
    # failure certificates for the Herman criterion are only offered by rules
    # whose digits provably keep the criterion failing from some level on
    monotone_worsening = False
    defaults: dict = {}

    def __init__(self, **params):
        unknown = set(params) - set(self.defaults)
        if unknown:
            raise ValueError(f"unknown parameters for rule {self.id!r}: {sorted(unknown)}")
        self.params = {**self.defaults, **{k: int(v) for k, v in params.items()}}
        self._validate()
        self._cache: list = []
        self._overflow_at: int | None = None

    def _validate(self):
        pass

    def _next(self, n: int):
        raise NotImplementedError

    def digit(self, n: int):
        if self._overflow_at is not None and n >= self._overflow_at:
            raise DigitOverflow(f"rule {self.id} digit {n} is not representable")
        while len(self._cache) <= n:
            try:
                self._cache.append(self._next(len(self._cache)))
            except DigitOverflow:
                self._overflow_at = len(self._cache)
                raise
        return self._cache[n], 1

    @property
    def max_depth(self) -> int:
        """Number of representable digits (capped for rules that never overflow)."""
        if self._overflow_at is None:
            n = 0
            while n < self.depth_cap:
                try:
                    self.digit(n)
                except DigitOverflow:
                    break
                n += 1
            else:
                return self.depth_cap
        return self._overflow_at

    depth_cap = 512

    # ---- certificates (None = nothing to offer) ----
    def brjuno_divergence(self, base: int):
        return None

    def brjuno_tail(self, ell_last_lo, last_term_hi):
        return None

    def herman_failure(self, v_hi, ell_lo) -> bool:
        return False

    def y_composite_lower(self, ell_lo):
        return None

    def describe(self) -> dict:
        return {"rule": self.id, "params": dict(self.params)}


class Bouquet(GrowthRule):
    """a_0 = a0, a_{n+1} = round(exp(a_0 a_1 ... a_n)); since 1/beta_n ~ prod a_i the
    Brjuno terms stay near 1 and the sum diverges."""

    id = "bouquet"
    defaults = {"a0": 10}

    def _validate(self):
        if self.params["a0"] < 3:
            raise ValueError("bouquet rule needs a0 >= 3")

    def _next(self, n):
        if n == 0:
            return self.params["a0"]
        prev = self._cache[:n]
        if any(isinstance(a, LogDigit) for a in prev):
            raise DigitOverflow("product of digits no longer representable")
        P = 1
        for a in prev:
            P *= a
        if P > LOG_LIMIT:
            raise DigitOverflow("digit exponent beyond 2**63")
        return _round_exp(lambda: iv.mpf(P))

    def term_lower_bound(self):
        """Uniform lower bound for every Brjuno term after the first, at any base level.

        A term is prod_{i<k} alpha_i * log(1/alpha_k) with log(1/alpha_k) >= P_{k-1} - e^{-P}
        and alpha_i >= 1/(a_i + 1/2); the product telescopes to prod a_i/(a_i + 1/2),
        and the digits at least double so sum_{i>=1} 1/(2 a_i) <= 1/a_1.
        """
        a0 = mp.mpf(self.params["a0"])
        a1 = mp.mpf(self.digit(1)[0])
        return a0 / (a0 + mp.mpf(0.5)) * (1 - 1 / a1) * mp.mpf(0.999)

    def brjuno_divergence(self, base):
        return {"term_lower_bound": self.term_lower_bound()}


class Hairy(GrowthRule):
    """a_{i+1} = round(exp(sqrt(a_i))): alpha_{i+1} sits between exp(-1/alpha_i) and
    exp(-1/sqrt(alpha_i)), which keeps the Brjuno sum finite while the Herman
    criterion fails."""

    id = "hairy"
    defaults = {"a0": 36}
    monotone_worsening = True

    def _validate(self):
        if self.params["a0"] < 3:
            raise ValueError("hairy rule needs a0 >= 3")

    def _next(self, n):
        if n == 0:
            return self.params["a0"]
        prev = self._cache[n - 1]
        if isinstance(prev, LogDigit):
            # sqrt(a) = exp(log(a)/2) with log(a) > 2800: certainly past 2**63
            raise DigitOverflow("digit exponent beyond 2**63")
        return _round_exp(lambda: iv.sqrt(iv.mpf(prev)))

    @staticmethod
    def ratio_bound(ell_lo):
        """Bound on consecutive Brjuno term ratios alpha_k * ell_{k+1} / ell_k once ell_k >= ell_lo.

        ell_{k+1} <= sqrt(a_k) + 1 <= e^{ell_k/2} + 1 and alpha_k <= e^{-ell_k}; the
        bound decreases in ell_k and the ell_k increase, so it holds for the whole tail.
        """
        return (mp.exp(-ell_lo / 2) + mp.exp(-ell_lo)) / ell_lo

    def brjuno_tail(self, ell_last_lo, last_term_hi):
        if ell_last_lo < 8:
            return None
        q = self.ratio_bound(ell_last_lo)
        return last_term_hi * q / (1 - q)

    def herman_failure(self, v_hi, ell_lo):
        # If v_k <= ell_k/2 - 2 with ell_k >= 8, then v_{k+1} = e^{v_k} <= e^{-1.8} ell_{k+1}
        # (using ell_{k+1} >= e^{ell_k/2 - 0.2}) which is again <= ell_{k+1}/2 - 2, so
        # v_m < ell_m <= B(alpha_m) at every later level.
        return ell_lo >= 8 and v_hi <= ell_lo / 2 - 2

    def y_composite_lower(self, ell_lo):
        # Im Y_r(iy) >= log((3+2y)/sqrt 10)/(2 pi) - 3.09 r, and ell_{i+1} >= e^{ell_i/2 - 0.2},
        # give Im Y_j o ... o Y_m(i B(alpha_{m+1})/2pi) >= ell_j/(4 pi) - 0.55 for every m >= j
        # as long as ell_i >= 8 (so r = alpha_i <= 0.01) for all i >= j.
        if ell_lo < 8:
            return None
        return ell_lo / (4 * mp.pi) - mp.mpf(0.55)


class Doubling(GrowthRule):
    """a_n = N * 2**n: a Brjuno number whose tail is geometric."""

    id = "doubling"
    defaults = {"N": 10}
    depth_cap = 256

    def _validate(self):
        if self.params["N"] < 2:
            raise ValueError("doubling rule needs N >= 2")

    def _next(self, n):
        return self.params["N"] << n

    def brjuno_tail(self, ell_last_lo, last_term_hi):
        # ratio alpha_k ell_{k+1}/ell_k <= log(2a + 1/2) / ((a - 1/2) log(a - 1/2)), decreasing in a;
        # ell_lo >= log(a - 1/2) recovers a lower bound on a.
        a = mp.exp(ell_last_lo) - mp.mpf(0.5)
        if a < 3:
            return None
        q = mp.log(2 * a + 1.5) / ((a - 1) * mp.log(a - 1))
        if q >= 1:
            return None
        return last_term_hi * q / (1 - q)


RULES = {cls.id: cls for cls in (Bouquet, Hairy, Doubling)}


@lru_cache(maxsize=64)
def _rule(rule_id: str, items: tuple) -> GrowthRule:
    return RULES[rule_id](**dict(items))


def get_rule(rule_id: str, **params) -> GrowthRule:
    if rule_id not in RULES:
        raise ValueError(f"unknown growth rule {rule_id!r}; known: {sorted(RULES)}")
    return _rule(rule_id, tuple(sorted((k, int(v)) for k, v in params.items())))
