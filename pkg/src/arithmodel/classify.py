"""Trichotomy verdicts (Jordan curve / hairy circle / Cantor bouquet) and the radial gap profile.

Arithmetic certificates decide the verdict.  The envelope geometry is attached
as evidence and can only veto (demote to Undetermined), never promote.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .arith import brjuno, herman_check_h
from .cfrac import AlphaContext, GrowthLaw, PeriodicDigits
from .errors import ArithModelError, WrongLevel
from .model import DEFAULT_CAP, EnvelopePair, profile_limit
from .serial import num

DIVERGENCE_THRESHOLD = 10.0


@dataclass(frozen=True)
class Policy:
    depth: int = 60
    guard: int = 20
    herman_horizon: int = 30
    brjuno_terms: int = 60
    J: int = 20
    resolution: int = 1024
    cap: float = DEFAULT_CAP
    c12: float = 2.0


@dataclass
class GapProfile:
    angles: np.ndarray
    inner_radius: np.ndarray
    outer_radius: np.ndarray
    normalization: str  # HairyCircle | Bouquet
    err: float
    capped: np.ndarray = None

    @property
    def R(self):
        return self.outer_radius

    def to_json(self) -> dict:
        return {
            "normalization": self.normalization,
            "err": num(self.err),
            "angles": len(self.angles),
            "outer_radius": [num(r) for r in self.outer_radius],
        }


def gap_profile(pair: EnvelopePair, mode: str = "HairyCircle") -> GapProfile:
    """Radii per angle theta, reading the level -1 envelopes at x = (-theta) mod 1."""
    lower, upper = pair.lower, pair.upper
    if lower.level != -1:
        raise WrongLevel(f"gap profiles are built at level -1, got {lower.level}")
    res = len(lower.grid_x) - 1
    idx = (-np.arange(res)) % res
    angles = np.arange(res) / res
    lo, up = lower.values[idx], upper.values[idx]
    flags = lower.flags[idx]
    err = lower.err + upper.err
    if mode == "HairyCircle":
        R = np.exp(2 * math.pi * (up - lo))
        return GapProfile(angles, np.ones(res), R, mode, float(np.max(R)) * math.expm1(2 * math.pi * err), flags)
    if mode == "Bouquet":
        outer = np.where(flags, 0.0, np.exp(-2 * math.pi * lo))
        return GapProfile(angles, np.zeros(res), outer, mode, math.expm1(2 * math.pi * err), flags)
    raise ValueError(f"unknown normalization {mode!r}")


@dataclass
class ModelClass:
    verdict: str  # JordanCurve | HairyCircle | CantorBouquet | Undetermined
    evidence: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "evidence": self.evidence}


def _herman_all_starts(ctx, policy):
    """Herman checks over every start index that periodicity makes representative."""
    src = ctx.stream.source
    starts = range(len(src.prefix) + src.period)
    return [herman_check_h(ctx, n, policy.herman_horizon, policy.brjuno_terms) for n in starts]


def _arith_verdict(ctx: AlphaContext, policy: Policy):
    src = ctx.stream.source
    ev = {}
    B = brjuno(ctx, 0, min(policy.brjuno_terms, ctx.depth))
    ev["brjuno"] = B.to_json()
    if isinstance(src, PeriodicDigits):
        verdicts = _herman_all_starts(ctx, policy)
        ev["herman"] = [v.to_json() | {"start": n} for n, v in enumerate(verdicts)]
        if all(v.kind == "SatisfiedAt" for v in verdicts):
            return "JordanCurve", ev
        return "Undetermined", ev
    if isinstance(src, GrowthLaw):
        law = ctx.stream.law
        if B.status == "Divergent":
            ev["terms_to_exceed"] = B.terms_to_exceed(DIVERGENCE_THRESHOLD)
            return "CantorBouquet", ev
        h = herman_check_h(ctx, 0, policy.herman_horizon, policy.brjuno_terms)
        ev["herman"] = [h.to_json() | {"start": 0}]
        if (B.status == "Convergent" and h.kind == "FailedUpTo"
                and h.certificate is not None and law.monotone_worsening):
            return "HairyCircle", ev
        return "Undetermined", ev
    ev["herman"] = [herman_check_h(ctx, 0, policy.herman_horizon, policy.brjuno_terms).to_json() | {"start": 0}]
    return "Undetermined", ev


def classify(ctx: AlphaContext, policy: Policy | None = None, with_geometry: bool = True) -> ModelClass:
    policy = policy or Policy()
    verdict, ev = _arith_verdict(ctx, policy)
    ev["policy"] = {k: (num(v) if isinstance(v, float) else v) for k, v in asdict(policy).items()}
    ev["stream"] = ctx.stream.to_json()
    if with_geometry:
        try:
            pair = profile_limit(ctx, -1, policy.J, policy.resolution, policy.cap, policy.c12)
        except ArithModelError as exc:
            ev["geometry"] = {"error": type(exc).__name__}
        else:
            sup_gap = float(np.max(pair.gap))
            ev["geometry"] = {
                "J": pair.J,
                "seed_level": pair.seed_level,
                "sup_gap": num(sup_gap),
                "gap_bound": num(pair.gap_bound),
                "capped_fraction": num(pair.lower.capped_fraction),
                "potentially_divergent": pair.potentially_divergent,
            }
            # consistency vetoes: geometry may demote a verdict, never promote one
            if verdict == "JordanCurve" and sup_gap > pair.gap_bound + 2 * pair.lower.err:
                ev["veto"] = "envelope gap exceeds its certified bound"
                verdict = "Undetermined"
    if verdict == "CantorBouquet" and ev.get("terms_to_exceed") is None:
        ev["veto"] = "no certified passage of the divergence threshold"
        verdict = "Undetermined"
    return ModelClass(verdict, ev)


# ---------------------------------------------------------------------------
# topology statistics
# ---------------------------------------------------------------------------

@dataclass
class ValidationReport:
    minimal_window: int | None  # samples: every circular window this wide meets the minimal set
    complement_window: int | None
    limsup_discrepancy: dict  # k -> max |left sup - right sup| (relative to local sup)
    minimal_fraction: float
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "minimal_window": self.minimal_window,
            "complement_window": self.complement_window,
            "limsup_discrepancy": {str(k): num(v) for k, v in self.limsup_discrepancy.items()},
            "minimal_fraction": num(self.minimal_fraction),
            "notes": self.notes,
        }


def covering_window(mask: np.ndarray) -> int | None:
    """Smallest w such that every circular window of w consecutive samples contains a True."""
    where = np.flatnonzero(mask)
    if len(where) == 0:
        return None
    gaps = np.diff(np.concatenate([where, [where[0] + len(mask)]]))
    return int(np.max(gaps))


def validate_topology(g: GapProfile, base_tol: float = 1e-9, ks=(1, 2, 4, 8)) -> ValidationReport:
    """Grid statistics for density of the base set, of its complement, and one-sided limsups."""
    R = g.outer_radius
    if g.normalization == "Bouquet":
        minimal = g.capped if g.capped is not None else R == 0
    else:
        minimal = R <= 1.0 + base_tol
    notes = []
    a = covering_window(minimal)
    b = covering_window(~minimal)
    if b is None:
        notes.append("complement of the base set is empty on this grid (degenerate profile)")
    disc = {}
    n = len(R)
    for k in ks:
        right = np.max([np.roll(R, -s) for s in range(1, k + 1)], axis=0)
        left = np.max([np.roll(R, s) for s in range(1, k + 1)], axis=0)
        local = np.maximum(np.maximum(left, right), R)
        scale = np.where(local > 0, local, 1.0)
        disc[k] = float(np.max(np.abs(right - left) / scale)) if n else 0.0
    return ValidationReport(a, b, disc, float(np.mean(minimal)), notes)
