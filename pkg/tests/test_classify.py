import math

import numpy as np
import pytest

from arithmodel import classify as C
from arithmodel import model as M
from arithmodel.errors import WrongLevel

from conftest import _ctx

FAST = C.Policy(J=10, resolution=256)


def test_golden_is_jordan(golden):
    res = C.classify(golden, FAST)
    assert res.verdict == "JordanCurve"
    assert "veto" not in res.evidence
    assert len(res.evidence["herman"]) == 1


def test_mixed_checks_every_start(mixed):
    res = C.classify(mixed, FAST)
    assert res.verdict == "JordanCurve"
    assert [h["start"] for h in res.evidence["herman"]] == [0, 1, 2]


def test_bouquet_and_hairy(bouquet, hairy):
    assert C.classify(bouquet, FAST).verdict == "CantorBouquet"
    assert C.classify(hairy, FAST).verdict == "HairyCircle"


def test_undetermined_sources(doubling):
    # no failure certificate and no periodicity: soundness over completeness
    assert C.classify(doubling, FAST).verdict == "Undetermined"
    real = _ctx("real:0.6180339887498948482045868343656381177203;prec=160", 30)
    assert C.classify(real, FAST).verdict == "Undetermined"


def test_classify_deterministic(golden):
    assert C.classify(golden, FAST).to_json() == C.classify(golden, FAST).to_json()


def test_gap_profile_golden(golden):
    pair = M.profile_limit(golden, -1, 20, 512)
    g = C.gap_profile(pair)
    assert np.all(g.inner_radius == 1)
    assert np.all(g.outer_radius >= g.inner_radius - g.err)
    assert np.max(g.R - 1) <= math.expm1(2 * math.pi * pair.gap_bound)
    # angle theta reads x = -theta mod 1
    k = 100
    x_idx = (512 - k) % 512
    assert g.R[k] == pytest.approx(math.exp(2 * math.pi * pair.gap[x_idx]))


def test_gap_profile_equal_envelopes_give_one(golden):
    pair = M.profile_limit(golden, -1, 5, 64)
    pair.upper.values = pair.lower.values.copy()
    assert np.all(C.gap_profile(pair).R == 1.0)


def test_gap_profile_bouquet_mode(bouquet):
    pair = M.profile_limit(bouquet, -1, 4, 256)
    g = C.gap_profile(pair, "Bouquet")
    assert np.all(g.inner_radius == 0)
    assert np.all(g.outer_radius[g.capped] == 0)
    assert np.any(g.capped)


def test_gap_profile_wrong_level(golden):
    pair = M.profile_limit(golden, 0, 5, 64)
    with pytest.raises(WrongLevel):
        C.gap_profile(pair)


def test_covering_window():
    assert C.covering_window(np.array([1, 0, 0, 1, 0], bool)) == 3
    assert C.covering_window(np.array([0, 0], bool)) is None
    assert C.covering_window(np.ones(4, bool)) == 1


def test_validate_topology_golden(golden):
    pair = M.profile_limit(golden, -1, 20, 512)
    rep = C.validate_topology(C.gap_profile(pair), base_tol=3 * pair.gap_bound)
    assert rep.minimal_window == 1
    assert rep.complement_window is None and rep.notes


def test_validate_topology_hairy_locked(hairy):
    # recorded from the first run at J = 3, resolution 1024: the envelopes are
    # separated at a single sample only, so the complement window spans the grid
    pair = M.profile_limit(hairy, -1, 3, 1024)
    rep = C.validate_topology(C.gap_profile(pair), base_tol=1e-9)
    assert rep.minimal_window == 2
    assert rep.complement_window == 1024
    assert rep.minimal_fraction == pytest.approx(0.9990234375)


def test_validate_topology_bouquet_locked(bouquet):
    # every angle of the level -1 grid is capped from J = 4 on
    pair = M.profile_limit(bouquet, -1, 4, 1024)
    rep = C.validate_topology(C.gap_profile(pair, "Bouquet"))
    assert rep.minimal_window == 1 and rep.minimal_fraction == 1.0
    assert rep.complement_window is None
