import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp

from arithmodel import cfrac, intervals as I
from arithmodel import model as M
from arithmodel.errors import DepthExhausted, LevelMismatch, ResolutionTooCoarse

from conftest import _ctx
from oracles import mcf_digits, point_cloud_lower, y_direct


def test_base_profile(golden):
    p = M.profile_base(golden, 0, 64)
    assert np.all(p.values == -1) and p.grid_x[0] == 0
    assert p.grid_x[-1] == pytest.approx(float(I.mid(1 / golden.alpha(0))), abs=1e-15)
    assert not np.any(p.flags)


def test_depth_one_maximum_matches_direct_formula():
    ctx = _ctx("periodic:head=(0,1);body=[(10,1)]")
    alpha = float(I.mid(ctx.alpha(1)))
    p = M.profile_depth(ctx, 0, 1, 4096)
    ref = y_direct(alpha, complex(1 / (2 * alpha) - 0.5, -1.0)).imag
    assert abs(np.max(p.values) - ref) < 1e-5


@pytest.mark.parametrize("name", ["golden", "silver", "mixed"])
def test_grid_invariants(name, request):
    ctx = request.getfixturevalue(name)
    prev = None
    for j in range(0, 6):
        p = M.profile_depth(ctx, 0, j, 256)
        assert np.all(p.values >= -1)
        assert abs(p.values[0]) <= 1 + 1e-12 if j == 0 else abs(p.values[0]) < 0.9 ** j + p.err
        if prev is not None:
            assert np.all(p.values >= prev.values - 2 * p.err - 1e-12)
        assert not np.any(p.values >= p.cap)
        prev = p


def test_refine_level_mismatch(golden):
    child = M.profile_base(golden, 2, 32)
    with pytest.raises(LevelMismatch):
        M.profile_refine(golden, 0, child)


def test_refine_detects_short_child(golden):
    child = M.profile_base(golden, 1, 32)
    child.grid_x = child.grid_x * 0.5
    with pytest.raises(ResolutionTooCoarse):
        M.profile_refine(golden, 0, child)


@pytest.mark.parametrize("name", ["golden", "silver"])
def test_grid_and_chains_agree(name, request):
    ctx = request.getfixturevalue(name)
    grid = M.profile_depth(ctx, -1, 3, 512)
    lo, _ = M.evaluate_points(ctx, -1, 3, grid.grid_x)
    assert np.max(np.abs(lo - grid.values)) <= grid.err


@pytest.mark.parametrize("text", ["periodic:head=(1,-1);body=[(3,-1)]",
                                  "periodic:head=(0,1);body=[(2,1)]"])
def test_point_cloud_oracle(text):
    ctx = _ctx(text)
    # independent digits and alphas from an exact rational close to the surd
    x = Fraction(mp.nstr(I.mid(cfrac.evaluate(ctx.stream, 60)), 45))
    (_, e0), digits, alphas = mcf_digits(x, 6)
    gx, cloud = point_cloud_lower(alphas, digits, e0, 2, 64)
    prof = M.profile_depth(ctx, -1, 2, 64)
    assert not np.any(np.isnan(cloud))
    assert np.max(np.abs(prof.values - cloud)) <= min(2 / 64, prof.err + 1e-6)


@given(st.floats(0, 1.5))
@settings(max_examples=40, deadline=None)
def test_periodicity_in_x(x):
    ctx = _ctx("periodic:head=(1,-1);body=[(3,-1)]")
    a, _ = M.evaluate_points(ctx, 0, 12, np.array([x, x + 1.0]))
    assert abs(a[0] - a[1]) < 1e-9


def test_block_boundaries_agree(mixed):
    # approach each integer from both sides at level 0
    a = int(mixed.digit(0))
    xs = np.array([k + s for k in range(1, a) for s in (-1e-12, 1e-12)])
    lo, _ = M.evaluate_points(mixed, 0, 10, xs)
    assert np.max(np.abs(lo[0::2] - lo[1::2])) < 1e-9


@pytest.mark.parametrize("name", ["golden", "silver", "mixed"])
def test_envelopes_ordered(name, request):
    ctx = request.getfixturevalue(name)
    pair = M.profile_limit(ctx, -1, 8, 256)
    assert np.all(pair.lower.values <= pair.upper.values)
    assert pair.lower.values[0] <= 1e-9 and pair.upper.values[0] >= -1e-9
    assert np.max(pair.gap) <= pair.gap_bound
    assert not pair.potentially_divergent


def test_gap_shrinks_with_J(golden):
    gaps = [np.max(M.profile_limit(golden, -1, J, 256).gap) for J in (4, 6, 8, 10)]
    assert all(b <= 0.95 * a for a, b in zip(gaps, gaps[1:]))


def test_bouquet_capped_fraction(bouquet):
    fr = [M.profile_limit(bouquet, -1, J, 256).lower.capped_fraction for J in range(3, 7)]
    assert fr[0] > 0 and fr == sorted(fr)


def test_profile_limit_depth_errors(golden):
    shallow = cfrac.context(golden.stream, 5)
    with pytest.raises(DepthExhausted):
        M.profile_limit(shallow, -1, 10, 64)


def test_endpoints(golden):
    pair = M.profile_limit(golden, -1, 15, 256)
    ends = M.endpoints(golden, -1, 3, pair)
    assert ends[0].x == 0 and ends[0].lower <= 0 <= ends[0].upper
    assert ends[1].x == pytest.approx((3 - math.sqrt(5)) / 2, abs=1e-12)


def test_max_vs_brjuno_golden(golden):
    pair = M.profile_limit(golden, -1, 20, 512)
    assert M.max_vs_brjuno(golden, -1, pair) < 2


def test_json_is_stable(golden):
    a = M.profile_limit(golden, -1, 6, 64).to_json()
    b = M.profile_limit(golden, -1, 6, 64).to_json()
    assert a == b
