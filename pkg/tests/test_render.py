import numpy as np
import pytest

from arithmodel import classify as C
from arithmodel import model as M
from arithmodel import render as R
from arithmodel.errors import EmptyProfile


def test_golden_polar_is_closed_curve(golden):
    pair = M.profile_limit(golden, -1, 20, 512)
    fig = R.render_polar(C.gap_profile(pair))
    assert len(fig.segments) == 512
    assert max(s.length for s in fig.segments) <= 1e-6
    assert all(s.style == "hair" for s in fig.segments)
    assert fig.svg.startswith("<svg") and fig.svg.count("<line") == 512


def test_single_angle_segment():
    g = C.GapProfile(np.array([0.0]), np.array([1.0]), np.array([2.0]), "HairyCircle", 0.0)
    fig = R.render_polar(g)
    assert len(fig.segments) == 1 and fig.segments[0].length == pytest.approx(1.0)


def test_empty_profile():
    g = C.GapProfile(np.array([]), np.array([]), np.array([]), "HairyCircle", 0.0)
    with pytest.raises(EmptyProfile):
        R.render_polar(g)


def test_never_below_inner(hairy):
    g = C.gap_profile(M.profile_limit(hairy, -1, 2, 256))
    for s in R.render_polar(g).segments:
        assert s.r0 >= 1 - g.err and s.r1 >= s.r0


def test_bouquet_capped_segments_locked(bouquet):
    pair = M.profile_limit(bouquet, -1, 4, 256)
    fig = R.render_polar(C.gap_profile(pair, "Bouquet"))
    assert sum(s.style == "capped" for s in fig.segments) == 256
    inv = R.render_polar(C.gap_profile(pair, "Bouquet"), R.RenderSpec(invert_radius=True))
    assert all(s.r1 == inv.meta["bound"] for s in inv.segments if s.style == "capped")


def test_rectangular(golden, bouquet):
    fig = R.render_rectangular(M.profile_limit(golden, -1, 10, 128))
    assert len(fig.polylines["lower"]) == 129 and not fig.meta["bands"]
    base = M.profile_base(golden, 0, 16)
    pair = M.EnvelopePair(base, base, 0.0, 0, 0, -1.0)
    flat = R.render_rectangular(pair)
    assert {y for _, y in flat.polylines["lower"]} == {-1.0}
    fig = R.render_rectangular(M.profile_limit(bouquet, -1, 4, 128))
    assert fig.meta["bands"]


def test_quadratic_orbit():
    orb = R.quadratic_orbit(0.6180339887498949, 100_000)
    assert orb[0] == complex(-4 / 27, 0)
    assert len(orb) == 100_000 and max(abs(z) for z in orb) <= 1
    # locked from the first run
    assert max(abs(z) for z in orb) == pytest.approx(0.2960060455443594, rel=1e-9)
    par = R.quadratic_orbit(0.0, 20_000)
    assert len(par) == 20_000 and max(abs(z) for z in par) < 1


def test_deterministic_outputs(golden, tmp_path):
    pair = M.profile_limit(golden, -1, 8, 128)
    g = C.gap_profile(pair)
    spec = R.RenderSpec(size=200)
    assert R.render_polar(g, spec).svg == R.render_polar(g, spec).svg
    fig = R.render_orbit_overlay(g, R.quadratic_orbit(0.618, 500), R.RenderSpec(size=200, mode="orbit-overlay"))
    assert R.to_png(fig, spec) == R.to_png(fig, spec)
    side = R.write_figure(fig, str(tmp_path / "f.svg"), "svg", spec, {"stream": "golden"})
    assert (tmp_path / "f.svg").read_text() == fig.svg
    assert '"sha256"' in open(side).read()
