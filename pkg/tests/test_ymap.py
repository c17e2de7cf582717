import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import iv, mp

from arithmodel import intervals as I
from arithmodel import ymap
from arithmodel.errors import DomainViolation

from oracles import y_direct

radii = st.floats(1e-4, 0.5)
heights = st.floats(-1.0, 100.0)


def test_known_values():
    assert abs(ymap.vertical_image(0.1, 0.0, 1.0) - 0.1363) < 1e-3
    assert abs(ymap.vertical_image(0.1, 1 / (2 * 0.1) - 0.5, -1.0) - 0.0581) < 1e-3
    assert ymap.vertical_image(0.3, 0.0, 0.0) == pytest.approx(0.0, abs=1e-15)
    assert ymap.vertical_image(0.1, 3.0, 1.0) < ymap.vertical_image(0.1, 3.0, 2.0)


def test_y_r_one_over_r():
    for r in (0.05, 0.2, 0.5):
        w = ymap.y_r(r, complex(1 / r, 0.0))
        assert abs(w - 1) < 1e-12


def test_level_map_signs():
    w = ymap.level_map(0.3, 1, 1j)
    v = ymap.level_map(0.3, -1, 1j)
    assert w.real == 0 and abs(w.imag - v.imag) < 1e-15
    assert abs(ymap.level_map(0.3, 1, 0j)) < 1e-15 and abs(ymap.level_map(0.3, -1, 0j)) < 1e-15


def test_golden_axis_contracts(golden):
    w = ymap.y_level(golden, 2, 1j)
    assert 0 < w.imag < 1


@given(radii, st.floats(-10, 10), heights)
@settings(max_examples=300, deadline=None)
def test_matches_direct_formula(r, u, y):
    x = u / r
    got = ymap.vertical_image(r, x, y)
    ref = y_direct(r, complex(x, y)).imag
    # the direct quotient loses relative accuracy near its zero; compare absolutely
    assert abs(got - float(ref)) < 1e-9 * max(1.0, abs(y))


@given(radii, st.floats(-10, 10), heights, st.floats(-10, 10), heights)
@settings(max_examples=300, deadline=None)
def test_contraction(r, u1, y1, u2, y2):
    x1, x2 = u1 / r, u2 / r
    a = complex(r * x1, ymap.vertical_image(r, x1, y1))
    b = complex(r * x2, ymap.vertical_image(r, x2, y2))
    assert abs(a - b) <= 0.9 * abs(complex(x1 - x2, y1 - y2)) + 1e-9


@given(radii, st.floats(-10, 10), heights)
@settings(max_examples=300, deadline=None)
def test_image_bound_and_translation(r, u, y):
    x = u / r
    v = ymap.vertical_image(r, x, y)
    assert v >= -0.9 - 1e-9
    assert abs(ymap.vertical_image(r, x + 1 / r, y) - v) < 1e-9


@given(radii, heights)
@settings(max_examples=200, deadline=None)
def test_shifted_line(r, t):
    # both signs: the imaginary parts agree, the real parts are +-(1 - r)
    a = ymap.y_r(r, complex(1 / r - 1, t))
    b = ymap.y_r(r, complex(0.0, t))
    assert abs(a - (b + (1 - r))) < 1e-9
    a = ymap.level_map(r, 1, complex(1 / r - 1, t))
    b = ymap.level_map(r, 1, complex(0.0, t))
    assert abs(a - (b + (r - 1))) < 1e-9


@given(radii, st.floats(-10, 10), heights)
@settings(max_examples=100, deadline=None)
def test_extended_precision_agrees(r, u, y):
    x = u / r
    lo = ymap.vertical_image(r, x, y)
    hi = ymap.vertical_image(r, x, y, extended=True)
    assert abs(lo - float(hi)) < 1e-10 * max(1.0, abs(y))


def test_extended_translation_residual():
    with mp.workprec(113):
        r = mp.mpf("0.1234")
        a = ymap.vertical_image(r, mp.mpf(2) + 1 / r, 3.0, extended=True)
        b = ymap.vertical_image(r, 2.0, 3.0, extended=True)
        assert abs(a - b) < 1e-15


def test_tiny_r_continuity():
    # the asymptotic form used below TINY_R agrees with the full formula just above it
    r = ymap.TINY_R * 1.5
    for t, y in ((0.3, 2.0), (1e-12, 2.0), (r, 0.0), (0.0, 50.0)):
        full = ymap.vertical_image_turn(r, t, y)
        asym = ymap._tiny_turn(r, np.asarray(t), np.asarray(y), -math.log(r))
        assert abs(full - asym) < 1e-9
    # r underflowing to zero but log(1/r) known
    r0 = ymap.TINY_R * 0.5
    c = ymap.vertical_image_turn(0.0, 0.3, 2.0, ell=-math.log(r0))
    assert abs(c - ymap.vertical_image_turn(r0, 0.3, 2.0)) < 1e-9


def test_vectorised_matches_scalar():
    rng = np.random.default_rng(1)
    r = rng.uniform(1e-3, 0.5, 50)
    t = rng.uniform(-1, 1, 50)
    y = rng.uniform(-1, 50, 50)
    many = ymap.vertical_image_many(r, t, y)
    single = [float(ymap.vertical_image_turn(ri, ti, yi)) for ri, ti, yi in zip(r, t, y)]
    assert np.allclose(many, single, atol=0, rtol=0)


def test_domain_checks():
    with pytest.raises(DomainViolation):
        ymap.vertical_image(0.7, 0.0, 0.0)
    with pytest.raises(DomainViolation):
        ymap.vertical_image(0.3, 0.0, -2.0)


@given(st.floats(1e-3, 0.5), st.floats(0.0, 60.0))
@settings(max_examples=100, deadline=None)
def test_axis_image_encloses(alpha, y):
    with I.workprec(I.WORK_PREC):
        a = iv.mpf(alpha)
        ell = -iv.log(a)
        enc = ymap.axis_image(a, ell, iv.mpf(y))
        with mp.workprec(400):
            ref = ymap.vertical_image(mp.mpf(alpha), 0, mp.mpf(y), extended=True, prec=400)
        slack = mp.mpf(2) ** -180
        assert I.lo(enc) - slack <= ref <= I.hi(enc) + slack


def test_axis_small_r_encloses():
    # ell above the exact-formula threshold: compare with a high-precision point value
    ell = mp.mpf(60)
    with I.workprec(I.WORK_PREC):
        r = mp.exp(-ell)
        for y in (0.0, 1.0, 25.0):
            enc = ymap.axis_image(None, iv.mpf(ell), iv.mpf(y))
            with mp.workprec(400):
                ref = ymap.vertical_image(r, 0, y, extended=True, prec=400)
            assert I.lo(enc) <= ref <= I.hi(enc)
            assert float(I.width(enc)) < 1e-6
