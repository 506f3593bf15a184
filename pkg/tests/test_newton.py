from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import hull_value
from pdivisible.errors import PrecisionError, PresentationError
from pdivisible.newton import (
    NewtonPolygon,
    Nh,
    common_slope_identity,
    direct_sum,
    dual,
    hom_bound_chain,
    hom_number_bound,
    hull_from_points,
    isogeny_cutoff_bound,
    isomorphism_bound,
    minimal_height_value,
    pqp_bound,
    preceq,
    strip_ordinary,
    support_lines,
    support_value,
)
from pdivisible.witt import SATURATED

F = Fraction


@st.composite
def polygons(draw, binilpotent=False, max_runs=3):
    segs = []
    for _ in range(draw(st.integers(1, max_runs))):
        if binilpotent:
            den = draw(st.integers(2, 5))
            num = draw(st.integers(1, den - 1))
        else:
            den = draw(st.integers(1, 4))
            num = draw(st.integers(0, den))
        segs.append((F(num, den), F(num, den).denominator * draw(st.integers(1, 2))))
    return NewtonPolygon(sorted(segs))


def test_basic_polygon():
    nu = NewtonPolygon([(F(1, 3), 3), (F(2, 3), 3)])
    assert (nu.h, nu.d, nu.c) == (6, 3, 3)
    assert str(nu) == "(0,0) (3,1) (6,3)"
    assert nu(3) == 1 and nu(F(3, 2)) == F(1, 2)
    assert nu.is_breakpoint(3) and not nu.is_breakpoint(2)
    assert nu.is_binilpotent() and not nu.is_isoclinic()
    assert nu.slope_list() == [F(1, 3)] * 3 + [F(2, 3)] * 3


def test_constructors():
    assert NewtonPolygon.isoclinic(2, 4) == NewtonPolygon([(F(1, 2), 4)])
    assert NewtonPolygon.ordinary(2, 1).segments == ((0, 2), (1, 1))
    assert NewtonPolygon.from_slopes([F(1, 2), 0, F(1, 2)]).segments == ((0, 1), (F(1, 2), 2))
    assert NewtonPolygon([(F(1, 2), 2), (F(1, 2), 2)]).segments == ((F(1, 2), 4),)
    assert NewtonPolygon.ordinary(1, 1).is_ordinary()


def test_polygon_errors():
    with pytest.raises(PresentationError):
        NewtonPolygon([(F(1, 3), 2)])
    with pytest.raises(PresentationError):
        NewtonPolygon([(F(2, 3), 3), (F(1, 3), 3)])
    with pytest.raises(PresentationError):
        NewtonPolygon([(F(3, 2), 2)])
    with pytest.raises(PresentationError):
        NewtonPolygon([(F(1, 2), 0)])
    with pytest.raises(ValueError):
        NewtonPolygon.isoclinic(1, 2)(3)
    with pytest.raises(PresentationError):
        NewtonPolygon.from_json({"segs": []})


@settings(max_examples=100, deadline=None)
@given(polygons())
def test_json_roundtrip(nu):
    assert NewtonPolygon.from_json(nu.to_json()) == nu


# -- hulls -------------------------------------------------------------------------


def test_hull_examples():
    hull = hull_from_points([(0, 0), (1, 2), (2, 1), (3, SATURATED), (4, 2)])
    # (2, 1) is collinear with the chord and is not kept as a vertex
    assert hull.vertices == ((0, 0), (4, 2))
    assert hull.to_polygon() == NewtonPolygon.isoclinic(2, 4)
    assert hull.evaluate(1) == F(1, 2)
    with pytest.raises(PrecisionError):
        hull_from_points([(0, 0), (1, 1), (2, None)])


@settings(max_examples=150, deadline=None)
@given(st.lists(st.one_of(st.none(), st.integers(0, 9)), min_size=3, max_size=9), st.integers(0, 9),
       st.integers(0, 9))
def test_hull_matches_chord_oracle(mid, y0, y1):
    pts = [(0, y0)] + [(i + 1, y) for i, y in enumerate(mid)] + [(len(mid) + 1, y1)]
    hull = hull_from_points(pts)
    for t in range(len(pts)):
        assert hull.evaluate(t) == hull_value(pts, t)
    slopes = [s for s, _ in hull.segments()]
    assert slopes == sorted(slopes) and len(set(slopes)) == len(slopes)


# -- bounds ------------------------------------------------------------------------


def test_bound_examples():
    nu = NewtonPolygon([(F(1, 3), 3), (F(2, 3), 3)])
    assert isogeny_cutoff_bound(nu) == 2
    assert isomorphism_bound(nu) == 2
    assert minimal_height_value(nu) == 1
    half = NewtonPolygon.isoclinic(1, 2)
    assert (isogeny_cutoff_bound(half), isomorphism_bound(half), minimal_height_value(half)) == (1, 1, 0)
    iso = NewtonPolygon.isoclinic(2, 5)
    # nu(3) = 6/5 off a breakpoint
    assert (isogeny_cutoff_bound(iso), isomorphism_bound(iso), minimal_height_value(iso)) == (2, 2, 1)
    ordinary = NewtonPolygon.ordinary(2, 3)
    assert (isogeny_cutoff_bound(ordinary), isomorphism_bound(ordinary), minimal_height_value(ordinary)) == (1, 1, 0)
    assert Nh(7) == 3 and Nh(0) == 0
    assert pqp_bound(NewtonPolygon.isoclinic(3, 6)) == 3
    with pytest.raises(ValueError):
        pqp_bound(NewtonPolygon.isoclinic(1, 3))
    with pytest.raises(ValueError):
        isogeny_cutoff_bound(NewtonPolygon())
    with pytest.raises(ValueError):
        Nh(-1)


@settings(max_examples=200, deadline=None)
@given(polygons())
def test_bound_inequalities(nu):
    b, j, n = minimal_height_value(nu), isogeny_cutoff_bound(nu), isomorphism_bound(nu)
    assert n <= 2 * b + 1
    assert j <= b + 1
    assert b <= j
    assert n >= 1


def test_support_lines_examples():
    nu = NewtonPolygon([(F(1, 3), 3), (F(2, 3), 3)])
    lines = support_lines(nu)
    assert [(L.slope, L.intercept, L.beta) for L in lines] == [(F(1, 3), 0, 1), (F(2, 3), -1, 1)]
    assert support_value(nu, F(1, 2), 3) == 1
    assert lines[1](6) == 3


@settings(max_examples=100, deadline=None)
@given(polygons())
def test_support_lines_lie_below(nu):
    for L in support_lines(nu):
        for x, y in nu.breakpoints():
            assert L(x) <= y
        assert any(L(x) == y for x, y in nu.breakpoints())


# -- structure ---------------------------------------------------------------------


def test_structure_examples():
    a, b = NewtonPolygon.isoclinic(1, 3), NewtonPolygon.isoclinic(2, 3)
    assert direct_sum(a, b) == NewtonPolygon([(F(1, 3), 3), (F(2, 3), 3)])
    assert dual(a) == b
    assert preceq(NewtonPolygon.isoclinic(3, 6), NewtonPolygon.ordinary(3, 3))
    assert not preceq(NewtonPolygon.ordinary(3, 3), NewtonPolygon.isoclinic(3, 6))
    with pytest.raises(ValueError):
        preceq(a, b)
    mixed = NewtonPolygon([(0, 1), (F(1, 2), 2), (1, 2)])
    assert strip_ordinary(mixed) == NewtonPolygon.isoclinic(1, 2)


@settings(max_examples=100, deadline=None)
@given(polygons(), polygons())
def test_structure_properties(a, b):
    s = direct_sum(a, b)
    assert (s.h, s.d) == (a.h + b.h, a.d + b.d)
    assert direct_sum(b, a) == s
    assert dual(dual(a)) == a
    assert (dual(a).h, dual(a).d) == (a.h, a.c)
    ordinary = NewtonPolygon.ordinary(a.c, a.d)
    assert preceq(a, ordinary) or a.h == 0


# -- homomorphism bounds -----------------------------------------------------------


def test_hom_number_examples():
    half = NewtonPolygon.isoclinic(1, 2)
    assert hom_number_bound(half, half) == 1
    assert hom_number_bound(NewtonPolygon.ordinary(1, 1), half) == 0
    third = NewtonPolygon.isoclinic(1, 3)
    # plus = slopes 1/3 x3, 1/2 x2 with c+ = 3
    assert hom_number_bound(third, half) == 1
    mixed = NewtonPolygon([(0, 1), (F(1, 2), 2), (1, 1)])
    assert hom_number_bound(mixed, half) == hom_number_bound(half, half)


@settings(max_examples=200, deadline=None)
@given(polygons(), polygons())
def test_hom_bound_chain_monotone(a, b):
    chain = hom_bound_chain(a, b)
    assert all(x <= y for x, y in zip(chain, chain[1:]))


@settings(max_examples=200, deadline=None)
@given(polygons(binilpotent=True), polygons(binilpotent=True))
def test_common_slope_identity(a, b):
    for _, lhs, rhs in common_slope_identity(a, b):
        assert lhs == rhs


def test_reference_polygon_examples():
    assert hull_from_points([(-1, 0), (2, 3)]).segments() == [(1, 3)]
    assert hull_from_points([(-6, 0), (-2, 1), (2, 2)]).segments() == [(F(1, 4), 8)]
    assert hull_from_points([(-3, 0), (0, 1), (3, 3)]).segments() == [(F(1, 3), 3), (F(2, 3), 3)]
    quarter = NewtonPolygon.isoclinic(2, 8)
    assert quarter(6) == F(3, 2)
    assert (isogeny_cutoff_bound(quarter), isomorphism_bound(quarter), minimal_height_value(quarter)) == (2, 3, 1)
    half = NewtonPolygon.isoclinic(2, 4)
    assert half(2) == 1 and half(0) == 0
    assert (isomorphism_bound(half), pqp_bound(half)) == (2, 2)
    assert hom_number_bound(half, half) == isomorphism_bound(half) == 2
    assert Nh(8) == 4
    assert support_lines(half)[0].beta == half(2)
    assert direct_sum(quarter, quarter) == NewtonPolygon([(F(1, 4), 16)])
    two = NewtonPolygon([(F(1, 3), 3), (F(2, 3), 3)])
    assert dual(two) == two
    assert isogeny_cutoff_bound(NewtonPolygon.ordinary(0, 2)) == 1
