import random
from fractions import Fraction
from math import gcd

import pytest

from pdivisible.dieudonne import (
    CyclicPresentation,
    basis_index,
    from_cyclic,
    minimal_module,
    newton_from_psi,
    random_presentation,
    unit_vector,
)
from pdivisible.errors import CycleNotFoundError, PrecisionError, PresentationError
from pdivisible.invariants import (
    agrees_to_level,
    extremal_lattices,
    intermediate_presentation,
    is_stable,
    isogeny_cutoff_exact,
    level_torsion,
    level_torsion_isoclinic,
    m_minus,
    m_minus_exponents,
    m_plus_exponents,
    m_plus_isoclinic,
    minimal_height,
    prepare,
    report,
    report_minimal,
    required_precision,
    traverso_witness,
    witness_check,
)
from pdivisible.newton import NewtonPolygon, isogeny_cutoff_bound, isomorphism_bound, minimal_height_value
from pdivisible.semilinear import Lattice, apply_map, quotient_exponent
from pdivisible.witt import ring_create

F = Fraction


def std(p, c, d, N=12, extra=None, n=1):
    return CyclicPresentation.standard(ring_create(p, n, N), c, d, extra)


def traverso(p, N=12):
    return std(p, 6, 2, N, {("a", 4): p})


def two_slope(p=2):
    return std(p, 3, 3, extra={("a", 3): p})


# -- precision ---------------------------------------------------------------------


def test_required_precision_and_prepare():
    psi = traverso(2)
    assert required_precision(newton_from_psi(psi)) == 3 + 2 + 8 + 2
    assert prepare(psi).ring.N == 15
    with pytest.raises(PrecisionError) as info:
        prepare(psi, strict=True)
    assert info.value.suggested_N == 15
    assert prepare(traverso(2, N=20)).ring.N == 20


# -- extremal lattices -------------------------------------------------------------


def test_m_minus_examples():
    assert m_minus_exponents(two_slope()) == [0, 0, 0, 1, 0, 0]
    assert m_minus_exponents(std(2, 1, 1)) == [0, 0]
    assert m_minus_exponents(std(2, 2, 2)) == [0, 0, 1, 0]
    std_lat = Lattice.standard(ring_create(2, 1, 12), 6)
    assert quotient_exponent(std_lat, m_minus(two_slope())) == 1


def test_m_plus_examples():
    assert m_plus_exponents(std(2, 2, 2)) == [0, -1, 0, 0]
    assert m_plus_exponents(std(2, 1, 1)) == [0, 0]
    R = ring_create(2, 1, 12)
    assert quotient_exponent(m_plus_isoclinic(std(2, 2, 2)), Lattice.standard(R, 4)) == 1
    ext = extremal_lattices(traverso(2))
    assert ext.p_exponents == {"M/M_-": 1, "M_+/M_-": 1, "M_+/M": 1}
    with pytest.raises(PresentationError):
        m_plus_isoclinic(two_slope())


def test_presentations_are_binilpotent():
    R = ring_create(2, 1, 8)
    # F + 1 + V would have slopes 0 and 1; such operators are rejected up front
    with pytest.raises(PresentationError):
        CyclicPresentation(R, 1, 1, [1, 1], [1])


@pytest.mark.parametrize("psi", [std(2, 1, 1), std(2, 2, 3), traverso(3), two_slope(3)],
                         ids=["F+V", "F2+V3", "F6+pF2+V2", "F3+p+V3"])
def test_extremal_lattices_properties(psi):
    psi = prepare(psi)
    M = from_cyclic(psi)
    nu = newton_from_psi(psi)
    std_lat = Lattice.standard(psi.ring, psi.h)
    lo = m_minus(psi)
    assert lo.issubset(std_lat) and is_stable(M, lo)
    if nu.is_isoclinic():
        hi = m_plus_isoclinic(psi)
        assert std_lat.issubset(hi) and is_stable(M, hi)
        d0, h0 = nu.d, nu.h
        g = gcd(d0, h0)
        d0, h0 = d0 // g, h0 // g
        # the minimal overmodule satisfies F^{h0} M_+ = p^{d0} M_+
        assert apply_map(M.F.power(h0), hi) == hi.scale(d0)
        assert apply_map(M.F.power(h0), lo) == lo.scale(d0)


@pytest.mark.parametrize("psi,value", [(two_slope(), 1), (traverso(2), 1), (std(2, 2, 2), 1),
                                       (std(2, 1, 1), 0)])
def test_minimal_height_examples(psi, value):
    assert minimal_height(psi) == value


# -- level torsion -----------------------------------------------------------------


@pytest.mark.parametrize("c,d", [(1, 1), (2, 2), (2, 3), (3, 1), (1, 3), (3, 4)])
def test_level_torsion_power_family(c, d):
    psi = prepare(std(2, c, d, N=4))
    trace = level_torsion_isoclinic(psi)
    assert trace.ell == min(c, d)
    for q in range(len(trace.delta_table)):
        if q <= c:
            assert trace.alpha(q) == 0
        if q <= d:
            assert trace.beta(q) == q
    M = from_cyclic(psi)
    L = Lattice.standard(psi.ring, psi.h)
    assert apply_map(M.F.power(c + d), L) == L.scale(d)


@pytest.mark.parametrize("p", [2, 3])
def test_level_torsion_counterexample(p):
    trace = level_torsion_isoclinic(prepare(traverso(p)))
    assert trace.ell == 3
    assert trace.ell > min(6, 2)


@pytest.mark.parametrize("c,d,m", [(6, 2, 2), (6, 2, 3), (6, 3, 3), (8, 2, 2), (9, 3, 3), (9, 3, 4)])
def test_level_torsion_intermediate(c, d, m):
    psi = intermediate_presentation(ring_create(2, 1, 4), c, d, m)
    assert level_torsion(prepare(psi)) == m


def test_level_torsion_minimal_modules():
    R = ring_create(3, 1, 8)
    assert level_torsion(minimal_module(R, 1, 1)) == 1
    assert level_torsion(minimal_module(R, 2, 3)) == 1
    assert level_torsion(minimal_module(R, 1, 2, 2)) == 1


def test_level_torsion_errors():
    with pytest.raises(CycleNotFoundError):
        level_torsion_isoclinic(prepare(traverso(2)), q_max=2)
    with pytest.raises(PresentationError):
        level_torsion_isoclinic(prepare(two_slope()))


@pytest.mark.parametrize("seed", range(4))
def test_level_torsion_random_bounds(seed):
    rng = random.Random(seed)
    for _ in range(6):
        p = rng.choice([2, 3])
        c, d = rng.randint(1, 4), rng.randint(1, 4)
        psi = random_presentation(ring_create(p, 1, 4), c, d, rng)
        nu = newton_from_psi(psi)
        if not nu.is_isoclinic():
            continue
        ell = level_torsion(prepare(psi))
        assert min(c, d) <= ell <= isomorphism_bound(nu)


# -- witnesses ---------------------------------------------------------------------


def test_witness_examples():
    psi = prepare(traverso(2))
    x = traverso_witness(psi, 3)
    assert witness_check(x, psi, 3)
    assert not witness_check(x, psi, 2)
    psi2 = std(2, 2, 2)
    M = from_cyclic(psi2)
    z = unit_vector(psi2.ring, 4, basis_index(psi2, "F", 0))
    v2z = M.V.apply(M.V.apply(z))
    assert witness_check(v2z, psi2, 2)
    pz = [psi2.ring.p_power(1) * t for t in z]
    assert not witness_check(pz, psi2, 2)
    with pytest.raises(ValueError):
        traverso_witness(psi, 1)


def test_isogeny_cutoff_examples():
    j, w = isogeny_cutoff_exact(two_slope())
    assert j == 2
    assert newton_from_psi(w) == NewtonPolygon.isoclinic(3, 6)
    assert agrees_to_level(prepare(two_slope()), w, 1)
    j, w = isogeny_cutoff_exact(traverso(2))
    assert j == 2
    assert newton_from_psi(w) == NewtonPolygon([(F(1, 6), 6), (F(1, 2), 2)])
    assert agrees_to_level(prepare(traverso(2)), w, 1)
    assert not agrees_to_level(prepare(traverso(2)), w, 2)
    assert isogeny_cutoff_exact(std(2, 1, 1)) == (1, None)


@pytest.mark.parametrize("seed", range(3))
def test_isogeny_cutoff_random(seed):
    rng = random.Random(100 + seed)
    for _ in range(8):
        psi = random_presentation(ring_create(rng.choice([2, 3]), 1, 4), rng.randint(1, 4),
                                  rng.randint(1, 4), rng)
        nu = newton_from_psi(psi)
        j, w = isogeny_cutoff_exact(psi)
        assert j == isogeny_cutoff_bound(nu)
        if w is not None:
            assert newton_from_psi(w) != nu
            assert agrees_to_level(prepare(psi), w, j - 1)


# -- report ------------------------------------------------------------------------


def test_report_counterexample():
    rep = report(traverso(2))
    assert (rep.b_exact, rep.q_exact, rep.ell_value(), rep.n_upper) == (2, 1, 3, 3)
    assert rep.isoclinic and rep.traverso_violated is True
    obj = rep.to_json()
    assert obj["ell"] == {"exact": 3} and obj["h"] == 8


@pytest.mark.parametrize("c,d", [(1, 1), (2, 2), (2, 3), (3, 2), (3, 4), (1, 3)])
def test_report_power_family(c, d):
    rep = report(std(2, c, d, N=4))
    assert rep.ell_value() == min(c, d)
    assert rep.traverso_violated is False


def test_report_two_slope():
    rep = report(two_slope())
    assert not rep.isoclinic
    assert rep.ell == {"interval": [2, 2]}
    assert rep.b_exact == 2 and rep.q_exact == minimal_height_value(newton_from_psi(two_slope()))


def test_report_minimal():
    rep = report_minimal(ring_create(2, 1, 8), 1, 1, 1)
    assert rep.ell_value() == 1 and rep.b_exact == 1


def test_report_strict():
    with pytest.raises(PrecisionError):
        report(traverso(2), strict=True)
    assert report(traverso(2, N=15), strict=True).ell_value() == 3


def test_intermediate_presentation_errors():
    with pytest.raises(ValueError):
        intermediate_presentation(ring_create(2, 1, 4), 3, 2, 2)
