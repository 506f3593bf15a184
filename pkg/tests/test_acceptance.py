"""One test per acceptance criterion; each prints a single PASS/FAIL line.

All criteria are exact (integer or rational equality); no floating tolerances.
"""

from conftest import ACCEPTANCE_LINES
from pdivisible.dieudonne import CyclicPresentation, from_cyclic
from pdivisible.invariants import level_torsion_isoclinic, prepare, traverso_witness, witness_check
from pdivisible.semilinear import Lattice, apply_map
from pdivisible.truncated_hom import gamma_profile
from pdivisible.verify import POWER_FAMILY_PAIRS, PINNED, run_check
from pdivisible.witt import ring_create


def record(name):
    res = run_check(name)
    line = res.line()
    print(line)
    ACCEPTANCE_LINES.append(line)
    return res


def test_criterion_01_power_family_level_torsion():
    res = record("power-family")
    assert res.status == "pass", res.detail
    assert set(POWER_FAMILY_PAIRS) == {(1, 1), (1, 2), (2, 2), (2, 3), (3, 3), (2, 4)}
    for (p, c, d), (ell, _, _) in res.values.items():
        assert ell == min(c, d)
    psi = prepare(CyclicPresentation.standard(ring_create(3, 1, 4), 2, 4))
    M = from_cyclic(psi)
    L = Lattice.standard(psi.ring, 6)
    assert apply_map(M.F.power(6), L) == L.scale(4)


def test_criterion_02_counterexample():
    res = record("traverso")
    assert res.status == "pass", res.detail
    for p in (2, 3):
        psi = prepare(CyclicPresentation.standard(ring_create(p, 1, 12), 6, 2, {("a", 4): p}))
        assert level_torsion_isoclinic(psi).ell == 3
        assert witness_check(traverso_witness(psi, 3), psi, 3)


def test_criterion_03_intermediate_value():
    res = record("intermediate")
    assert res.status == "pass", res.detail
    assert res.values[(2, 6, 2, 2)] == 2
    psi = prepare(CyclicPresentation.standard(ring_create(2, 1, 12), 6, 2, {("a", 4): 4}))
    assert level_torsion_isoclinic(psi).ell == 2


def test_criterion_04_minimal_height():
    res = record("minimal-height")
    assert res.status == "pass", res.detail
    assert len(PINNED) >= 20 and len(res.values) == len(PINNED)


def test_criterion_05_extremal_lattices():
    res = record("extremal-lattices")
    assert res.status == "pass", res.detail
    assert len(res.values) >= 10
    for pe, lengths, _, _ in res.values.values():
        pe, lengths = dict(pe), dict(lengths)
        assert pe["M/M_-"] == pe["M_+/M"] == pe["M_+/M_-"]
        assert lengths["M_+/M_-"] == 2 * lengths["M/M_-"]


def test_criterion_06_isogeny_cutoff():
    res = record("isogeny-cutoff")
    assert res.status == "pass", res.detail
    assert len(res.values) == len(PINNED)


def test_criterion_07_formula_layer():
    res = record("formulas")
    assert res.status == "pass", res.detail


def test_criterion_08_newton_cross_validation():
    res = record("newton-cross")
    assert res.status == "pass", res.detail


def test_criterion_09_gamma_experiment():
    res = record("gamma")
    assert res.status == "pass", res.detail
    R = ring_create(2, 1, 8)
    for c, f in ((1, 1), (2, 2)):
        prof = gamma_profile(CyclicPresentation.standard(R, c, c), m_max=3, r_max=6)
        gammas = [prof.gamma[m] for m in range(4)]
        assert gammas == sorted(gammas)
        assert prof.f_detected == f


def test_criterion_10_kernel_count_oracle():
    res = record("kernel-oracle")
    assert res.status == "pass", res.detail


def test_criterion_11_precision_robustness():
    res = record("precision")
    assert res.status == "pass", res.detail


def test_criterion_12_bound_sweep():
    res = record("sweep")
    assert res.status == "pass", res.detail
