"""Invariants of concrete Dieudonne modules.

Everything here works on cyclic presentations (a-number one) or on the explicit
minimal modules, where the extremal minimal lattices have diagonal bases in the
cyclic basis and the level torsion can be read off the orbit of M under F.
"""

from dataclasses import dataclass, field
from math import ceil, floor

from .dieudonne import (
    CyclicPresentation,
    DieudonneModule,
    basis_index,
    from_cyclic,
    minimal_module,
    newton_from_psi,
    unit_vector,
)
from .errors import CycleNotFoundError, InternalCheckError, PrecisionError, PresentationError
from .newton import (
    NewtonPolygon,
    isogeny_cutoff_bound,
    isomorphism_bound,
    minimal_height_value,
)
from .semilinear import (
    Lattice,
    apply_map,
    lattice_exponents,
    quotient_exponent,
    quotient_length,
)
from .witt import SATURATED


# -- precision ---------------------------------------------------------------------


def required_precision(nu):
    """Working precision used for exact invariants of a module with polygon nu."""
    return floor(2 * nu(nu.c)) + nu.d + nu.h + 2


def prepare(psi, strict=False):
    """Return psi at a precision meeting the invariants rule.

    Coefficients are integers, so raising N only adds zero digits.  With
    ``strict`` a too-small N raises instead.
    """
    need = required_precision(newton_from_psi(psi))
    if psi.ring.N >= need:
        return psi
    if strict:
        raise PrecisionError(f"N={psi.ring.N} is below the required {need}", suggested_N=need)
    return psi.with_precision(need)


def _module_of(obj):
    if isinstance(obj, CyclicPresentation):
        return from_cyclic(obj)
    if isinstance(obj, DieudonneModule):
        return obj
    raise TypeError("expected a CyclicPresentation or DieudonneModule")


# -- extremal lattices -------------------------------------------------------------


def _diagonal_exponents(psi, exponent_of):
    """Exponents on the cyclic basis of the span of p^{e(i)} F^{c-i} z, i = 0..h-1."""
    c = psi.c
    exps = [None] * psi.h
    for i in range(psi.h):
        e = exponent_of(i)
        if i <= c:
            exps[basis_index(psi, "F", c - i)] = e
        else:
            # F^{-k} z = p^{-k} V^k z
            exps[basis_index(psi, "V", i - c)] = e - (i - c)
    return exps


def m_minus_exponents(psi):
    nu = newton_from_psi(psi)
    if not nu.is_binilpotent():
        raise PresentationError("M_- needs a bi-nilpotent presentation")
    return _diagonal_exponents(psi, lambda i: floor(nu(i)))


def m_minus(psi):
    """The largest minimal submodule, spanned by p^{m_i - 1} F^{c-i} z with m_i = floor(nu(i)) + 1."""
    exps = m_minus_exponents(psi)
    if min(exps) < 0:
        raise InternalCheckError("M_- is not contained in M")
    return Lattice.diagonal(psi.ring, exps)


def m_plus_exponents(psi):
    nu = newton_from_psi(psi)
    if not nu.is_isoclinic():
        raise PresentationError("M_+ is only available for isoclinic presentations")
    lam = nu.segments[0][0]
    return _diagonal_exponents(psi, lambda i: ceil((i - psi.c) * lam))


def m_plus_isoclinic(psi):
    """The smallest minimal overmodule, spanned by p^{ceil((i-c) lambda)} F^{c-i} z."""
    exps = m_plus_exponents(psi)
    if max(exps) > 0:
        raise InternalCheckError("M is not contained in M_+")
    return Lattice.diagonal(psi.ring, exps)


@dataclass
class ExtremalLattices:
    M_minus: Lattice
    M_plus: object
    p_exponents: dict
    lengths: dict

    def to_json(self):
        return {"M_minus": self.M_minus.to_json(),
                "M_plus": None if self.M_plus is None else self.M_plus.to_json(),
                "p_exponents": self.p_exponents, "lengths": self.lengths}


def is_stable(M, L):
    """True when F(L) and V(L) lie in L."""
    return all(apply_map(op, L).issubset(L) for op in (M.F, M.V))


def extremal_lattices(psi, check_stable=True):
    psi = prepare(psi)
    nu = newton_from_psi(psi)
    M = from_cyclic(psi)
    std = Lattice.standard(psi.ring, psi.h)
    lo = m_minus(psi)
    hi = m_plus_isoclinic(psi) if nu.is_isoclinic() else None
    if check_stable:
        for name, L in (("M_-", lo), ("M_+", hi)):
            if L is not None and not is_stable(M, L):
                raise InternalCheckError(f"{name} is not stable under F and V")
    pe = {"M/M_-": quotient_exponent(std, lo)}
    lengths = {"M/M_-": quotient_length(std, lo)}
    if hi is not None:
        pe["M_+/M_-"] = quotient_exponent(hi, lo)
        pe["M_+/M"] = quotient_exponent(hi, std)
        lengths["M_+/M_-"] = quotient_length(hi, lo)
        lengths["M_+/M"] = quotient_length(hi, std)
    return ExtremalLattices(lo, hi, pe, lengths)


def minimal_height(psi):
    """p-exponent of M/M_-; equals floor(nu(c)) for a-number one."""
    psi = prepare(psi)
    value = quotient_exponent(Lattice.standard(psi.ring, psi.h), m_minus(psi))
    expected = minimal_height_value(newton_from_psi(psi))
    if value != expected:
        raise InternalCheckError(f"minimal height {value} differs from floor(nu(c)) = {expected}")
    return value


# -- level torsion -----------------------------------------------------------------


@dataclass
class LevelTorsionTrace:
    delta_table: list
    cycle: tuple
    ell: int
    lattices: list = field(default_factory=list, repr=False)

    def alpha(self, q):
        return self.delta_table[q][1]

    def beta(self, q):
        return self.delta_table[q][2]

    def to_json(self):
        q0, T, e = self.cycle
        return {"ell": self.ell, "cycle": {"start": q0, "period": T, "p_shift": e},
                "delta_table": [list(row) for row in self.delta_table]}


def level_torsion_isoclinic(obj, q_max=None, keep_lattices=False):
    """Orbit of M under F, recording alpha_q, beta_q, delta_q against M until it cycles."""
    M = _module_of(obj)
    if isinstance(obj, CyclicPresentation):
        nu = newton_from_psi(obj)
    else:
        nu = M.newton()
    if not nu.is_isoclinic():
        raise PresentationError("level torsion via delta_q needs an isoclinic module")
    if q_max is None:
        q_max = 4 * M.h
    std = Lattice.standard(M.ring, M.h)
    L = std
    seen = {}
    offsets = []
    table = []
    kept = []
    for q in range(q_max + 1):
        key = L.normalized_key()
        if key in seen:
            q0 = seen[key]
            cycle = (q0, q - q0, L.offset - offsets[q0])
            ell = max(row[3] for row in table)
            return LevelTorsionTrace(table, cycle, ell, kept)
        seen[key] = q
        offsets.append(L.offset)
        alpha, beta = lattice_exponents(L, std)
        table.append((q, alpha, beta, beta - alpha))
        if keep_lattices:
            kept.append(L)
        L = apply_map(M.F, L)
    raise CycleNotFoundError(
        f"no repeat of F^q M up to scaling within q_max={q_max}; raise q_max or N")


def level_torsion(obj, q_max=None):
    return level_torsion_isoclinic(obj, q_max).ell


# -- witnesses ---------------------------------------------------------------------


def witness_check(x, psi, m, M=None):
    """True when F^c x = p^m z exactly and x is not in pM."""
    M = M if M is not None else from_cyclic(psi)
    R = psi.ring
    x = [R(v) for v in x]
    if all(v.valuation() is SATURATED or v.valuation() >= 1 for v in x):
        return False
    y = x
    for _ in range(psi.c):
        y = M.F.apply(y)
    target = [R.p_power(m) * v for v in unit_vector(R, psi.h, basis_index(psi, "F", 0))]
    return y == target


def traverso_witness(psi, m, M=None):
    """The element -(p^{m-d} F^d + V^d) z of the cyclic module."""
    M = M if M is not None else from_cyclic(psi)
    R = psi.ring
    d = psi.d
    if m < d:
        raise ValueError("the witness needs m >= d")
    z = unit_vector(R, psi.h, basis_index(psi, "F", 0))
    fz, vz = z, z
    for _ in range(d):
        fz = M.F.apply(fz)
        vz = M.V.apply(vz)
    coef = R.p_power(m - d)
    return [-(coef * u + v) for u, v in zip(fz, vz)]


def isogeny_cutoff_exact(psi):
    """(j(nu), witness) where the witness agrees with psi to level j - 1 but has another polygon."""
    psi = prepare(psi)
    nu = newton_from_psi(psi)
    j = isogeny_cutoff_bound(nu)
    if j == 1:
        return 1, None
    m = j - 1
    R = psi.ring
    a = list(psi.a)
    if m < nu(psi.c):
        a[psi.c] = a[psi.c] + R.p_power(m)
    else:
        a[psi.c] = R.zero
    witness = psi.replace(a=a)
    if newton_from_psi(witness) == nu:
        raise InternalCheckError("isogeny cutoff witness does not change the polygon")
    for x, y in zip(psi.a + psi.b, witness.a + witness.b):
        v = (x - y).valuation()
        if v is not SATURATED and v < m:
            raise InternalCheckError("isogeny cutoff witness disagrees below level j - 1")
    return j, witness


def agrees_to_level(psi1, psi2, m):
    for x, y in zip(psi1.a + psi1.b, psi2.a + psi2.b):
        v = (x - y).valuation()
        if v is not SATURATED and v < m:
            return False
    return True


# -- report ------------------------------------------------------------------------


CITATIONS = {
    "b": "isogeny cutoff equals j(nu) when the a-number is at most one",
    "q": "minimal height equals floor(nu(c)) when the a-number is one",
    "n_upper": "isomorphism number is at most floor(2 nu(c))",
    "ell_exact": "level torsion is the maximum of delta_q over the F-orbit of M (isoclinic case)",
    "ell_lower": "level torsion of an isoclinic module with a-number one is at least min(c, d)",
    "ell_interval": "level torsion lies between b and floor(2 nu(c)) (general polygon)",
    "minimal": "minimal modules have isomorphism number and level torsion one",
    "pqp": "quasi-polarizable modules with c = d have isomorphism number at most d",
}


@dataclass
class InvariantReport:
    polygon: NewtonPolygon
    c: int
    d: int
    h: int
    a: int
    binilpotent: bool
    isoclinic: bool
    b_exact: int
    q_exact: int
    n_upper: int
    ell: dict
    traverso_min_cd: int
    traverso_violated: object
    citations: list
    N: int = 0

    def to_json(self):
        return {"polygon": self.polygon.to_json(), "c": self.c, "d": self.d, "h": self.h,
                "a": self.a, "binilpotent": self.binilpotent, "isoclinic": self.isoclinic,
                "b_exact": self.b_exact, "q_exact": self.q_exact, "n_upper": self.n_upper,
                "ell": self.ell, "traverso_min_cd": self.traverso_min_cd,
                "traverso_violated": self.traverso_violated, "citations": list(self.citations)}

    def ell_value(self):
        return self.ell.get("exact")


def _check(cond, message):
    if not cond:
        raise InternalCheckError(message)


def _core(psi, q_max):
    nu = newton_from_psi(psi)
    b, _ = isogeny_cutoff_exact(psi)
    q = minimal_height(psi)
    ell = level_torsion_isoclinic(psi, q_max).ell if nu.is_isoclinic() else None
    return {"b": b, "q": q, "ell": ell, "m_minus": tuple(m_minus_exponents(psi))}


def report(psi, strict=False, q_max=None, differential=True):
    """Invariant record of a cyclic presentation.

    With ``differential`` every exact value is recomputed at N + 4 and must agree.
    """
    psi = prepare(psi, strict=strict)
    nu = newton_from_psi(psi)
    M = from_cyclic(psi)
    core = _core(psi, q_max)
    if differential:
        again = _core(psi.with_precision(psi.ring.N + 4), q_max)
        _check(again == core, f"results changed at N+4: {core} vs {again}")
    c, d, h = psi.c, psi.d, psi.h
    a = M.a_number()
    _check(a == 1, f"cyclic module has a-number {a}")
    n_upper = isomorphism_bound(nu)
    b, q, ell = core["b"], core["q"], core["ell"]
    cites = [CITATIONS["b"], CITATIONS["q"], CITATIONS["n_upper"]]
    _check(1 <= b <= n_upper, "b must lie in [1, floor(2 nu(c))]")
    _check(b <= q + 1, "b must be at most floor(nu(c)) + 1")
    if ell is not None:
        _check(min(c, d) <= ell <= n_upper, "level torsion outside [min(c,d), floor(2 nu(c))]")
        _check(b <= ell, "b exceeds the level torsion")
        ell_field = {"exact": ell}
        violated = ell > min(c, d)
        cites += [CITATIONS["ell_exact"], CITATIONS["ell_lower"]]
    else:
        lo = max(1, b)
        ell_field = {"interval": [lo, n_upper]}
        violated = True if lo > min(c, d) else None
        cites.append(CITATIONS["ell_interval"])
    if c == d:
        cites.append(CITATIONS["pqp"])
    return InvariantReport(nu, c, d, h, a, nu.is_binilpotent(), nu.is_isoclinic(), b, q,
                           n_upper, ell_field, min(c, d), violated, cites, psi.ring.N)


def report_minimal(ring, cj, dj, mult=1, q_max=None):
    """Report for an explicit minimal module; ell is cross-checked by the F-orbit."""
    M = minimal_module(ring, cj, dj, mult)
    nu = NewtonPolygon.isoclinic(dj * mult, (cj + dj) * mult)
    ordinary = nu.is_ordinary()
    ell = level_torsion_isoclinic(M, q_max).ell
    expected = 0 if ordinary else 1
    _check(ell == expected, f"minimal module has level torsion {ell}, expected {expected}")
    c, d = nu.c, nu.d
    return InvariantReport(nu, c, d, nu.h, M.a_number(), nu.is_binilpotent(), True,
                           1, 0, 1, {"exact": ell}, min(c, d), ell > min(c, d),
                           [CITATIONS["minimal"]], ring.N)


def intermediate_presentation(ring, c, d, m):
    """F^c + p^{2d-m} F^{c-2d} + V^d, the family realizing level torsion m."""
    if c < 2 * d or not 0 <= 2 * d - m:
        raise ValueError("need c >= 2d and m <= 2d")
    return CyclicPresentation.standard(ring, c, d, {("a", 2 * d): ring.p_power(2 * d - m)})


__all__ = [
    "ExtremalLattices", "InvariantReport", "LevelTorsionTrace", "agrees_to_level",
    "extremal_lattices", "intermediate_presentation", "is_stable", "isogeny_cutoff_exact",
    "level_torsion", "level_torsion_isoclinic", "m_minus", "m_minus_exponents", "m_plus_exponents",
    "m_plus_isoclinic", "minimal_height", "prepare", "report", "report_minimal",
    "required_precision", "traverso_witness", "witness_check",
]
