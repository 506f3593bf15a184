"""Point counts of truncated homomorphism groups and the gamma experiment.

Homomorphisms from the group with presentation Psi' to D, truncated at level m,
correspond to solutions x in M/p^m M of Psi'(x) = 0 (send a homomorphism to the
image of the generator).  Counting solutions over F_{p^{nr}} for several r
separates the dimension of the hom scheme from its component group:

    log_p #Hom(F_{p^{nr}}) = gamma * n * r + pi(r),

where pi(r) depends only on gcd(r, T) for the period T of Frobenius on the
components and pi(r1) <= pi(r2) whenever r1 divides r2.
"""

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction

from .dieudonne import CyclicPresentation, DieudonneModule, from_cyclic
from .errors import BudgetError, PrecisionError, RingMismatchError
from .invariants import level_torsion_isoclinic, prepare
from .newton import isomorphism_bound
from .semilinear import DEFAULT_WORK_BOUND, SemilinearMap, semilinear_kernel_count


def psi_operator(source, target):
    """Psi' evaluated on the target module, as a list of semilinear terms."""
    if source.ring.key[:2] != target.ring.key[:2] or source.ring.key[3] != target.ring.key[3]:
        raise RingMismatchError("source and target live over different residue fields")
    R = target.ring
    terms = []
    for i, a in enumerate(source.a):
        if a:
            P = target.F.power(source.c - i)
            terms.append(SemilinearMap(R, P.matrix(), P.twist).scaled(R(a.coeffs)))
    for i, b in enumerate(source.b, start=1):
        if b:
            P = target.V.power(i)
            terms.append(SemilinearMap(R, P.matrix(), P.twist).scaled(R(b.coeffs)))
    return terms


def _target_module(target, m):
    M = from_cyclic(target) if isinstance(target, CyclicPresentation) else target
    if not isinstance(M, DieudonneModule):
        raise TypeError("target must be a presentation or a module")
    if M.ring.N < m:
        M = M.with_precision(m)
    return M


def hom_kernel(source, target, m, r=1, work_bound=DEFAULT_WORK_BOUND):
    """log_p of #{x in M/p^m M over F_{p^{nr}} : Psi'(x) = 0}."""
    if m <= 0:
        return 0
    M = _target_module(target, m)
    return semilinear_kernel_count(psi_operator(source, M), m, r, work_bound)


@dataclass
class GammaProfile:
    source: CyclicPresentation
    target: object
    m_max: int
    r_max: int
    table: dict = field(default_factory=dict)
    gamma: dict = field(default_factory=dict)
    stable: dict = field(default_factory=dict)
    f_detected: object = None
    monotone: bool = True
    experimental: bool = True

    def rows(self):
        return [(m, r, self.table[m, r]) for m in range(1, self.m_max + 1)
                for r in range(1, self.r_max + 1)]

    def to_json(self):
        return {"experimental": self.experimental, "m_max": self.m_max, "r_max": self.r_max,
                "table": [{"m": m, "r": r, "log_count": v} for m, r, v in self.rows()],
                "gamma": {str(m): (None if g is None else str(g)) for m, g in self.gamma.items()},
                "stable": {str(m): s for m, s in self.stable.items()},
                "monotone": self.monotone, "f_detected": self.f_detected}

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "r", "log_count"])
        w.writerows(self.rows())
        return buf.getvalue()


def infer_gamma(counts, n):
    """(gamma, stable) from log-counts indexed by r = 1, 2, ...

    Every divisor pair r1 | r2 gives an upper estimate of gamma; pairs with
    gcd(r1, T) = gcd(r2, T) give it exactly.  The minimum is reported; it is
    called stable when it is an integer reached by at least two pairs.
    """
    rs = sorted(counts)
    estimates = []
    for r1 in rs:
        for r2 in rs:
            if r2 > r1 and r2 % r1 == 0:
                estimates.append(Fraction(counts[r2] - counts[r1], n * (r2 - r1)))
    if not estimates:
        return None, False
    g = min(estimates)
    stable = g.denominator == 1 and estimates.count(g) >= 2
    return g, stable


def gamma_profile(source, target=None, m_max=3, r_max=6, work_bound=DEFAULT_WORK_BOUND):
    if m_max < 1 or r_max < 2:
        raise ValueError("need m_max >= 1 and r_max >= 2")
    target = source if target is None else target
    prof = GammaProfile(source, target, m_max, r_max)
    n = source.ring.n
    M = _target_module(target, m_max)
    terms = psi_operator(source, M)
    for m in range(1, m_max + 1):
        for r in range(1, r_max + 1):
            prof.table[m, r] = semilinear_kernel_count(terms, m, r, work_bound)
    prof.gamma[0], prof.stable[0] = Fraction(0), True
    for m in range(1, m_max + 1):
        g, ok = infer_gamma({r: prof.table[m, r] for r in range(1, r_max + 1)}, n)
        prof.gamma[m], prof.stable[m] = g, ok
    for m in range(1, m_max + 1):
        for r in range(1, r_max + 1):
            if m > 1 and prof.table[m, r] < prof.table[m - 1, r]:
                prof.monotone = False
        if prof.gamma[m] < prof.gamma[m - 1]:
            prof.monotone = False
    for m in range(m_max):
        if prof.stable[m] and prof.stable[m + 1] and prof.gamma[m] == prof.gamma[m + 1]:
            prof.f_detected = m
            break
    return prof


@dataclass
class CrossCheck:
    status: str
    f_detected: object
    ell: object
    profile: object = None
    reason: str = ""

    @property
    def agree(self):
        return self.status == "agree"

    def to_json(self):
        out = {"status": self.status, "f_detected": self.f_detected, "ell": self.ell,
               "reason": self.reason}
        if self.profile is not None:
            out["profile"] = self.profile.to_json()
        return out


def cross_check(psi, m_max=None, r_max=6, work_bound=DEFAULT_WORK_BOUND):
    """Compare the gamma-detected f with the level torsion of an isoclinic presentation."""
    psi = prepare(psi)
    nu = psi.newton()
    ell = level_torsion_isoclinic(psi).ell
    if m_max is None:
        m_max = isomorphism_bound(nu) + 1
    try:
        prof = gamma_profile(psi, psi, m_max, r_max, work_bound)
    except (BudgetError, PrecisionError) as exc:
        return CrossCheck("inconclusive", None, ell, reason=str(exc))
    f = prof.f_detected
    if f is None:
        return CrossCheck("inconclusive", None, ell, prof, "gamma did not stabilize within m_max")
    if not prof.monotone:
        return CrossCheck("disagree", f, ell, prof, "gamma profile is not monotone")
    status = "agree" if f == ell else "disagree"
    return CrossCheck(status, f, ell, prof)
