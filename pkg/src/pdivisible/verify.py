"""Pinned verification suite: worked examples, identities and oracles.

Each check returns a :class:`CheckResult`.  Checks 1-6 also return the exact
values they computed so that the precision check can recompute them at a
higher working precision and compare.
"""

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor

from .dieudonne import (
    CyclicPresentation,
    from_cyclic,
    newton_from_module,
    newton_from_psi,
    random_presentation,
)
from .errors import BudgetError, PdivError
from .invariants import (
    agrees_to_level,
    extremal_lattices,
    intermediate_presentation,
    isogeny_cutoff_exact,
    level_torsion_isoclinic,
    minimal_height,
    prepare,
    traverso_witness,
    witness_check,
)
from .newton import (
    NewtonPolygon,
    Nh,
    common_slope_identity,
    hom_bound_chain,
    hom_number_bound,
    isogeny_cutoff_bound,
    minimal_height_value,
)
from .semilinear import Lattice, SemilinearMap, apply_map, kernel_count_bruteforce, semilinear_kernel_count
from .sweep import sandwich_violations, sweep
from .truncated_hom import cross_check
from .witt import ring_create

BUDGETS = {
    "low": {"work_bound": 64, "r_max": 4},
    "default": {"work_bound": 4096, "r_max": 6},
    "high": {"work_bound": 16384, "r_max": 8},
}

POWER_FAMILY_PAIRS = [(1, 1), (1, 2), (2, 2), (2, 3), (3, 3), (2, 4)]

# (p, c, d, {(slot, index): value}) on top of F^c + V^d; all have h <= 8
PINNED = [
    (2, 1, 1, {}),
    (3, 1, 1, {}),
    (2, 2, 2, {}),
    (2, 1, 3, {}),
    (3, 3, 1, {}),
    (2, 4, 4, {}),
    (3, 5, 3, {}),
    (2, 7, 1, {}),
    (3, 1, 7, {}),
    (2, 6, 2, {("a", 4): 2}),
    (3, 6, 2, {("a", 4): 3}),
    (2, 6, 2, {("a", 4): 4}),
    (2, 3, 3, {("a", 3): 2}),
    (3, 3, 3, {("a", 3): 3}),
    (2, 2, 2, {("a", 2): 2}),
    (2, 3, 2, {("a", 1): 2}),
    (2, 4, 4, {("a", 4): 2}),
    (2, 2, 3, {("a", 2): 2}),
    (3, 2, 4, {("b", 2): 3}),
    (2, 5, 3, {("b", 1): 2}),
    (3, 5, 3, {("a", 5): 3}),
    (2, 4, 3, {("a", 2): 2, ("b", 1): 4}),
    (2, 2, 6, {("b", 4): 2}),
    (2, 3, 5, {("a", 1): 2}),
    (3, 4, 2, {("a", 2): 9, ("b", 1): 3}),
]

BASE_N = 8


def pinned_presentations(extra=0):
    out = []
    for p, c, d, slots in PINNED:
        psi = prepare(CyclicPresentation.standard(ring_create(p, 1, BASE_N), c, d, slots))
        out.append(psi.with_precision(psi.ring.N + extra) if extra else psi)
    return out


def _at(psi, extra):
    psi = prepare(psi)
    return psi.with_precision(psi.ring.N + extra) if extra else psi


@dataclass
class CheckResult:
    name: str
    criterion: int
    status: str
    detail: str = ""
    values: dict = field(default_factory=dict, repr=False)

    @property
    def passed(self):
        return self.status == "pass"

    def line(self):
        return f"[{self.status.upper()}] criterion {self.criterion} ({self.name}): {self.detail}"

    def to_json(self):
        return {"name": self.name, "criterion": self.criterion, "status": self.status,
                "detail": self.detail}


def _result(name, k, failures, detail, values=None):
    if failures:
        return CheckResult(name, k, "fail", "; ".join(failures[:5]), values or {})
    return CheckResult(name, k, "pass", detail, values or {})


# -- 1: F^c + V^d family ------------------------------------------------------------


def check_power_family(extra=0, **_):
    failures, values = [], {}
    for p in (2, 3):
        R = ring_create(p, 1, BASE_N)
        for c, d in POWER_FAMILY_PAIRS:
            psi = _at(CyclicPresentation.standard(R, c, d), extra)
            trace = level_torsion_isoclinic(psi, keep_lattices=True)
            M = from_cyclic(psi)
            std = Lattice.standard(psi.ring, psi.h)
            L = std
            for _ in range(c + d):
                L = apply_map(M.F, L)
            tag = f"p={p} F^{c}+V^{d}"
            if trace.ell != min(c, d):
                failures.append(f"{tag}: ell={trace.ell}")
            if L != std.scale(d):
                failures.append(f"{tag}: F^(c+d)M != p^d M")
            if any(trace.alpha(q) != 0 for q in range(c + 1)):
                failures.append(f"{tag}: alpha_q != 0 for some q <= c")
            if any(trace.beta(q) != q for q in range(d + 1)):
                failures.append(f"{tag}: beta_q != q for some q <= d")
            values[(p, c, d)] = (trace.ell, tuple(trace.delta_table), trace.cycle)
    return _result("power-family", 1, failures,
                   f"ell = min(c,d) on {2 * len(POWER_FAMILY_PAIRS)} modules; F^(c+d)M = p^d M", values)


# -- 2: Traverso counterexample ----------------------------------------------------


def check_traverso(extra=0, **_):
    failures, values = [], {}
    for p in (2, 3):
        psi = _at(CyclicPresentation.standard(ring_create(p, 1, 12), 6, 2,
                                              {("a", 4): p}), extra)
        ell = level_torsion_isoclinic(psi).ell
        x = traverso_witness(psi, 3)
        ok = witness_check(x, psi, 3)
        if ell != 3:
            failures.append(f"p={p}: ell={ell}")
        if not ell > min(psi.c, psi.d):
            failures.append(f"p={p}: ell does not exceed min(c,d)")
        if not ok:
            failures.append(f"p={p}: witness check failed")
        values[p] = (ell, ok, tuple(v.coeffs for v in x))
    return _result("traverso", 2, failures,
                   "F^6 + pF^2 + V^2 has ell = 3 > 2 = min(c,d) at p = 2, 3; witness verified",
                   values)


# -- 3: intermediate values --------------------------------------------------------


INTERMEDIATE = [(2, 6, 2, 2), (3, 6, 2, 2), (2, 6, 2, 3), (2, 8, 2, 2), (2, 8, 2, 3)]


def check_intermediate(extra=0, **_):
    failures, values = [], {}
    for p, c, d, m in INTERMEDIATE:
        psi = _at(intermediate_presentation(ring_create(p, 1, BASE_N), c, d, m), extra)
        ell = level_torsion_isoclinic(psi).ell
        if ell != m:
            failures.append(f"p={p} {psi.describe()}: ell={ell}, expected {m}")
        values[(p, c, d, m)] = ell
    return _result("intermediate", 3, failures,
                   f"F^c + p^(2d-m) F^(c-2d) + V^d has ell = m on {len(INTERMEDIATE)} cases",
                   values)


# -- 4: minimal height -------------------------------------------------------------


def check_minimal_height(extra=0, **_):
    failures, values = [], {}
    for psi in pinned_presentations(extra):
        expected = minimal_height_value(newton_from_psi(psi))
        try:
            got = minimal_height(psi)
        except PdivError as exc:
            failures.append(f"{psi.describe()}: {exc}")
            continue
        if got != expected:
            failures.append(f"{psi.describe()}: {got} != {expected}")
        values[psi.describe(), psi.p] = got
    return _result("minimal-height", 4, failures,
                   f"p-exponent(M/M_-) = floor(nu(c)) on {len(PINNED)} presentations", values)


# -- 5: extremal lattices ----------------------------------------------------------


def isoclinic_pinned(extra=0):
    return [psi for psi in pinned_presentations(extra) if newton_from_psi(psi).is_isoclinic()]


def check_extremal(extra=0, **_):
    failures, values = [], {}
    cases = isoclinic_pinned(extra)
    for psi in cases:
        ext = extremal_lattices(psi)
        target = floor(newton_from_psi(psi)(psi.c))
        pe = ext.p_exponents
        tag = f"p={psi.p} {psi.describe()}"
        if not pe["M_+/M_-"] == pe["M/M_-"] == pe["M_+/M"] == target:
            failures.append(f"{tag}: p-exponents {pe} vs {target}")
        if ext.lengths["M_+/M_-"] != 2 * ext.lengths["M/M_-"]:
            failures.append(f"{tag}: lengths {ext.lengths}")
        values[tag] = (tuple(sorted(pe.items())), tuple(sorted(ext.lengths.items())),
                       ext.M_minus, ext.M_plus)
    if len(cases) < 10:
        failures.append(f"only {len(cases)} isoclinic pinned presentations")
    return _result("extremal-lattices", 5, failures,
                   f"three p-exponents agree and lengths are 2:1 on {len(cases)} isoclinic modules",
                   values)


# -- 6: isogeny cutoff -------------------------------------------------------------


def check_isogeny_cutoff(extra=0, **_):
    failures, values = [], {}
    for psi in pinned_presentations(extra):
        nu = newton_from_psi(psi)
        j = isogeny_cutoff_bound(nu)
        tag = f"p={psi.p} {psi.describe()}"
        try:
            value, witness = isogeny_cutoff_exact(psi)
        except PdivError as exc:
            failures.append(f"{tag}: {exc}")
            continue
        if value != j:
            failures.append(f"{tag}: value {value} != j(nu) = {j}")
        if j > 1:
            if witness is None or newton_from_psi(witness) == nu:
                failures.append(f"{tag}: witness keeps the polygon")
            elif not agrees_to_level(psi, witness, j - 1):
                failures.append(f"{tag}: witness differs below level j-1")
        values[tag] = (value, None if witness is None else witness.describe())
    return _result("isogeny-cutoff", 6, failures,
                   f"b = j(nu) with polygon-changing witnesses on {len(PINNED)} presentations",
                   values)


# -- 7: formula layer --------------------------------------------------------------


def random_polygon(rng, h_max=10):
    """Random polygon built from isoclinic pieces of total height at most h_max."""
    pieces = []
    total = rng.randint(1, h_max)
    left = total
    while left:
        hj = rng.randint(1, left)
        dj = rng.randint(0, hj)
        pieces.append((Fraction(dj, hj), hj))
        left -= hj
    return NewtonPolygon(sorted(pieces))


def check_formulas(seed=0, **_):
    failures = []
    for h in range(21):
        if Nh(h) != h // 2:
            failures.append(f"Nh({h}) = {Nh(h)}")
    rng = random.Random(seed)
    for k in range(100):
        nu1, nu2 = random_polygon(rng), random_polygon(rng)
        chain = hom_bound_chain(nu1, nu2)
        if any(x > y for x, y in zip(chain, chain[1:])):
            failures.append(f"pair {k}: chain {[str(x) for x in chain]} not monotone")
        for s, lhs, rhs in common_slope_identity(nu1, nu2):
            if lhs != rhs:
                failures.append(f"pair {k}: slope {s}: {lhs} != {rhs}")
    for c, d in [(1, 0), (0, 1), (2, 3), (3, 0)]:
        ordinary = NewtonPolygon.ordinary(c, d)
        other = random_polygon(rng)
        if hom_number_bound(ordinary, other) != 0 or hom_number_bound(other, ordinary) != 0:
            failures.append(f"ordinary ({c},{d}) gives a nonzero bound")
    return _result("formulas", 7, failures,
                   "Nh for h <= 20; bound chain monotone and common-slope identity on 100 pairs")


# -- 8: Newton polygon cross-validation --------------------------------------------


def check_newton_cross(seed=0, **_):
    failures = []
    rng = random.Random(seed)
    count = 0
    while count < 50:
        p, n = rng.choice([2, 3]), rng.choice([1, 2])
        h = rng.randint(2, 6)
        c = rng.randint(1, h - 1)
        R = ring_create(p, n, n * (h - c) + 6)
        psi = random_presentation(R, c, h - c, rng, max_val=3)
        a, b = newton_from_psi(psi), newton_from_module(from_cyclic(psi))
        if a != b:
            failures.append(f"p={p} n={n} {psi.describe()}: {a} vs {b}")
        count += 1
    return _result("newton-cross", 8, failures,
                   "characteristic-polynomial polygon equals presentation polygon on 50 modules")


# -- 9: gamma experiment -----------------------------------------------------------


def check_gamma(budget="default", **_):
    cfg = BUDGETS[budget]
    R = ring_create(2, 1, BASE_N)
    failures, inconclusive = [], []
    details = []
    for c, d, expected in [(1, 1, 1), (2, 2, 2)]:
        psi = CyclicPresentation.standard(R, c, d)
        v = cross_check(psi, m_max=3, r_max=cfg["r_max"], work_bound=cfg["work_bound"])
        tag = psi.describe()
        if v.status == "inconclusive":
            inconclusive.append(f"{tag}: {v.reason}")
            continue
        prof = v.profile
        if not prof.monotone:
            failures.append(f"{tag}: gamma not monotone")
        if v.f_detected != expected or v.ell != expected:
            failures.append(f"{tag}: f={v.f_detected}, ell={v.ell}, expected {expected}")
        details.append(f"{tag}: f = ell = {v.f_detected}")
    if failures:
        return _result("gamma", 9, failures, "")
    if inconclusive:
        return CheckResult("gamma", 9, "inconclusive", "; ".join(inconclusive))
    return CheckResult("gamma", 9, "pass", "; ".join(details))


# -- 10: kernel-count oracle -------------------------------------------------------


def random_operator(rng, max_log2=11):
    """Random sum of semilinear terms with a small enough search space."""
    while True:
        p, n = rng.choice([2, 3]), rng.choice([1, 1, 2])
        h, m, r = rng.randint(1, 3), rng.randint(1, 2), rng.randint(1, 2)
        if (p ** (n * r * h * m)).bit_length() - 1 <= max_log2:
            break
    R = ring_create(p, n, m + rng.randint(0, 1))
    terms = []
    for _ in range(rng.randint(1, 3)):
        A = [[R.random(rng) * R.p_power(rng.choice([0, 0, 1])) for _ in range(h)]
             for _ in range(h)]
        terms.append(SemilinearMap(R, A, rng.randint(-2, 2)))
    return terms, m, r


def check_kernel_oracle(seed=0, instances=200, **_):
    failures = []
    rng = random.Random(seed)
    for k in range(instances):
        terms, m, r = random_operator(rng)
        fast = semilinear_kernel_count(terms, m, r)
        slow = kernel_count_bruteforce(terms, m, r)
        if fast != slow:
            failures.append(f"instance {k}: linearized {fast} != enumerated {slow}")
    return _result("kernel-oracle", 10, failures,
                   f"linearized kernel count equals enumeration on {instances} operators")


# -- 11: precision robustness ------------------------------------------------------


EXACT_CHECKS = None  # filled below


def check_precision(**_):
    failures = []
    for fn in EXACT_CHECKS:
        base = fn(extra=0)
        more = fn(extra=4)
        if base.status != more.status:
            failures.append(f"{base.name}: status {base.status} -> {more.status}")
        if _normalize(base.values) != _normalize(more.values):
            failures.append(f"{base.name}: values differ at N+4")
    return _result("precision", 11, failures,
                   "criteria 1-6 give identical exact results at N+4")


def _normalize(values):
    """Exact values with lattices reduced to precision-free data."""
    def norm(x):
        if isinstance(x, Lattice):
            return (x.offset, x.exponents, tuple(tuple(v.coeffs for v in row) for row in x.basis))
        if isinstance(x, tuple):
            return tuple(norm(y) for y in x)
        return x
    return {k: norm(v) for k, v in values.items()}


# -- 12: sweep ---------------------------------------------------------------------


def check_sweep(**_):
    rows = sweep(p=2, n=1, h_max=5)
    failures = [f"row {i}: {what}" for i, what in sandwich_violations(rows)]
    marked = [r for r in rows if r["status"] != "ok"]
    if marked:
        failures.append(f"{len(marked)} rows could not be computed")
    iso = sum(1 for r in rows if r["isoclinic"])
    return _result("sweep", 12, failures,
                   f"{len(rows)} presentations with h <= 5 ({iso} isoclinic) satisfy the bounds")


EXACT_CHECKS = [check_power_family, check_traverso, check_intermediate, check_minimal_height,
                check_extremal, check_isogeny_cutoff]

CHECKS = {
    "power-family": check_power_family,
    "traverso": check_traverso,
    "intermediate": check_intermediate,
    "minimal-height": check_minimal_height,
    "extremal-lattices": check_extremal,
    "isogeny-cutoff": check_isogeny_cutoff,
    "formulas": check_formulas,
    "newton-cross": check_newton_cross,
    "gamma": check_gamma,
    "kernel-oracle": check_kernel_oracle,
    "precision": check_precision,
    "sweep": check_sweep,
}


def run_check(name, budget="default", seed=0):
    fn = CHECKS[name]
    try:
        return fn(budget=budget, seed=seed)
    except BudgetError as exc:
        k = list(CHECKS).index(name) + 1
        return CheckResult(name, k, "inconclusive", str(exc))


def verify_all(only=None, budget="default", seed=0):
    names = list(CHECKS) if not only else list(only)
    for name in names:
        if name not in CHECKS:
            raise KeyError(f"unknown check '{name}'; choose from {', '.join(CHECKS)}")
    return [run_check(name, budget, seed) for name in names]
