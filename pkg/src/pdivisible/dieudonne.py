"""Dieudonne modules as pairs of semilinear matrices.

A module of rank h carries a sigma-linear F and a sigma^{-1}-linear V with
FV = VF = p.  Modules of a-number one come from a cyclic presentation

    Psi = sum_{i=0}^{c} a_i F^{c-i} + sum_{i=1}^{d} b_i V^i,   Psi z = 0,

written on the ordered basis (F z, ..., F^c z, z, V z, ..., V^{d-1} z).
"""

from fractions import Fraction
from math import gcd

from .errors import PrecisionError, PresentationError, RingMismatchError
from .newton import NewtonPolygon, hull_from_points
from .semilinear import (
    SemilinearMap,
    block_diagonal,
    is_scalar_p_identity,
    mat_frob,
    mat_transpose,
    mat_zero,
    rank_mod_p,
)
from .witt import SATURATED, ring_create


def parse_scalar(ring, obj):
    """JSON scalar: a bare integer k is k*1, a list gives polynomial-basis digits."""
    if isinstance(obj, bool):
        raise PresentationError("booleans are not scalars")
    if isinstance(obj, int):
        return ring(obj)
    if isinstance(obj, list):
        if len(obj) > ring.n or not all(isinstance(x, int) and not isinstance(x, bool) for x in obj):
            raise PresentationError(f"scalar digits {obj!r} must be at most {ring.n} integers")
        return ring(list(obj) + [0] * (ring.n - len(obj)))
    raise PresentationError(f"cannot read scalar from {obj!r}")


class CyclicPresentation:
    """The operator Psi of a module with a-number one."""

    __slots__ = ("ring", "c", "d", "a", "b")

    def __init__(self, ring, c, d, a, b):
        if c < 1 or d < 1:
            raise PresentationError("c and d must be positive")
        if len(a) != c + 1:
            raise PresentationError(f"a must have c+1 = {c + 1} entries, got {len(a)}")
        if len(b) != d:
            raise PresentationError(f"b must have d = {d} entries, got {len(b)}")
        self.ring = ring
        self.c = c
        self.d = d
        self.a = tuple(ring(x) for x in a)
        self.b = tuple(ring(x) for x in b)
        if not self.a[0].is_unit():
            raise PresentationError("a_0 must be a unit")
        if not self.b[-1].is_unit():
            raise PresentationError("b_d must be a unit")
        for name, coeffs in (("a", self.a[1:]), ("b", self.b[:-1])):
            for i, x in enumerate(coeffs, start=1):
                if x.is_unit():
                    raise PresentationError(f"{name}_{i} must be divisible by p")

    @property
    def h(self):
        return self.c + self.d

    @property
    def p(self):
        return self.ring.p

    @classmethod
    def standard(cls, ring, c, d, extra=None):
        """F^c + V^d plus optional ``{('a'|'b', i): value}`` terms."""
        a = [ring.one] + [ring.zero] * c
        b = [ring.zero] * (d - 1) + [ring.one]
        for (kind, i), val in (extra or {}).items():
            if kind == "a":
                a[i] = a[i] + ring(val)
            else:
                b[i - 1] = b[i - 1] + ring(val)
        return cls(ring, c, d, a, b)

    def with_precision(self, N):
        R = self.ring.with_precision(N)
        return CyclicPresentation(R, self.c, self.d, [R(x.coeffs) for x in self.a],
                                  [R(x.coeffs) for x in self.b])

    def replace(self, a=None, b=None):
        return CyclicPresentation(self.ring, self.c, self.d,
                                  self.a if a is None else a, self.b if b is None else b)

    def newton(self):
        return newton_from_psi(self)

    def __eq__(self, other):
        return (isinstance(other, CyclicPresentation) and self.ring == other.ring
                and self.a == other.a and self.b == other.b)

    def __hash__(self):
        return hash((self.ring.key, self.a, self.b))

    def __repr__(self):
        return f"CyclicPresentation({self.describe()})"

    def describe(self):
        """Readable operator, e.g. ``F^6 + 2F^2 + V^2``."""
        terms = []

        def coeff(x):
            if x == self.ring.one:
                return ""
            if self.ring.n == 1:
                return str(x.coeffs[0])
            return repr(x)

        for i, x in enumerate(self.a):
            if x:
                e = self.c - i
                mono = "" if e == 0 else ("F" if e == 1 else f"F^{e}")
                terms.append((coeff(x) + mono) or "1")
        for i, x in enumerate(self.b, start=1):
            if x:
                terms.append(coeff(x) + ("V" if i == 1 else f"V^{i}"))
        return " + ".join(terms)

    def to_json(self):
        return {"p": self.ring.p, "n": self.ring.n, "N": self.ring.N, "c": self.c, "d": self.d,
                "a": [x.to_json() for x in self.a], "b": [x.to_json() for x in self.b]}

    @classmethod
    def from_json(cls, obj, N=None):
        if not isinstance(obj, dict):
            raise PresentationError("presentation must be a JSON object")
        for key in ("p", "c", "d", "a", "b"):
            if key not in obj:
                raise PresentationError(f"presentation is missing field '{key}'")
        for key in ("p", "n", "N", "c", "d"):
            if key in obj and (not isinstance(obj[key], int) or isinstance(obj[key], bool)):
                raise PresentationError(f"field '{key}' must be an integer")
        if not isinstance(obj["a"], list) or not isinstance(obj["b"], list):
            raise PresentationError("fields 'a' and 'b' must be arrays")
        p, n = obj["p"], obj.get("n", 1)
        N = N if N is not None else obj.get("N", 2 * (obj["c"] + obj["d"]) + 2)
        try:
            ring = ring_create(p, n, N)
        except ValueError as exc:
            raise PresentationError(f"field 'p'/'n'/'N': {exc}") from exc
        try:
            a = [parse_scalar(ring, x) for x in obj["a"]]
            b = [parse_scalar(ring, x) for x in obj["b"]]
        except PresentationError as exc:
            raise PresentationError(f"field 'a'/'b': {exc}") from exc
        return cls(ring, obj["c"], obj["d"], a, b)


def random_presentation(ring, c, d, rng, max_val=2, density=0.5):
    """Random valid presentation; inner coefficients are p^k * random units or zero."""
    def inner():
        if rng.random() > density:
            return ring.zero
        k = rng.randint(1, max_val)
        return ring.p_power(k) * ring.random(rng, unit=True)

    a = [ring.random(rng, unit=True)] + [inner() for _ in range(c)]
    b = [inner() for _ in range(d - 1)] + [ring.random(rng, unit=True)]
    return CyclicPresentation(ring, c, d, a, b)


# -- modules -----------------------------------------------------------------------


class DieudonneModule:
    """Free W-module with F = (Fmat, +1) and V = (Vmat, -1)."""

    def __init__(self, ring, F, V, provenance=None, check=True):
        if not isinstance(F, SemilinearMap):
            F = SemilinearMap(ring, F, 1)
        if not isinstance(V, SemilinearMap):
            V = SemilinearMap(ring, V, -1)
        if F.twist != 1 or V.twist != -1:
            raise PresentationError("F must have twist +1 and V twist -1")
        self.ring = ring
        self.F = F
        self.V = V
        self.provenance = provenance
        if check:
            self.check_relations()

    def check_relations(self):
        if not (is_scalar_p_identity(self.F.compose(self.V).matrix())
                and is_scalar_p_identity(self.V.compose(self.F).matrix())):
            raise PresentationError("F and V do not satisfy FV = VF = p")

    @property
    def h(self):
        return self.F.rows

    @property
    def c(self):
        return rank_mod_p(self.F.matrix())

    @property
    def d(self):
        return self.h - self.c

    def a_number(self):
        joined = [list(rf) + list(rv) for rf, rv in zip(self.F.A, self.V.A)]
        return self.h - rank_mod_p(joined)

    def is_binilpotent(self):
        for op in (self.F, self.V):
            Q = op.power(self.h).matrix()
            if any(x.valuation() == 0 for row in Q for x in row):
                return False
        return True

    def newton(self):
        return newton_from_module(self)

    def is_isoclinic(self):
        return self.newton().is_isoclinic()

    def with_precision(self, N):
        R = self.ring.with_precision(N)
        lift = lambda A: [[R(x.coeffs) for x in row] for row in A]
        prov = self.provenance
        if isinstance(prov, CyclicPresentation):
            prov = prov.with_precision(N)
        return DieudonneModule(R, SemilinearMap(R, lift(self.F.A), 1),
                               SemilinearMap(R, lift(self.V.A), -1), prov)

    def to_json(self):
        return {"p": self.ring.p, "n": self.ring.n, "N": self.ring.N, "h": self.h,
                "F": self.F.to_json()["rows"], "V": self.V.to_json()["rows"]}

    def __repr__(self):
        return f"DieudonneModule(h={self.h}, p={self.ring.p}, n={self.ring.n}, N={self.ring.N})"


def _cyclic_matrices(psi):
    R = psi.ring
    c, d, h = psi.c, psi.d, psi.h
    p = R.p_power(1)
    Fm = mat_zero(R, h, h)
    Vm = mat_zero(R, h, h)
    z = c

    def fpos(k):  # F^k z for k = 0..c
        return z if k == 0 else k - 1

    def vpos(k):  # V^k z for k = 0..d-1
        return z + k

    # F on F^k z, k = 0..c-1
    for k in range(c):
        Fm[fpos(k + 1)][fpos(k)] = R.one
    # F^{c+1} z from F(Psi z) = 0
    s = [x.frobenius(1) for x in psi.a]
    u = -s[0].inverse()
    col = fpos(c)
    for i in range(1, c + 1):
        Fm[fpos(c - i + 1)][col] = Fm[fpos(c - i + 1)][col] + u * s[i]
    for i in range(1, d + 1):
        Fm[vpos(i - 1)][col] = Fm[vpos(i - 1)][col] + u * psi.b[i - 1].frobenius(1) * p
    # F V^k z = p V^{k-1} z
    for k in range(1, d):
        Fm[vpos(k - 1)][vpos(k)] = p
    # V on V^k z, k = 0..d-2
    for k in range(d - 1):
        Vm[vpos(k + 1)][vpos(k)] = R.one
    # V^d z from Psi z = 0
    w = -psi.b[-1].inverse()
    col = vpos(d - 1)
    for i in range(c + 1):
        Vm[fpos(c - i)][col] = Vm[fpos(c - i)][col] + w * psi.a[i]
    for i in range(1, d):
        Vm[vpos(i)][col] = Vm[vpos(i)][col] + w * psi.b[i - 1]
    # V F^k z = p F^{k-1} z
    for k in range(1, c + 1):
        Vm[fpos(k - 1)][fpos(k)] = p
    return Fm, Vm


def from_cyclic(psi):
    Fm, Vm = _cyclic_matrices(psi)
    return DieudonneModule(psi.ring, SemilinearMap(psi.ring, Fm, 1),
                           SemilinearMap(psi.ring, Vm, -1), provenance=psi)


def basis_index(psi, kind, k):
    """Column index of F^k z (kind 'F', 0 <= k <= c) or V^k z (kind 'V', 0 <= k < d)."""
    if kind == "F":
        if not 0 <= k <= psi.c:
            raise ValueError("F-power out of range")
        return psi.c if k == 0 else k - 1
    if not 0 <= k < psi.d:
        raise ValueError("V-power out of range")
    return psi.c + k


def psi_points(psi):
    pts = [(j - psi.c, psi.a[j].valuation()) for j in range(psi.c + 1)]
    for i, bi in enumerate(psi.b, start=1):
        v = bi.valuation()
        pts.append((i, SATURATED if v is SATURATED else v + i))
    return pts


def newton_from_psi(psi):
    return hull_from_points(psi_points(psi)).to_polygon()


# -- characteristic polynomial route -----------------------------------------------


def charpoly(A):
    """Coefficients (highest degree first) of det(tI - A), division free."""
    R = A[0][0].ring
    n = len(A)
    C = [R.one, -A[0][0]]
    for r in range(1, n):
        Rrow = A[r][:r]
        S = [A[i][r] for i in range(r)]
        Q = [R.one, -A[r][r]]
        vec = S
        for _ in range(r):
            acc = R.zero
            for x, y in zip(Rrow, vec):
                if x and y:
                    acc = acc + x * y
            Q.append(-acc)
            vec = [sum((A[i][j] * vec[j] for j in range(r) if A[i][j] and vec[j]), R.zero)
                   for i in range(r)]
        new = []
        for i in range(r + 2):
            acc = R.zero
            for j in range(min(i, r) + 1):
                if Q[i - j] and C[j]:
                    acc = acc + Q[i - j] * C[j]
            new.append(acc)
        C = new
    return C


def newton_from_module(M):
    """Slopes of F from the characteristic polynomial of the linear map F^n."""
    n = M.ring.n
    Fn = M.F.power(n)
    coeffs = charpoly(Fn.matrix())
    h = M.h
    pts = [(k, coeffs[k].valuation()) for k in range(h + 1)]
    if pts[-1][1] is SATURATED:
        raise PrecisionError("det F^n vanishes at working precision",
                             suggested_N=M.ring.N + n * h)
    hull = hull_from_points(pts)
    return NewtonPolygon([(s / n, m) for s, m in hull.segments()])


# -- explicit modules --------------------------------------------------------------


def minimal_module(ring, cj, dj, mult=1):
    """mult copies of the simple minimal module of slope dj/(cj+dj)."""
    if cj < 0 or dj < 0 or cj + dj < 1 or mult < 1:
        raise PresentationError("need cj, dj >= 0, cj + dj >= 1, mult >= 1")
    if gcd(cj, dj) != 1:
        raise PresentationError(f"(cj, dj) = ({cj}, {dj}) are not coprime")
    h = cj + dj
    p = ring.p_power(1)

    def shift(k):
        blk = mat_zero(ring, h, h)
        for i in range(h):
            t = i + k
            blk[t % h][i] = ring.one if t < h else p
        return blk

    Fm = block_diagonal(ring, [shift(dj)] * mult)
    Vm = block_diagonal(ring, [shift(cj)] * mult)
    return DieudonneModule(ring, SemilinearMap(ring, Fm, 1), SemilinearMap(ring, Vm, -1),
                           provenance=("minimal", cj, dj, mult))


def direct_sum(M1, M2):
    if M1.ring != M2.ring:
        raise RingMismatchError("direct sum across rings")
    R = M1.ring
    Fm = block_diagonal(R, [M1.F.matrix(), M2.F.matrix()])
    Vm = block_diagonal(R, [M1.V.matrix(), M2.V.matrix()])
    return DieudonneModule(R, SemilinearMap(R, Fm, 1), SemilinearMap(R, Vm, -1),
                           provenance=("sum", M1.provenance, M2.provenance))


def dual(M):
    """Dual module: F acts by sigma(V)^T, V by sigma^{-1}(F)^T."""
    R = M.ring
    Fd = mat_transpose(mat_frob(M.V.matrix(), 1))
    Vd = mat_transpose(mat_frob(M.F.matrix(), -1))
    return DieudonneModule(R, SemilinearMap(R, Fd, 1), SemilinearMap(R, Vd, -1),
                           provenance=("dual", M.provenance))


def psi_with_polygon(ring, nu):
    """Presentation whose coefficient valuations sit on nu exactly at its breakpoints."""
    if not nu.is_binilpotent() or nu.h < 2:
        raise PresentationError("polygon must be bi-nilpotent with h >= 2")
    c, d = nu.c, nu.d
    a = [ring.one] + [ring.zero] * c
    b = [ring.zero] * (d - 1) + [ring.one]
    for t, y in nu.breakpoints()[1:-1]:
        y = int(y)
        if y >= ring.N:
            raise PrecisionError(f"breakpoint value {y} not representable at N={ring.N}",
                                 suggested_N=y + 2)
        if t <= c:
            a[t] = ring.p_power(y)
        else:
            b[t - c - 1] = ring.p_power(y - (t - c))
    return CyclicPresentation(ring, c, d, a, b)


def apply_operator(M, psi, x):
    """Evaluate Psi (as a polynomial in F, V) on an element x of M."""
    R = M.ring
    out = [R.zero] * M.h
    cur = list(x)
    powers = [cur]
    for _ in range(psi.c):
        cur = M.F.apply(cur)
        powers.append(cur)
    for i, ai in enumerate(psi.a):
        if ai:
            out = [o + ai * y for o, y in zip(out, powers[psi.c - i])]
    cur = list(x)
    for i, bi in enumerate(psi.b, start=1):
        cur = M.V.apply(cur)
        if bi:
            out = [o + bi * y for o, y in zip(out, cur)]
    return out


def unit_vector(ring, h, i):
    return [ring.one if j == i else ring.zero for j in range(h)]


def slope_of(nu):
    if not nu.is_isoclinic():
        raise PresentationError("polygon is not isoclinic")
    return Fraction(nu.segments[0][0])


__all__ = [
    "CyclicPresentation", "DieudonneModule", "apply_operator", "basis_index", "charpoly",
    "direct_sum", "dual", "from_cyclic", "minimal_module", "newton_from_module",
    "newton_from_psi", "parse_scalar", "psi_points", "psi_with_polygon", "random_presentation",
    "slope_of", "unit_vector",
]
