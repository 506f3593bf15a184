"""Semilinear maps and lattices over W_N(F_{p^n}).

Matrices are lists of rows of :class:`~pdivisible.witt.WittScalar`.  A
:class:`SemilinearMap` ``(A, s)`` acts by ``x -> A * sigma^s(x)``.  A
:class:`Lattice` is ``p^offset`` times the column span of a basis matrix kept in
canonical (lower-triangular Hermite) form, so lattice equality is structural
equality.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from .errors import BudgetError, PrecisionError, RingMismatchError
from .witt import SATURATED, WittScalar, ring_create

DEFAULT_GUARD = 2
DEFAULT_WORK_BOUND = 4096


# -- matrix helpers ----------------------------------------------------------------


def mat_identity(ring, h):
    one, zero = ring.one, ring.zero
    return [[one if i == j else zero for j in range(h)] for i in range(h)]


def mat_zero(ring, rows, cols):
    zero = ring.zero
    return [[zero] * cols for _ in range(rows)]


def mat_mul(A, B):
    if not A:
        return []
    ring = A[0][0].ring
    R = ring._mul
    add = ring._add
    zero = ring._zero
    cols = len(B[0])
    Bc = [[row[j].coeffs for row in B] for j in range(cols)]
    out = []
    for row in A:
        rc = [x.coeffs for x in row]
        new = []
        for col in Bc:
            acc = zero
            for a, b in zip(rc, col):
                if any(a) and any(b):
                    acc = add(acc, R(a, b))
            new.append(WittScalar(ring, acc))
        out.append(new)
    return out


def mat_vec(A, x):
    return [row[0] for row in mat_mul(A, [[v] for v in x])]


def mat_frob(A, s):
    if s % A[0][0].ring.n == 0:
        return [list(row) for row in A]
    return [[x.frobenius(s) for x in row] for row in A]


def mat_scale(A, c):
    return [[c * x for x in row] for row in A]


def mat_add(A, B):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_transpose(A):
    return [list(col) for col in zip(*A)]


def mat_coerce(ring, A):
    return [[ring(x) for x in row] for row in A]


def block_diagonal(ring, blocks):
    size = sum(len(b) for b in blocks)
    out = mat_zero(ring, size, size)
    k = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[k + i][k + j] = x
        k += len(b)
    return out


def is_scalar_p_identity(A, e=1):
    """True when A equals p^e times the identity exactly."""
    ring = A[0][0].ring
    target = ring.p_power(e)
    return all(x == (target if i == j else ring.zero)
               for i, row in enumerate(A) for j, x in enumerate(row))


@dataclass(frozen=True)
class SemilinearMap:
    """The map ``x -> A sigma^twist(x)`` on column vectors."""

    ring: object
    A: tuple
    twist: int = 0

    def __post_init__(self):
        object.__setattr__(self, "A", tuple(tuple(self.ring(x) for x in row) for row in self.A))

    @property
    def rows(self):
        return len(self.A)

    @property
    def cols(self):
        return len(self.A[0]) if self.A else 0

    @classmethod
    def identity(cls, ring, h, twist=0):
        return cls(ring, mat_identity(ring, h), twist)

    def matrix(self):
        return [list(row) for row in self.A]

    def apply(self, x):
        x = [v.frobenius(self.twist) for v in x]
        return mat_vec(self.matrix(), x)

    def compose(self, other):
        """``self o other`` = (A sigma^s(B), s + t)."""
        if self.ring != other.ring:
            raise RingMismatchError("compose across rings")
        B = mat_frob(other.matrix(), self.twist)
        return SemilinearMap(self.ring, mat_mul(self.matrix(), B), self.twist + other.twist)

    __matmul__ = compose

    def power(self, k):
        out = SemilinearMap.identity(self.ring, self.rows)
        for _ in range(k):
            out = self.compose(out)
        return out

    def scaled(self, c):
        return SemilinearMap(self.ring, mat_scale(self.matrix(), self.ring(c)), self.twist)

    def frobenius_conjugate(self, s):
        return SemilinearMap(self.ring, mat_frob(self.matrix(), s), self.twist)

    def transpose(self):
        return SemilinearMap(self.ring, mat_transpose(self.matrix()), self.twist)

    def to_json(self):
        return {"twist": self.twist, "rows": [[x.to_json() for x in row] for row in self.A]}


# -- Smith reduction ---------------------------------------------------------------


@dataclass
class SmithResult:
    exponents: list
    U: list
    V: list


def smith_reduce(mat, allow_zero=False):
    """Smith reduction over the local ring W_N.

    Returns exponents ``e_1 <= ... `` and invertible U, V with ``U mat V`` equal
    to ``diag(p^e_i)`` modulo p^N.  Pivots are chosen by lowest valuation, then
    lowest row, then lowest column.  With ``allow_zero`` the trailing pivots
    that vanish at working precision are reported as ``SATURATED`` instead of
    raising.  The transforms are only exact modulo p^(N - max exponent).
    """
    ring = mat[0][0].ring
    rows, cols = len(mat), len(mat[0])
    A = [list(r) for r in mat]
    U = mat_identity(ring, rows)
    V = mat_identity(ring, cols)
    exps = []
    for t in range(min(rows, cols)):
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                v = A[i][j].valuation()
                if v is SATURATED:
                    continue
                if best is None or v < best[0]:
                    best = (v, i, j)
                    if v == 0:
                        break
            if best is not None and best[0] == 0:
                break
        if best is None:
            if not allow_zero:
                raise PrecisionError(
                    "Smith pivot search met only vanishing entries", suggested_N=ring.N + 4)
            exps.extend([SATURATED] * (min(rows, cols) - t))
            break
        e, i, j = best
        A[t], A[i] = A[i], A[t]
        U[t], U[i] = U[i], U[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        for row in V:
            row[t], row[j] = row[j], row[t]
        u_inv = A[t][t].divide_by_p_power(e).inverse()
        A[t] = [u_inv * x for x in A[t]]
        U[t] = [u_inv * x for x in U[t]]
        for i2 in range(t + 1, rows):
            if A[i2][t]:
                f = A[i2][t].divide_by_p_power(e)
                A[i2] = [x - f * y for x, y in zip(A[i2], A[t])]
                U[i2] = [x - f * y for x, y in zip(U[i2], U[t])]
        for j2 in range(t + 1, cols):
            if A[t][j2]:
                f = A[t][j2].divide_by_p_power(e)
                for row in A:
                    row[j2] = row[j2] - f * row[t]
                for row in V:
                    row[j2] = row[j2] - f * row[t]
        exps.append(e)
    return SmithResult(exps, U, V)


def rank_mod_p(mat):
    """Rank of the reduction mod p over the residue field."""
    exps = smith_reduce(mat, allow_zero=True).exponents
    return sum(1 for e in exps if e is not SATURATED and e == 0)


# -- lattices ----------------------------------------------------------------------


def _columns(mat):
    return [list(c) for c in zip(*mat)]


def _hermite(ring, cols, h, guard):
    """Canonical lower-triangular Hermite basis of span(cols) + p^N W^h.

    ``cols`` are columns over ``ring``; returns (exponents, canonical columns).
    """
    cols = [list(c) for c in cols]
    exps = []
    for i in range(h):
        best = None
        for j in range(i, len(cols)):
            v = cols[j][i].valuation()
            if v is not SATURATED and (best is None or v < best[0]):
                best = (v, j)
                if v == 0:
                    break
        if best is None:
            raise PrecisionError(
                f"lattice lost rank at row {i} (rank drop or precision exhausted at N={ring.N})",
                suggested_N=ring.N + 4)
        e, j = best
        if e > ring.N - guard:
            raise PrecisionError(
                f"pivot exponent {e} exceeds precision budget N - guard = {ring.N - guard}",
                suggested_N=e + guard + 4)
        cols[i], cols[j] = cols[j], cols[i]
        piv = cols[i]
        u_inv = piv[i].divide_by_p_power(e).inverse()
        piv = [u_inv * x for x in piv]
        cols[i] = piv
        for j2 in range(i + 1, len(cols)):
            x = cols[j2][i]
            if x:
                f = x.divide_by_p_power(e)
                cols[j2] = [a - f * b for a, b in zip(cols[j2], piv)]
        exps.append(e)
    cols = cols[:h]
    zero = ring.zero
    for j in range(h):
        col = cols[j]
        for i in range(j):
            col[i] = zero
        col[j] = ring.p_power(exps[j])
    for j in range(h):
        for i in range(j + 1, h):
            t = cols[j][i].quotient(exps[i])
            if t:
                cols[j] = [a - t * b for a, b in zip(cols[j], cols[i])]
            cols[j][i] = cols[j][i].reduce(exps[i])
    return exps, cols


class Lattice:
    """A full-rank W-lattice ``p^offset * span(basis columns)`` in B(k)^h.

    Instances are canonical: the basis is lower triangular with diagonal
    ``p^exponents[i]``, entries below the diagonal reduced modulo the pivot of
    their row, and the smallest entry valuation equal to zero.
    """

    __slots__ = ("ring", "h", "offset", "exponents", "basis", "_key")

    def __init__(self, ring, h, offset, exponents, basis):
        self.ring = ring
        self.h = h
        self.offset = offset
        self.exponents = tuple(exponents)
        self.basis = tuple(tuple(row) for row in basis)
        self._key = (offset, tuple(tuple(x.coeffs for x in row) for row in self.basis))

    @classmethod
    def from_columns(cls, ring, cols, offset=0, guard=DEFAULT_GUARD):
        """Lattice spanned by ``p^offset`` times the given column vectors."""
        cols = [[ring(x) for x in c] for c in cols]
        h = len(cols[0])
        alpha = None
        for c in cols:
            for x in c:
                v = x.valuation()
                if v is not SATURATED and (alpha is None or v < alpha):
                    alpha = v
        if alpha is None:
            raise PrecisionError("all generators vanish at working precision",
                                 suggested_N=ring.N + 4)
        prec = ring.N - alpha
        low = ring.with_precision(prec)
        cols = [[low(x.divide_by_p_power(alpha).coeffs) for x in c] for c in cols]
        exps, canon = _hermite(low, cols, h, guard)
        basis = [[ring(canon[j][i].coeffs) for j in range(h)] for i in range(h)]
        return cls(ring, h, offset + alpha, exps, basis)

    @classmethod
    def from_matrix(cls, ring, mat, offset=0, guard=DEFAULT_GUARD):
        return cls.from_columns(ring, _columns(mat), offset, guard)

    @classmethod
    def standard(cls, ring, h):
        return cls(ring, h, 0, [0] * h, mat_identity(ring, h))

    @classmethod
    def diagonal(cls, ring, exps):
        """Lattice spanned by ``p^exps[i] e_i``; exponents may be negative."""
        o = min(exps)
        h = len(exps)
        basis = mat_zero(ring, h, h)
        for i, e in enumerate(exps):
            basis[i][i] = ring.p_power(e - o)
        return cls.from_matrix(ring, basis, offset=o)

    def matrix(self):
        return [list(r) for r in self.basis]

    def columns(self):
        return _columns(self.basis)

    def scale(self, k):
        """p^k L."""
        return Lattice(self.ring, self.h, self.offset + k, self.exponents, self.basis)

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.ring == other.ring and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"Lattice(h={self.h}, offset={self.offset}, exponents={list(self.exponents)})"

    def normalized_key(self):
        """Key of the lattice up to p-power scaling."""
        return self._key[1]

    def to_json(self):
        return {"p_offset": self.offset,
                "rows": [[x.to_json() for x in row] for row in self.basis]}

    # -- comparisons --------------------------------------------------------------

    def issubset(self, other):
        return lattice_exponents(self, other)[0] >= 0

    def __le__(self, other):
        return self.issubset(other)

    def __add__(self, other):
        return lattice_sum(self, other)

    def __and__(self, other):
        return lattice_intersection(self, other)


def _scaled_inverse(ring, H, exps):
    """Return (S, p^S H^{-1}) for a canonical lower-triangular H over ``ring``.

    The result is exact modulo p^(ring.N - S).
    """
    h = len(H)
    S = sum(exps)
    pS = ring.p_power(S)
    inv_cols = []
    for k in range(h):
        y = [pS if i == k else ring.zero for i in range(h)]
        t = [ring.zero] * h
        for i in range(h):
            acc = y[i]
            for j in range(i):
                if H[i][j] and t[j]:
                    acc = acc - H[i][j] * t[j]
            t[i] = acc.divide_by_p_power(exps[i]) if exps[i] else acc
        inv_cols.append(t)
    return S, [[inv_cols[j][i] for j in range(h)] for i in range(h)]


def relative_exponents(L1, L2):
    """Smith exponents of L1 relative to L2 (elementary divisors of H2^{-1} H1)."""
    if L1.ring != L2.ring or L1.h != L2.h:
        raise RingMismatchError("lattices live in different ambient spaces")
    shift = L1.offset - L2.offset
    if all(e == 0 for e in L2.exponents):
        # H2 is the identity
        mat = L1.matrix()
        return [shift + e for e in smith_reduce(mat).exponents]
    S = sum(L2.exponents)
    S1 = sum(L1.exponents)
    big = L1.ring.with_precision(L1.ring.N + 2 * S + S1 + 4)
    H2 = mat_coerce(big, L2.matrix())
    H1 = mat_coerce(big, L1.matrix())
    _, inv = _scaled_inverse(big, H2, L2.exponents)
    T = mat_mul(inv, H1)
    work = big.with_precision(big.N - S)
    T = mat_coerce(work, [[x.coeffs for x in row] for row in T])
    exps = smith_reduce(T).exponents
    return [shift + e - S for e in exps]


def lattice_exponents(L1, L2):
    """(alpha, beta): alpha maximal with L1 in p^alpha L2, beta minimal with p^beta L2 in L1."""
    exps = relative_exponents(L1, L2)
    return min(exps), max(exps)


def lattice_sum(L1, L2, guard=DEFAULT_GUARD):
    o = min(L1.offset, L2.offset)
    ring = L1.ring
    cols = []
    for L in (L1, L2):
        c = ring.p_power(L.offset - o)
        cols.extend([[c * x for x in col] for col in L.columns()])
    return Lattice.from_columns(ring, cols, offset=o, guard=guard)


def lattice_dual(L):
    """The dual lattice {y : y^T x in W for all x in L}."""
    ring = L.ring
    S = sum(L.exponents)
    big = ring.with_precision(ring.N + 2 * S + 4)
    _, inv = _scaled_inverse(big, mat_coerce(big, L.matrix()), L.exponents)
    dual = mat_transpose(inv)
    work = big.with_precision(big.N - S)
    dual = [[work(x.coeffs) for x in row] for row in dual]
    M = Lattice.from_matrix(work, dual, offset=-L.offset - S)
    return Lattice(ring, M.h, M.offset, M.exponents, mat_coerce(ring, [[x.coeffs for x in r] for r in M.basis]))


def lattice_intersection(L1, L2):
    return lattice_dual(lattice_sum(lattice_dual(L1), lattice_dual(L2)))


def quotient_exponent(L1, L2):
    """p-exponent of L1/L2 for L2 contained in L1."""
    alpha, beta = lattice_exponents(L2, L1)
    if alpha < 0:
        raise ValueError("quotient requires L2 to be contained in L1")
    return beta


def quotient_length(L1, L2):
    """Length of the W-module L1/L2 for L2 contained in L1."""
    exps = relative_exponents(L2, L1)
    if min(exps) < 0:
        raise ValueError("quotient requires L2 to be contained in L1")
    return sum(exps)


def apply_map(f, L, guard=DEFAULT_GUARD):
    """Image lattice f(L) for a square semilinear map f."""
    if f.rows != L.h or f.cols != L.h:
        raise ValueError("map and lattice dimensions differ")
    img = mat_mul(f.matrix(), mat_frob(L.matrix(), f.twist))
    try:
        return Lattice.from_matrix(L.ring, img, offset=L.offset, guard=guard)
    except PrecisionError as exc:
        raise PrecisionError(f"image is not full rank at working precision: {exc}",
                             suggested_N=exc.suggested_N) from exc


# -- kernel counting over extensions ------------------------------------------------


@lru_cache(maxsize=None)
def extension(base_key, r, m):
    """Ring W_m(F_{p^{nr}}) and the images of the base generator's powers.

    ``base_key`` is ``WittRing.key``.  The embedding sends the base generator to
    the lexicographically least root of the base modulus, Hensel-lifted.
    """
    p, n, _, modulus = base_key
    ext = ring_create(p, n * r, m)
    if n == 1:
        return ext, (ext.one,)
    res = ext.with_precision(1)
    root = None
    for x in res.elements():
        if res._eval_poly(modulus, x.coeffs) == res._zero:
            root = ext(x.coeffs)
            break
    if root is None:  # pragma: no cover - F_{p^n} always embeds in F_{p^{nr}}
        raise RuntimeError("no embedding of the residue field")
    df = tuple(i * modulus[i] for i in range(1, n + 1))
    rc = root.coeffs
    for _ in range(m + 2):
        fr = ext._eval_poly(modulus, rc)
        if fr == ext._zero:
            break
        rc = ext._sub(rc, ext._mul(fr, ext._inv(ext._eval_poly(df, rc))))
    rho = WittScalar(ext, rc)
    return ext, tuple(rho**j for j in range(n))


def _embed(x, ext, powers):
    acc = ext.zero
    for c, g in zip(x.coeffs, powers):
        if c:
            acc = acc + g * c
    return acc


def _as_terms(op):
    if isinstance(op, SemilinearMap):
        return [op]
    return list(op)


def _embedded_terms(op, r, m):
    terms = _as_terms(op)
    base = terms[0].ring
    if m > base.N:
        raise PrecisionError(f"level m={m} exceeds working precision N={base.N}",
                             suggested_N=m)
    ext, powers = extension(base.key, r, m)
    out = []
    for t in terms:
        A = [[_embed(x, ext, powers) for x in row] for row in t.A]
        out.append((A, t.twist))
    return ext, out


def _apply_terms(ext, terms, x):
    h = len(x)
    acc = [ext.zero] * h
    for A, s in terms:
        y = [v.frobenius(s) for v in x]
        for i in range(h):
            row = A[i]
            tot = acc[i]
            for a, b in zip(row, y):
                if a and b:
                    tot = tot + a * b
            acc[i] = tot
    return acc


def _int_smith_log_kernel(rows, p, m):
    """log_p of the kernel size of an integer matrix acting on (Z/p^m)^K."""
    q = p**m
    A = [[x % q for x in row] for row in rows]
    K = len(A[0]) if A else 0
    nrows = len(A)
    total = 0
    t = 0
    col_order = list(range(K))
    used_cols = 0
    while t < min(nrows, K):
        best = None
        for i in range(t, nrows):
            for j in range(t, K):
                x = A[i][j]
                if x:
                    v = 0
                    while x % p == 0:
                        x //= p
                        v += 1
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        e, i, j = best
        A[t], A[i] = A[i], A[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        col_order[t], col_order[j] = col_order[j], col_order[t]
        pe = p**e
        u_inv = pow(A[t][t] // pe, -1, q)
        A[t] = [(x * u_inv) % q for x in A[t]]
        for i2 in range(t + 1, nrows):
            if A[i2][t]:
                f = A[i2][t] // pe
                A[i2] = [(x - f * y) % q for x, y in zip(A[i2], A[t])]
        for j2 in range(t + 1, K):
            if A[t][j2]:
                f = A[t][j2] // pe
                for row in A:
                    row[j2] = (row[j2] - f * row[t]) % q
        total += e
        t += 1
        used_cols += 1
    return total + m * (K - used_cols)


def semilinear_kernel_count(op, m, r=1, work_bound=DEFAULT_WORK_BOUND):
    """log_p of #{x in W_m(F_{p^{nr}})^h : op(x) = 0 mod p^m}.

    ``op`` is a :class:`SemilinearMap` or a sequence of them whose sum is the
    operator.  The operator is Z/p^m-linear in the coordinates of the
    polynomial basis of the extension ring, so the count is read off the Smith
    form of that (n r h) x (n r h) integer matrix.
    """
    if m <= 0:
        return 0
    terms = _as_terms(op)
    base = terms[0].ring
    h = terms[0].cols
    nr = base.n * r
    if nr * h * m > work_bound:
        raise BudgetError(f"linearized size n*r*h*m = {nr * h * m} exceeds work bound {work_bound}")
    ext, eterms = _embedded_terms(terms, r, m)
    columns = []
    for k in range(h):
        for j in range(nr):
            unit = [0] * nr
            unit[j] = 1
            x = [ext(unit) if i == k else ext.zero for i in range(h)]
            y = _apply_terms(ext, eterms, x)
            columns.append([c for v in y for c in v.coeffs])
    rows = [list(r_) for r_ in zip(*columns)]
    return _int_smith_log_kernel(rows, base.p, m)


def kernel_count_bruteforce(op, m, r=1, max_points=2**20):
    """Exhaustive-enumeration oracle for :func:`semilinear_kernel_count`."""
    if m <= 0:
        return 0
    terms = _as_terms(op)
    base = terms[0].ring
    h = terms[0].cols
    total = base.p ** (base.n * r * h * m)
    if total > max_points:
        raise BudgetError(f"state space {total} exceeds {max_points}")
    ext, eterms = _embedded_terms(terms, r, m)
    elems = list(ext.elements())
    zero = ext._zero
    count = 0
    for x in product(elems, repeat=h):
        y = _apply_terms(ext, eterms, list(x))
        if all(v.coeffs == zero for v in y):
            count += 1
    e = 0
    while count > 1:
        count //= base.p
        e += 1
    return e
