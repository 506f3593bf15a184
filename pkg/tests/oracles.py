"""Independent reference computations used only by the tests.

None of these share code with the package: they use plain integers,
fractions and sympy, and favour obviously-correct brute force over speed.
"""

from fractions import Fraction
from itertools import combinations, product

import sympy


def vp(x, p):
    """p-adic valuation of a nonzero integer."""
    x = abs(x)
    if x == 0:
        return None
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def poly_mulmod(a, b, modulus, p, N):
    """Schoolbook product of coefficient lists reduced by a monic modulus mod p^N."""
    q = p**N
    n = len(modulus) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] += x * y
    for k in range(len(prod) - 1, n - 1, -1):
        c = prod[k]
        if c:
            for i in range(n + 1):
                prod[k - n + i] -= c * modulus[i]
    return [x % q for x in prod[:n]] + [0] * max(0, n - len(prod))


def hull_value(points, t):
    """Lower convex hull at t: minimum over chords through pairs of finite points."""
    pts = [(Fraction(x), Fraction(y)) for x, y in points if y is not None]
    best = None
    for (x0, y0), (x1, y1) in product(pts, repeat=2):
        if x0 <= t <= x1:
            if x0 == x1:
                val = min(y0, y1)
            else:
                val = y0 + (y1 - y0) * (Fraction(t) - x0) / (x1 - x0)
            best = val if best is None else min(best, val)
    return best


def elementary_divisor_exponents(mat, p):
    """Smith exponents over Z_p via determinantal divisors of an integer matrix.

    Returns None entries for divisors that vanish (rank deficiency).
    """
    rows, cols = len(mat), len(mat[0])
    M = sympy.Matrix(mat)
    prev = 0
    out = []
    for k in range(1, min(rows, cols) + 1):
        vals = []
        for rs in combinations(range(rows), k):
            for cs in combinations(range(cols), k):
                det = M.extract(list(rs), list(cs)).det()
                if det != 0:
                    vals.append(vp(int(det), p))
        if not vals:
            out.extend([None] * (min(rows, cols) - k + 1))
            break
        Dk = min(vals)
        out.append(Dk - prev)
        prev = Dk
    return out


def rank_mod_p(mat, p):
    """Rank over F_p of an integer matrix (sympy row reduction over GF(p))."""
    from sympy.polys.matrices import DomainMatrix
    from sympy import GF

    dm = DomainMatrix([[GF(p)(int(x)) for x in row] for row in mat], (len(mat), len(mat[0])), GF(p))
    return dm.rank()


def kernel_count_enumerate(matrices, p, m):
    """log_p #{x in (Z/p^m)^h : sum_k A_k x = 0 mod p^m} for integer matrices (prime field)."""
    q = p**m
    h = len(matrices[0])
    total = [[sum(A[i][j] for A in matrices) % q for j in range(h)] for i in range(h)]
    count = 0
    for x in product(range(q), repeat=h):
        if all(sum(total[i][j] * x[j] for j in range(h)) % q == 0 for i in range(h)):
            count += 1
    return vp(count, p) if count > 1 else 0


def charpoly_valuations(mat, p):
    """Valuations (None for zero) of det(tI - A), highest degree first, for an integer matrix."""
    coeffs = sympy.Matrix(mat).charpoly().all_coeffs()
    return [None if c == 0 else vp(int(c), p) for c in coeffs]


def lattice_contains(basis_cols, vec, p, N):
    """Brute force: is vec in the Z/p^N-span of the columns (small cases only)?"""
    q = p**N
    h = len(vec)
    for coeffs in product(range(q), repeat=len(basis_cols)):
        if all((sum(c * col[i] for c, col in zip(coeffs, basis_cols)) - vec[i]) % q == 0
               for i in range(h)):
            return True
    return False
