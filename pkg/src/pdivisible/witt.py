"""Truncated unramified Witt rings W_N(F_{p^n}).

Elements are polynomials of degree < n in a generator ``g`` with
coefficients in Z/p^N, reduced modulo a monic lift of an irreducible
polynomial over F_p.  The Frobenius automorphism is the substitution
``g -> sigma(g)`` where ``sigma(g)`` is the Hensel-lifted root of the modulus
congruent to ``g**p``; its powers are precomputed as coefficient tables.
"""

from functools import lru_cache
from itertools import product
import random

from .errors import NotAUnitError, PrecisionError, RingMismatchError


class _Saturated:
    """Valuation of an element that vanishes at working precision.

    Ordering comparisons raise :class:`PrecisionError`: a saturated valuation
    only says "at least N", so any answer would be a guess.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "SATURATED"

    def _refuse(self, other):
        raise PrecisionError("comparison against a saturated valuation (value >= N)")

    __lt__ = __le__ = __gt__ = __ge__ = _refuse

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __reduce__(self):
        return (_Saturated, ())


SATURATED = _Saturated()


def is_prime(p):
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def _vp(x, p):
    """p-adic valuation of a non-zero integer."""
    e = 0
    while x % p == 0:
        x //= p
        e += 1
    return e


def _is_irreducible_mod_p(coeffs_desc, p):
    from sympy import Poly, Symbol

    return Poly(list(coeffs_desc), Symbol("x"), modulus=p).is_irreducible


def least_irreducible(p, n):
    """Lexicographically least monic irreducible polynomial of degree n over F_p.

    Returned as a tuple ``(c_0, ..., c_{n-1}, 1)`` (constant term first); the
    ordering compares the non-leading coefficients from degree n-1 down.
    """
    for tail in product(range(p), repeat=n):
        desc = (1,) + tail
        if n == 1 or _is_irreducible_mod_p(desc, p):
            return tuple(reversed(desc))
    raise RuntimeError(f"no irreducible polynomial of degree {n} over F_{p}")


class WittRing:
    """The ring W_N(F_{p^n}) in a fixed polynomial basis.

    Use :func:`ring_create` rather than the constructor so rings are shared.
    """

    def __init__(self, p, n, N, modulus=None):
        if not isinstance(p, int) or not is_prime(p):
            raise ValueError(f"p must be prime, got {p!r}")
        if n < 1 or N < 1:
            raise ValueError(f"need n >= 1 and N >= 1, got n={n}, N={N}")
        self.p = p
        self.n = n
        self.N = N
        self.q = p**N
        self.modulus = tuple(modulus) if modulus is not None else least_irreducible(p, n)
        if len(self.modulus) != n + 1 or self.modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree n")
        self.key = (p, n, N, self.modulus)
        self._zero = (0,) * n
        self._one = (1 % self.q,) + (0,) * (n - 1)
        self._sigma = self._compute_frobenius_tables()

    # -- raw coefficient-tuple arithmetic -------------------------------------------

    def _add(self, a, b):
        q = self.q
        return tuple((x + y) % q for x, y in zip(a, b))

    def _sub(self, a, b):
        q = self.q
        return tuple((x - y) % q for x, y in zip(a, b))

    def _neg(self, a):
        q = self.q
        return tuple((-x) % q for x in a)

    def _scale(self, a, k):
        q = self.q
        return tuple((x * k) % q for x in a)

    def _mul(self, a, b):
        q = self.q
        n = self.n
        if n == 1:
            return ((a[0] * b[0]) % q,)
        r = [0] * (2 * n - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    r[i + j] += x * y
        mod = self.modulus
        for k in range(2 * n - 2, n - 1, -1):
            c = r[k]
            if c:
                base = k - n
                for j in range(n):
                    r[base + j] -= c * mod[j]
        return tuple(x % q for x in r[:n])

    def _pow(self, a, e):
        result = self._one
        base = a
        while e:
            if e & 1:
                result = self._mul(result, base)
            base = self._mul(base, base)
            e >>= 1
        return result

    def _val(self, a):
        p = self.p
        best = None
        for x in a:
            if x:
                v = _vp(x, p)
                if best is None or v < best:
                    best = v
        return SATURATED if best is None else best

    def _inv(self, a):
        p = self.p
        if all(x % p == 0 for x in a):
            raise NotAUnitError("element is not a unit")
        if self.n == 1:
            return (pow(a[0], -1, self.q),)
        # field inverse mod p, then Newton lifting b <- b(2 - ab)
        b = self._pow(a, p**self.n - 2)
        two = self._scale(self._one, 2)
        while True:
            ab = self._mul(a, b)
            if ab == self._one:
                return b
            b = self._mul(b, self._sub(two, ab))

    def _eval_poly(self, coeffs, x):
        acc = self._zero
        for c in reversed(coeffs):
            acc = self._add(self._mul(acc, x), self._scale(self._one, c))
        return acc

    def _frob_raw(self, a, s):
        k = s % self.n
        if k == 0:
            return a
        q = self.q
        table = self._sigma[k]
        out = [0] * self.n
        for j, x in enumerate(a):
            if x:
                col = table[j]
                for i in range(self.n):
                    out[i] += x * col[i]
        return tuple(v % q for v in out)

    def _compute_frobenius_tables(self):
        n = self.n
        if n == 1:
            return [[self._one]]
        gen = (0, 1) + (0,) * (n - 2)
        f = self.modulus
        df = tuple(i * f[i] for i in range(1, n + 1))
        # Newton iteration for the root of f congruent to g^p mod p
        r = self._pow(gen, self.p)
        for _ in range(self.N + 2):
            fr = self._eval_poly(f, r)
            if fr == self._zero:
                break
            r = self._sub(r, self._mul(fr, self._inv(self._eval_poly(df, r))))
        else:  # pragma: no cover - Newton converges quadratically
            raise RuntimeError("Frobenius lift did not converge")
        tables = [[self._pow(gen, j) for j in range(n)]]
        image = gen
        for _ in range(1, n):
            image = self._eval_poly(list(image), r)  # sigma^k(g) = sigma^{k-1}(g)(r)
            tables.append([self._pow(image, j) for j in range(n)])
        return tables

    # -- public element API ---------------------------------------------------------

    def __call__(self, value):
        """Coerce an int, a coefficient sequence, or a scalar of a compatible ring."""
        if isinstance(value, WittScalar):
            if value.ring is self:
                return value
            src = value.ring
            if (src.p, src.n, src.modulus) != (self.p, self.n, self.modulus):
                raise RingMismatchError("cannot coerce between different residue fields")
            return WittScalar(self, tuple(x % self.q for x in value.coeffs))
        if isinstance(value, int):
            return WittScalar(self, (value % self.q,) + (0,) * (self.n - 1))
        coeffs = [int(x) for x in value]
        if len(coeffs) > self.n:
            raise ValueError(f"expected at most {self.n} coefficients, got {len(coeffs)}")
        coeffs += [0] * (self.n - len(coeffs))
        return WittScalar(self, tuple(x % self.q for x in coeffs))

    @property
    def zero(self):
        return WittScalar(self, self._zero)

    @property
    def one(self):
        return WittScalar(self, self._one)

    def gen(self):
        if self.n == 1:
            return WittScalar(self, ((-self.modulus[0]) % self.q,))
        return WittScalar(self, (0, 1) + (0,) * (self.n - 2))

    def p_power(self, e):
        if e < 0:
            raise ValueError("negative p-power is not a ring element")
        return self(self.p**e)

    def sigma_of_gen(self):
        """The image of the generator under Frobenius."""
        return self.gen().frobenius(1)

    def teichmuller(self, x):
        """Teichmuller representative of the residue class of ``x``."""
        x = self(x)
        y = x.coeffs
        for _ in range(self.N):
            y = self._pow(y, self.p**self.n)
        return WittScalar(self, y)

    def random(self, rng=None, min_valuation=0, unit=False):
        rng = rng or random
        while True:
            coeffs = tuple(rng.randrange(self.q) for _ in range(self.n))
            x = WittScalar(self, coeffs) * self.p_power(min_valuation) if min_valuation < self.N \
                else self.zero
            if not unit or x.is_unit():
                return x

    def elements(self):
        """Iterate over all p^{nN} elements (for exhaustive oracles)."""
        for coeffs in product(range(self.q), repeat=self.n):
            yield WittScalar(self, coeffs)

    def with_precision(self, N):
        return ring_create(self.p, self.n, N)

    def residue_size(self):
        return self.p**self.n

    def __eq__(self, other):
        return isinstance(other, WittRing) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"WittRing(p={self.p}, n={self.n}, N={self.N})"


@lru_cache(maxsize=None)
def ring_create(p, n, N):
    """Return the (shared) ring W_N(F_{p^n}) with the deterministic modulus."""
    return WittRing(p, n, N)


class WittScalar:
    """An immutable element of a :class:`WittRing`."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring, coeffs):
        self.ring = ring
        self.coeffs = coeffs

    def _other(self, other):
        if isinstance(other, WittScalar):
            if other.ring is not self.ring and other.ring != self.ring:
                raise RingMismatchError(f"{self.ring!r} vs {other.ring!r}")
            return other.coeffs
        if isinstance(other, int):
            return self.ring(other).coeffs
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return WittScalar(self.ring, self.ring._add(self.coeffs, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return WittScalar(self.ring, self.ring._sub(self.coeffs, o))

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return WittScalar(self.ring, self.ring._sub(o, self.coeffs))

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return WittScalar(self.ring, self.ring._mul(self.coeffs, o))

    __rmul__ = __mul__

    def __neg__(self):
        return WittScalar(self.ring, self.ring._neg(self.coeffs))

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        return WittScalar(self.ring, self.ring._pow(self.coeffs, e))

    def inverse(self):
        return WittScalar(self.ring, self.ring._inv(self.coeffs))

    def frobenius(self, s=1):
        return WittScalar(self.ring, self.ring._frob_raw(self.coeffs, s))

    def valuation(self):
        return self.ring._val(self.coeffs)

    def is_zero(self):
        return not any(self.coeffs)

    def is_unit(self):
        p = self.ring.p
        return any(x % p for x in self.coeffs)

    def divide_by_p_power(self, e):
        """Exact division by p^e; the top e digits of the result are zero-filled."""
        if e == 0:
            return self
        pe = self.ring.p**e
        if any(x % pe for x in self.coeffs):
            raise ArithmeticError(f"element not divisible by p^{e}")
        return WittScalar(self.ring, tuple(x // pe for x in self.coeffs))

    def reduce(self, e):
        """Canonical representative modulo p^e (coefficientwise)."""
        pe = self.ring.p**e
        return WittScalar(self.ring, tuple(x % pe for x in self.coeffs))

    def quotient(self, e):
        """The element t with self = (self mod p^e) + p^e * t, coefficientwise."""
        pe = self.ring.p**e
        return WittScalar(self.ring, tuple(x // pe for x in self.coeffs))

    def to_json(self):
        return list(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring(other)
        if not isinstance(other, WittScalar):
            return NotImplemented
        return self.coeffs == other.coeffs and self.ring == other.ring

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        if self.ring.n == 1:
            return f"W({self.coeffs[0]})"
        return f"W{list(self.coeffs)}"
