"""Newton polygons in exact rational arithmetic and the closed-form bounds read off them.

A polygon is stored as runs ``(slope, multiplicity)`` with strictly increasing
slopes in [0, 1].  It starts at (0, 0), ends at (h, d), and all its breakpoints
are integral.  The codimension is ``c = h - d``.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor

from .errors import PrecisionError, PresentationError
from .witt import SATURATED


class NewtonPolygon:
    __slots__ = ("segments",)

    def __init__(self, segments=()):
        runs = []
        for slope, mult in segments:
            slope = Fraction(slope)
            mult = int(mult)
            if mult <= 0:
                raise PresentationError(f"multiplicity must be positive, got {mult}")
            if not 0 <= slope <= 1:
                raise PresentationError(f"slope {slope} outside [0, 1]")
            if runs and slope == runs[-1][0]:
                runs[-1] = (slope, runs[-1][1] + mult)
            elif runs and slope < runs[-1][0]:
                raise PresentationError("slopes must be increasing")
            else:
                runs.append((slope, mult))
        for slope, mult in runs:
            if (slope * mult).denominator != 1:
                raise PresentationError(
                    f"segment of slope {slope} and length {mult} ends off the integer lattice")
        self.segments = tuple(runs)

    @classmethod
    def from_slopes(cls, slopes):
        """Polygon with the given multiset of slopes (one entry per unit length)."""
        out = {}
        for s in slopes:
            s = Fraction(s)
            out[s] = out.get(s, 0) + 1
        return cls(sorted(out.items()))

    @classmethod
    def isoclinic(cls, d, h):
        return cls([(Fraction(d, h), h)]) if h else cls()

    @classmethod
    def ordinary(cls, c, d):
        segs = []
        if c:
            segs.append((0, c))
        if d:
            segs.append((1, d))
        return cls(segs)

    # -- basic data ----------------------------------------------------------------

    @property
    def h(self):
        return sum(m for _, m in self.segments)

    @property
    def d(self):
        return int(sum(s * m for s, m in self.segments))

    @property
    def c(self):
        return self.h - self.d

    def slopes(self):
        return [s for s, _ in self.segments]

    def slope_list(self):
        """Slopes with multiplicity, one per unit of length."""
        return [s for s, m in self.segments for _ in range(m)]

    def breakpoints(self):
        pts = [(0, Fraction(0))]
        x, y = 0, Fraction(0)
        for s, m in self.segments:
            x += m
            y += s * m
            pts.append((x, y))
        return pts

    def is_breakpoint(self, t):
        return any(x == t for x, _ in self.breakpoints())

    def __call__(self, t):
        return self.evaluate(t)

    def evaluate(self, t):
        t = Fraction(t)
        if not 0 <= t <= self.h:
            raise ValueError(f"t = {t} outside [0, {self.h}]")
        x, y = 0, Fraction(0)
        for s, m in self.segments:
            if t <= x + m:
                return y + s * (t - x)
            x += m
            y += s * m
        return y

    def is_ordinary(self):
        return all(s in (0, 1) for s, _ in self.segments)

    def is_isoclinic(self):
        return len(self.segments) == 1

    def is_binilpotent(self):
        return all(0 < s < 1 for s, _ in self.segments)

    def __eq__(self, other):
        return isinstance(other, NewtonPolygon) and self.segments == other.segments

    def __hash__(self):
        return hash(self.segments)

    def __repr__(self):
        body = ", ".join(f"{s}x{m}" for s, m in self.segments)
        return f"NewtonPolygon({body})"

    def __str__(self):
        return " ".join(f"({x},{y})" for x, y in self.breakpoints())

    def to_json(self):
        return {"segments": [[s.numerator, s.denominator, m] for s, m in self.segments]}

    @classmethod
    def from_json(cls, obj):
        try:
            segs = obj["segments"]
            return cls([(Fraction(int(a), int(b)), int(m)) for a, b, m in segs])
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise PresentationError(f"malformed polygon JSON: {exc}") from exc


# -- hulls -------------------------------------------------------------------------


@dataclass(frozen=True)
class Hull:
    """Lower convex hull through integer points, as its vertex list."""

    vertices: tuple

    def evaluate(self, t):
        t = Fraction(t)
        vs = self.vertices
        if not vs[0][0] <= t <= vs[-1][0]:
            raise ValueError("outside hull domain")
        for (x0, y0), (x1, y1) in zip(vs, vs[1:]):
            if x0 <= t <= x1:
                return y0 + (y1 - y0) * (t - x0) / (x1 - x0)
        return vs[0][1]

    def segments(self):
        out = []
        for (x0, y0), (x1, y1) in zip(self.vertices, self.vertices[1:]):
            out.append((Fraction(y1 - y0, x1 - x0), x1 - x0))
        return out

    def to_polygon(self):
        """The hull translated so that its left end sits at the origin."""
        return NewtonPolygon(self.segments())


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def hull_from_points(points):
    """Lower convex hull of integer points; points with value ``SATURATED`` or None are skipped.

    The extreme abscissae must carry finite values: a missing extreme value
    means the working precision cannot see the polygon's endpoint.
    """
    pts = sorted(points, key=lambda q: q[0])
    if not pts:
        raise ValueError("need at least two finite points")
    for end in (pts[0], pts[-1]):
        if end[1] is SATURATED or end[1] is None:
            raise PrecisionError(f"hull endpoint at x={end[0]} has unknown value")
    best = {}
    for x, y in pts:
        if y is SATURATED or y is None:
            continue
        if x not in best or y < best[x]:
            best[x] = y
    finite = sorted(best.items())
    if len(finite) < 2:
        raise ValueError("need at least two finite points")
    lower = []
    for q in finite:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], q) <= 0:
            lower.pop()
        lower.append(q)
    return Hull(tuple((x, Fraction(y)) for x, y in lower))


# -- support lines -----------------------------------------------------------------


@dataclass(frozen=True)
class SupportLine:
    """The line of slope ``slope`` through the segment of that slope."""

    slope: Fraction
    intercept: Fraction
    beta: Fraction

    def evaluate(self, t):
        return self.intercept + self.slope * Fraction(t)

    __call__ = evaluate


def support_lines(nu):
    lines = []
    c = nu.c
    pts = nu.breakpoints()
    for (s, _), (x0, y0) in zip(nu.segments, pts):
        intercept = y0 - s * x0
        lines.append(SupportLine(s, intercept, intercept + s * c))
    return lines


def support_value(nu, slope, t):
    """Value at t of the support line of nu at ``slope`` (any slope, not just a segment's)."""
    slope = Fraction(slope)
    intercept = min(y - slope * x for x, y in nu.breakpoints())
    return intercept + slope * Fraction(t)


# -- closed-form bounds ------------------------------------------------------------


def isogeny_cutoff_bound(nu):
    """j(nu): nu(c)+1 when (c, nu(c)) is a breakpoint, else the ceiling of nu(c)."""
    if nu.h < 1:
        raise ValueError("isogeny cutoff needs h >= 1")
    c = nu.c
    v = nu(c)
    if nu.is_breakpoint(c):
        return int(v) + 1
    return ceil(v)


def isomorphism_bound(nu):
    if nu.is_ordinary():
        return 1
    return floor(2 * nu(nu.c))


def minimal_height_value(nu):
    if nu.is_ordinary():
        return 0
    return floor(nu(nu.c))


def Nh(h):
    if h < 0:
        raise ValueError("height must be non-negative")
    return h // 2


def pqp_bound(nu):
    if nu.c != nu.d or nu.d == 0:
        raise ValueError("the quasi-polarized bound needs c = d > 0")
    return nu.d


# -- structure ---------------------------------------------------------------------


def direct_sum(nu1, nu2):
    return NewtonPolygon(sorted(nu1.segments + nu2.segments))


def dual(nu):
    return NewtonPolygon([(1 - s, m) for s, m in reversed(nu.segments)])


def preceq(nu1, nu2):
    """True when nu1 lies on or above nu2 (same endpoints required)."""
    if nu1.h != nu2.h or nu1.d != nu2.d:
        raise ValueError("polygons must share endpoints")
    xs = {x for x, _ in nu1.breakpoints()} | {x for x, _ in nu2.breakpoints()}
    return all(nu1(x) >= nu2(x) for x in xs)


def strip_ordinary(nu):
    """The bi-nilpotent part: drop the slope-0 and slope-1 runs."""
    return NewtonPolygon([(s, m) for s, m in nu.segments if 0 < s < 1])


def _best_support(nu_plus, c_plus, slopes):
    return max(support_value(nu_plus, s, c_plus) for s in slopes)


def hom_number_bound(nuD, nuDprime):
    """Floor of the symmetrized support-line bound on the coarse homomorphism number.

    Slopes 0 and 1 carry no level structure, so they are removed first; when
    either side is then empty the bound is 0.
    """
    A, B = strip_ordinary(nuD), strip_ordinary(nuDprime)
    if A.h == 0 or B.h == 0:
        return 0
    plus = direct_sum(A, B)
    c_plus = A.c + B.c
    v1 = _best_support(plus, c_plus, A.slopes())
    v2 = _best_support(plus, c_plus, B.slopes())
    return floor(min(v1, v2))


def hom_bound_chain(nuD, nuDprime):
    """The non-decreasing chain from the hom-number bound up to h+/4."""
    plus = direct_sum(nuD, nuDprime)
    c, d, h = nuD.c, nuD.d, nuD.h
    c2, d2, h2 = nuDprime.c, nuDprime.d, nuDprime.h
    chain = [Fraction(hom_number_bound(nuD, nuDprime)),
             plus(c + c2),
             nuD(c) + nuDprime(c2),
             (Fraction(c * d, h) if h else 0) + (Fraction(c2 * d2, h2) if h2 else 0),
             Fraction((c + c2) * (d + d2), h + h2) if h + h2 else Fraction(0),
             Fraction(h + h2, 4)]
    return chain


def common_slope_identity(nuD, nuDprime):
    """For each common slope: (slope, nu_j(c) + nu'_j(c'), nu+_j(c+))."""
    plus = direct_sum(nuD, nuDprime)
    c_plus = nuD.c + nuDprime.c
    lines1 = {L.slope: L for L in support_lines(nuD)}
    lines2 = {L.slope: L for L in support_lines(nuDprime)}
    lines_plus = {L.slope: L for L in support_lines(plus)}
    out = []
    for s in sorted(set(lines1) & set(lines2)):
        out.append((s, lines1[s].beta + lines2[s].beta, lines_plus[s](c_plus)))
    return out
