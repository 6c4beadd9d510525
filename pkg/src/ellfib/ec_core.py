"""Elliptic curves over Q: points, the group law, torsion, divisors and divisor classes.

Coordinates are exact: ``mpq`` for rational points, :class:`~ellfib.qfield.Quad`
for points over a quadratic field (as occur in the support of a degree-2
divisor).  Pic(E) is modelled as Z x E via the Abel-Jacobi sum, so two divisors
are linearly equivalent iff their :class:`DivisorClass` values agree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterable, Iterator, Mapping

from .qfield import Quad, mpq, q_from_json, q_to_json, to_q

__all__ = [
    "CurveError",
    "EllipticCurve",
    "CurvePoint",
    "O",
    "Divisor",
    "DivisorClass",
    "point_add",
    "torsion_order",
    "class_of",
    "lin_equiv",
    "tate_normal_form",
    "find_torsion_curve",
    "TorsionFrame",
    "integral_short_model",
    "rational_torsion_points",
]


class CurveError(ValueError):
    """Invalid curve data or a point that does not lie on the curve."""


@dataclass(frozen=True)
class CurvePoint:
    """An affine point (x, y) or, with both fields None, the point at infinity."""

    x: object = None
    y: object = None

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    @property
    def is_rational(self) -> bool:
        return self.is_infinity or not (isinstance(self.x, Quad) or isinstance(self.y, Quad))

    def field_d(self) -> int | None:
        """The d of Q(sqrt d) the coordinates live in, or None for rational points."""
        for c in (self.x, self.y):
            if isinstance(c, Quad):
                return c.d
        return None

    def conjugate(self) -> "CurvePoint":
        if self.is_rational:
            return self
        cx = self.x.conjugate() if isinstance(self.x, Quad) else self.x
        cy = self.y.conjugate() if isinstance(self.y, Quad) else self.y
        return CurvePoint(cx, cy)

    def sort_key(self):
        if self.is_infinity:
            return (0, "", "")
        return (1, str(self.x), str(self.y))

    def __repr__(self):
        if self.is_infinity:
            return "O"
        return f"({self.x}, {self.y})"

    def to_json(self):
        if self.is_infinity:
            return "O"
        if not self.is_rational:
            return {"x": _scalar_json(self.x), "y": _scalar_json(self.y)}
        return [q_to_json(self.x), q_to_json(self.y)]

    @staticmethod
    def from_json(obj) -> "CurvePoint":
        if obj == "O":
            return O
        if isinstance(obj, dict):
            return CurvePoint(_scalar_from_json(obj["x"]), _scalar_from_json(obj["y"]))
        return CurvePoint(q_from_json(obj[0]), q_from_json(obj[1]))


O = CurvePoint()


def _scalar_json(v):
    if isinstance(v, Quad):
        return v.to_json()
    return q_to_json(v)


def _scalar_from_json(obj):
    if isinstance(obj, dict):
        return Quad.make(q_from_json(obj["a"]), q_from_json(obj["b"]), int(obj["d"]))
    return q_from_json(obj)


@dataclass(frozen=True)
class EllipticCurve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 with exact rational coefficients."""

    a1: mpq = mpq(0)
    a2: mpq = mpq(0)
    a3: mpq = mpq(0)
    a4: mpq = mpq(0)
    a6: mpq = mpq(0)

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "a4", "a6"):
            object.__setattr__(self, name, to_q(getattr(self, name)))
        if self.discriminant == 0:
            raise CurveError(f"singular Weierstrass equation {self.ainvs}")

    @property
    def ainvs(self) -> tuple:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @cached_property
    def b_invariants(self):
        a1, a2, a3, a4, a6 = self.ainvs
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    @cached_property
    def discriminant(self) -> mpq:
        b2, b4, b6, b8 = self.b_invariants
        return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    # -- the Weierstrass polynomial F(x, y) = y^2 + (a1 x + a3) y - f3(x)
    def f3(self, x):
        return ((x + self.a2) * x + self.a4) * x + self.a6

    def hx(self, x):
        return self.a1 * x + self.a3

    def equation(self, x, y):
        return y * y + self.hx(x) * y - self.f3(x)

    def dF_dx(self, x, y):
        return self.a1 * y - (3 * x * x + 2 * self.a2 * x + self.a4)

    def dF_dy(self, x, y):
        return 2 * y + self.hx(x)

    def contains(self, P: CurvePoint) -> bool:
        return P.is_infinity or self.equation(P.x, P.y) == 0

    def check(self, P: CurvePoint) -> CurvePoint:
        if not isinstance(P, CurvePoint):
            raise CurveError(f"not a curve point: {P!r}")
        if not self.contains(P):
            raise CurveError(f"point {P!r} is not on {self}")
        return P

    def point(self, x, y) -> CurvePoint:
        return self.check(CurvePoint(_norm(x), _norm(y)))

    # -- group law
    def neg(self, P: CurvePoint) -> CurvePoint:
        if P.is_infinity:
            return P
        return CurvePoint(P.x, _norm(-P.y - self.hx(P.x)))

    def add(self, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
        if P.is_infinity:
            return Q
        if Q.is_infinity:
            return P
        a1, a2, a3, a4, a6 = self.ainvs
        if P.x == Q.x:
            if P.y + Q.y + self.hx(Q.x) == 0:
                return O
            lam = (3 * P.x * P.x + 2 * a2 * P.x + a4 - a1 * P.y) / (2 * P.y + a1 * P.x + a3)
        else:
            lam = (Q.y - P.y) / (Q.x - P.x)
        nu = P.y - lam * P.x
        x3 = lam * lam + a1 * lam - a2 - P.x - Q.x
        y3 = -(lam + a1) * x3 - nu - a3
        return CurvePoint(_norm(x3), _norm(y3))

    def sub(self, P, Q):
        return self.add(P, self.neg(Q))

    def mul(self, n: int, P: CurvePoint) -> CurvePoint:
        if n < 0:
            return self.mul(-n, self.neg(P))
        out, base = O, P
        while n:
            if n & 1:
                out = self.add(out, base)
            base = self.add(base, base)
            n >>= 1
        return out

    def sum(self, points: Iterable[CurvePoint]) -> CurvePoint:
        out = O
        for P in points:
            out = self.add(out, P)
        return out

    def torsion_order(self, P: CurvePoint, bound: int = 12) -> int | None:
        self.check(P)
        Q = P
        for n in range(1, bound + 1):
            if Q.is_infinity:
                return n
            Q = self.add(Q, P)
        return None

    def two_division_roots(self) -> list[mpq]:
        """Rational x-coordinates of the nontrivial 2-torsion points."""
        b2, b4, b6, _ = self.b_invariants
        # 4x^3 + b2 x^2 + 2 b4 x + b6
        coeffs = [mpq(4), b2, 2 * b4, b6]
        return sorted(_rational_roots(coeffs))

    def two_torsion_points(self) -> list[CurvePoint]:
        pts = []
        for x in self.two_division_roots():
            y = -self.hx(x) / 2
            pts.append(self.point(x, y))
        return pts

    def __str__(self):
        a1, a2, a3, a4, a6 = self.ainvs
        return f"y^2 + ({a1})xy + ({a3})y = x^3 + ({a2})x^2 + ({a4})x + ({a6})"

    def to_json(self):
        return {"ainvs": [q_to_json(a) for a in self.ainvs]}

    @staticmethod
    def from_json(obj) -> "EllipticCurve":
        return EllipticCurve(*[q_from_json(a) for a in obj["ainvs"]])


def _norm(v):
    if isinstance(v, Quad):
        return Quad.make(v.a, v.b, v.d)
    return to_q(v)


def _rational_roots(coeffs: list) -> list[mpq]:
    """Distinct rational roots of a polynomial with rational coefficients (high degree first)."""
    from sympy import Poly, QQ, symbols

    t = symbols("t")
    p = Poly([to_q(c) for c in coeffs], t, domain=QQ)
    roots = []
    for fac, _ in p.factor_list()[1]:
        if fac.degree() == 1:
            c1, c0 = fac.all_coeffs()
            roots.append(to_q(-c0 / c1))
    return roots


def point_add(E: EllipticCurve, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
    E.check(P)
    E.check(Q)
    return E.add(P, Q)


def torsion_order(E: EllipticCurve, P: CurvePoint, bound: int = 12) -> int | None:
    if bound < 1:
        raise ValueError("bound must be >= 1")
    return E.torsion_order(P, bound)


class Divisor(Mapping):
    """Finite formal sum of curve points with nonzero integer multiplicities."""

    __slots__ = ("_m", "_hash")

    def __init__(self, mults: Mapping[CurvePoint, int] | Iterable | None = None):
        m: dict[CurvePoint, int] = {}
        if mults is None:
            items = []
        elif isinstance(mults, Mapping):
            items = mults.items()
        else:
            items = mults
        for P, n in items:
            if not isinstance(P, CurvePoint):
                raise TypeError(f"divisor keys must be CurvePoint, got {P!r}")
            m[P] = m.get(P, 0) + int(n)
        self._m = {P: n for P, n in m.items() if n != 0}
        self._hash = None

    @staticmethod
    def point(P: CurvePoint, n: int = 1) -> "Divisor":
        return Divisor({P: n})

    def __getitem__(self, P):
        return self._m.get(P, 0)

    def __iter__(self) -> Iterator[CurvePoint]:
        return iter(self._m)

    def __len__(self):
        return len(self._m)

    def __contains__(self, P):
        return P in self._m

    @property
    def degree(self) -> int:
        return sum(self._m.values())

    @property
    def support(self) -> list[CurvePoint]:
        return sorted(self._m, key=CurvePoint.sort_key)

    def is_effective(self) -> bool:
        return all(n > 0 for n in self._m.values())

    def is_reduced(self) -> bool:
        return all(n == 1 for n in self._m.values())

    def affine_part(self) -> "Divisor":
        return Divisor({P: n for P, n in self._m.items() if not P.is_infinity})

    def __add__(self, other: "Divisor") -> "Divisor":
        out = dict(self._m)
        for P, n in other.items():
            out[P] = out.get(P, 0) + n
        return Divisor(out)

    def __neg__(self):
        return Divisor({P: -n for P, n in self._m.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, k: int):
        return Divisor({P: k * n for P, n in self._m.items()})

    __rmul__ = __mul__

    def __ge__(self, other):
        diff = self - other
        return all(n >= 0 for n in diff.values())

    def __eq__(self, other):
        if isinstance(other, Divisor):
            return self._m == other._m
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._m.items()))
        return self._hash

    def __repr__(self):
        if not self._m:
            return "Divisor(0)"
        terms = [f"{n}*{P!r}" for P, n in ((P, self._m[P]) for P in self.support)]
        return "Divisor(" + " + ".join(terms) + ")"

    def to_json(self):
        return [{"point": P.to_json(), "mult": self._m[P]} for P in self.support]

    @staticmethod
    def from_json(obj) -> "Divisor":
        return Divisor([(CurvePoint.from_json(t["point"]), int(t["mult"])) for t in obj])


@dataclass(frozen=True)
class DivisorClass:
    """A point of Pic(E) = Z x E: degree plus Abel-Jacobi sum."""

    curve: EllipticCurve = field(repr=False)
    degree: int
    aj: CurvePoint

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        self._same(other)
        return DivisorClass(self.curve, self.degree + other.degree, self.curve.add(self.aj, other.aj))

    def __neg__(self):
        return DivisorClass(self.curve, -self.degree, self.curve.neg(self.aj))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, k: int):
        return DivisorClass(self.curve, k * self.degree, self.curve.mul(k, self.aj))

    __rmul__ = __mul__

    def _same(self, other):
        if other.curve != self.curve:
            raise CurveError("divisor classes on different curves")

    @property
    def is_trivial(self) -> bool:
        return self.degree == 0 and self.aj.is_infinity

    def order(self, bound: int = 12) -> int | None:
        """Torsion order of a degree-0 class (None if above ``bound``)."""
        if self.degree != 0:
            return None
        return self.curve.torsion_order(self.aj, bound)

    def canonical_divisor(self) -> Divisor:
        """The representative Q + (d-1)*O of the class (d, Q)."""
        return Divisor({self.aj: 1}) + Divisor({O: self.degree - 1})

    @staticmethod
    def trivial(E: EllipticCurve) -> "DivisorClass":
        return DivisorClass(E, 0, O)

    @staticmethod
    def of_point(E: EllipticCurve, P: CurvePoint, n: int = 1) -> "DivisorClass":
        return DivisorClass(E, n, E.mul(n, P))

    def to_json(self):
        return {"degree": self.degree, "aj": self.aj.to_json()}


def class_of(E: EllipticCurve, D: Divisor) -> DivisorClass:
    aj = O
    for P, n in D.items():
        E.check(P)
        aj = E.add(aj, E.mul(n, P))
    return DivisorClass(E, D.degree, aj)


def lin_equiv(c1: DivisorClass, c2: DivisorClass) -> bool:
    return c1.degree == c2.degree and c1.aj == c2.aj


# --------------------------------------------------------------------------
# Tate normal form search

def tate_normal_form(b, c) -> EllipticCurve:
    """E(b, c): y^2 + (1 - c) xy - b y = x^3 - b x^2, with marked point (0, 0)."""
    b, c = to_q(b), to_q(c)
    return EllipticCurve(1 - c, -b, -b, 0, 0)


def _rationals_by_height(h: int) -> list[mpq]:
    seen = set()
    out = []
    for height in range(1, h + 1):
        for num, den in product(range(-height, height + 1), range(1, height + 1)):
            if max(abs(num), den) != height:
                continue
            q = mpq(num, den)
            if q not in seen:
                seen.add(q)
                out.append(q)
    out.sort(key=lambda q: (max(abs(int(q.numerator)), int(q.denominator)), abs(q), q < 0))
    return out


# one-parameter Tate normal form families with (0,0) of order N
_TATE_FAMILIES = {
    4: lambda t: (t, mpq(0)),
    5: lambda t: (t, t),
    6: lambda t: (t + t * t, t),
    7: lambda t: (t ** 3 - t ** 2, t ** 2 - t),
    8: lambda t: ((2 * t - 1) * (t - 1), (2 * t - 1) * (t - 1) / t),
}


@dataclass(frozen=True)
class TorsionFrame:
    """A curve with the named torsion points the catalog refers to."""

    curve: EllipticCurve
    points: Mapping[str, CurvePoint]
    search: Mapping[str, object]

    def __getitem__(self, name: str) -> CurvePoint:
        return self.points[name]

    def to_json(self):
        return {
            "curve": self.curve.to_json(),
            "points": {k: v.to_json() for k, v in sorted(self.points.items())},
            "search": dict(self.search),
        }


def _full_two_torsion(E: EllipticCurve) -> list[CurvePoint] | None:
    pts = E.two_torsion_points()
    return pts if len(pts) == 3 else None


def integral_short_model(E: EllipticCurve, max_scale: int = 10 ** 4):
    """An isomorphic curve y^2 = x^3 + A x^2 + B x + C with integer A, B, C.

    Completes the square in y, then rescales (x, y) -> (u^2 x, u^3 y) with the
    smallest positive integer u that clears denominators.  Returns the new
    curve and the point maps in both directions.
    """
    b2, b4, b6, _ = E.b_invariants
    A, B, C = b2 / 4, b4 / 2, b6 / 4
    for u in range(1, max_scale + 1):
        A2, B2, C2 = A * u ** 2, B * u ** 4, C * u ** 6
        if all(v.denominator == 1 for v in (A2, B2, C2)):
            break
    else:
        raise CurveError("no small integral scaling found")
    E2 = EllipticCurve(0, A2, 0, B2, C2)

    def phi(P: CurvePoint) -> CurvePoint:
        if P.is_infinity:
            return P
        Y = P.y + E.hx(P.x) / 2
        return E2.point(P.x * u ** 2, Y * u ** 3)

    def phi_inv(P: CurvePoint) -> CurvePoint:
        if P.is_infinity:
            return P
        x = P.x / u ** 2
        return E.point(x, P.y / u ** 3 - E.hx(x) / 2)

    return E2, phi, phi_inv


def rational_torsion_points(E: EllipticCurve) -> list[CurvePoint]:
    """All points of finite order in E(Q), by Nagell-Lutz on an integral model."""
    from sympy import divisors

    E2, _, back = integral_short_model(E)
    A, B, C = (int(v) for v in (E2.a2, E2.a4, E2.a6))
    disc = abs(int(-4 * A ** 3 * C + A ** 2 * B ** 2 + 18 * A * B * C - 4 * B ** 3 - 27 * C ** 2))
    ys = {0}
    for d in divisors(disc):
        r = int(gmpy2_isqrt(d))
        if r * r == d:
            ys.update({r, -r})
    found = [O]
    for yv in sorted(ys):
        for xv in _rational_roots([mpq(1), mpq(A), mpq(B), mpq(C - yv * yv)]):
            if xv.denominator != 1:
                continue
            P = CurvePoint(xv, mpq(yv))
            if E2.torsion_order(P, 12) is not None:
                found.append(back(P))
    return sorted(set(found), key=CurvePoint.sort_key)


def gmpy2_isqrt(n: int) -> int:
    import gmpy2

    return int(gmpy2.isqrt(n))


def find_torsion_curve(order: int, full_two_torsion: bool = False, max_height: int = 12) -> TorsionFrame:
    """Search Tate normal forms for a point of exact ``order`` (and optionally full 2-torsion).

    The marked point (0, 0) of E(b, c) has order N for the families in
    ``_TATE_FAMILIES``; a point of order n is taken as (N/n)*(0, 0) for the
    first N divisible by n.  Every claimed order is re-verified by iterating
    the group law.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    Ns = [N for N in sorted(_TATE_FAMILIES) if N % order == 0]
    if order in (1, 2, 3) and not Ns:
        Ns = [6]
    if not Ns:
        raise CurveError(f"no Tate family carries a point of order {order}")
    for t in _rationals_by_height(max_height):
        for N in Ns:
            try:
                b, c = _TATE_FAMILIES[N](t)
                E = tate_normal_form(b, c)
            except (CurveError, ZeroDivisionError):
                continue
            P0 = CurvePoint(mpq(0), mpq(0))
            if E.torsion_order(P0, 12) != N:
                continue
            P = E.mul(N // order, P0)
            if E.torsion_order(P, 12) != order:
                continue
            if full_two_torsion and _full_two_torsion(E) is None:
                continue
            E2, phi, _ = integral_short_model(E)
            pts = {"0": O, "p": phi(P)}
            if full_two_torsion:
                for i, Q in enumerate(_full_two_torsion(E2), start=1):
                    pts[f"eta{i}"] = Q
            if E2.torsion_order(pts["p"], 12) != order:
                raise CurveError("torsion order not preserved by the change of model")
            return TorsionFrame(E2, pts, {"family_order": N, "t": q_to_json(t), "b": q_to_json(b), "c": q_to_json(c), "point_order": order, "point": P.to_json()})
    raise CurveError(f"no curve found with a point of order {order} (full 2-torsion={full_two_torsion}) up to height {max_height}")
