"""Exact scalars: rationals (gmpy2.mpq) and elements of quadratic fields Q(sqrt d).

Points of a degree-2 divisor on a rational elliptic curve are defined over
Q or over a single quadratic field, so these two kinds of scalars are all the
pointwise checks need.  A :class:`Quad` whose irrational part vanishes is
always collapsed back to an ``mpq``; equality and hashing therefore agree
across the two representations.
"""

from __future__ import annotations

from fractions import Fraction

import gmpy2
from gmpy2 import mpq

__all__ = ["mpq", "Quad", "to_q", "is_zero", "sqrt_in_field", "squarefree_part", "q_to_json", "q_from_json"]


def to_q(v) -> mpq:
    """Coerce ints, Fractions, strings like ``"3/4"`` and ``[p, q]`` pairs to mpq."""
    if isinstance(v, type(mpq())):
        return v
    if isinstance(v, bool):
        raise TypeError("bool is not a rational")
    if isinstance(v, int):
        return mpq(v)
    if isinstance(v, Fraction):
        return mpq(v.numerator, v.denominator)
    if isinstance(v, str):
        return mpq(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return mpq(int(v[0]), int(v[1]))
    if isinstance(v, Quad):
        raise TypeError("irrational quadratic number is not rational")
    if getattr(v, "is_Rational", False):
        # sympy Integer / Rational
        return mpq(int(v.p), int(v.q))
    raise TypeError(f"cannot interpret {v!r} as a rational")


def q_to_json(v: mpq) -> list[int]:
    v = to_q(v)
    return [int(v.numerator), int(v.denominator)]


def q_from_json(v) -> mpq:
    return to_q(v)


def squarefree_part(n: int) -> int:
    """Signed squarefree part of a nonzero integer (trial division, small inputs)."""
    if n == 0:
        raise ValueError("zero has no squarefree part")
    sign = -1 if n < 0 else 1
    n = abs(n)
    out = 1
    f = 2
    while f * f <= n:
        e = 0
        while n % f == 0:
            n //= f
            e += 1
        if e % 2:
            out *= f
        f += 1
    return sign * out * n


class Quad:
    """a + b*sqrt(d) with rational a, b and squarefree d not in {0, 1}."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d: int):
        self.a = to_q(a)
        self.b = to_q(b)
        self.d = int(d)

    @staticmethod
    def make(a, b, d: int):
        a, b = to_q(a), to_q(b)
        if b == 0:
            return a
        return Quad(a, b, d)

    @staticmethod
    def sqrt_of(n) -> "Quad | mpq":
        """sqrt(n) for rational n, as an element of Q or Q(sqrt(sf(n)))."""
        n = to_q(n)
        r = _rational_sqrt(n)
        if r is not None:
            return r
        num, den = int(n.numerator), int(n.denominator)
        d = squarefree_part(num * den)
        # n = d * (c)^2 with c = sqrt(n/d)
        c = _rational_sqrt(n / d)
        assert c is not None
        return Quad(0, c, d)

    def _coerce(self, other):
        if isinstance(other, Quad):
            if other.d != self.d:
                raise ValueError(f"mixing Q(sqrt {self.d}) and Q(sqrt {other.d})")
            return other.a, other.b
        if isinstance(other, (int, type(mpq()), Fraction)):
            return to_q(other), mpq(0)
        return None

    def __add__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return Quad.make(self.a + c[0], self.b + c[1], self.d)

    __radd__ = __add__

    def __neg__(self):
        return Quad(-self.a, -self.b, self.d)

    def __sub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return Quad.make(self.a - c[0], self.b - c[1], self.d)

    def __rsub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return Quad.make(c[0] - self.a, c[1] - self.b, self.d)

    def __mul__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        a, b = c
        return Quad.make(self.a * a + self.d * self.b * b, self.a * b + self.b * a, self.d)

    __rmul__ = __mul__

    def norm(self) -> mpq:
        return self.a * self.a - self.d * self.b * self.b

    def conjugate(self) -> "Quad":
        return Quad(self.a, -self.b, self.d)

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("zero in quadratic field")
        return Quad.make(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        if isinstance(other, Quad):
            return self * other.inverse()
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        if c[0] == 0:
            raise ZeroDivisionError("division by zero")
        return Quad.make(self.a / c[0], self.b / c[0], self.d)

    def __rtruediv__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return self.inverse() * c[0]

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = mpq(1)
        base = self
        while n:
            if n & 1:
                out = base * out
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, Quad):
            return self.d == other.d and self.a == other.a and self.b == other.b
        # a collapsed Quad always has b != 0, so it never equals a rational
        return False

    def __hash__(self):
        return hash(("Quad", self.a, self.b, self.d))

    def __bool__(self):
        return True

    def __repr__(self):
        return f"Quad({self.a}, {self.b}, {self.d})"

    def __str__(self):
        return f"({self.a} + {self.b}*sqrt({self.d}))"

    def to_json(self):
        return {"a": q_to_json(self.a), "b": q_to_json(self.b), "d": self.d}


def is_zero(v) -> bool:
    return (not isinstance(v, Quad)) and v == 0


def _rational_sqrt(n: mpq):
    if n < 0:
        return None
    p, q = int(n.numerator), int(n.denominator)
    rp, ep = gmpy2.iroot(p, 2)
    rq, eq = gmpy2.iroot(q, 2)
    if ep and eq:
        return mpq(int(rp), int(rq))
    return None


def sqrt_in_field(v, d: int | None = None):
    """A square root of ``v`` inside Q(sqrt d) (or Q), or None if there is none.

    ``v`` may be rational or a Quad.  With ``d`` given, a rational ``v`` may also
    have its root in Q(sqrt d).  Returns None when leaving the field is needed.
    """
    if isinstance(v, Quad):
        # (u + w sqrt d)^2 = a + b sqrt d  =>  u^2 solves u^4 - a u^2 - d b^2 / 4 = 0
        a, b, dd = v.a, v.b, v.d
        disc = _rational_sqrt(a * a - dd * b * b)
        if disc is None:
            return None
        for u2 in ((a + disc) / 2, (a - disc) / 2):
            u = _rational_sqrt(u2)
            if u is not None and u != 0:
                w = b / (2 * u)
                cand = Quad.make(u, w, dd)
                if cand * cand == v:
                    return cand
        return None
    v = to_q(v)
    r = _rational_sqrt(v)
    if r is not None:
        return r
    if d is not None:
        c = _rational_sqrt(v / d)
        if c is not None:
            return Quad(0, c, d)
    return None
