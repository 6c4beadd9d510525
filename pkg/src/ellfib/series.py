"""Truncated Laurent series and local expansions of x, y at points of an elliptic curve.

A local uniformizer t at a point P is fixed once: t = x - x(P) at an affine
point that is not 2-torsion, t = y - y(P) at an affine 2-torsion point, and
t = -x/y at the origin.  Coefficients are mpq or Quad, whatever the point's
coordinates are defined over.
"""

from __future__ import annotations

from functools import lru_cache

from .ec_core import CurvePoint, EllipticCurve
from .qfield import mpq

__all__ = ["Laurent", "EXACT", "local_xy", "series_of_poly", "series_eval"]

# precision of a series known exactly (finitely many terms)
EXACT = 10 ** 9


def _z(c) -> bool:
    return not hasattr(c, "d") and c == 0


class Laurent:
    """sum_{k >= val} c_k t^k, known up to (exclusive) absolute precision ``prec``."""

    __slots__ = ("val", "coeffs", "prec")

    def __init__(self, val: int, coeffs, prec: int):
        coeffs = list(coeffs)[: max(prec - val, 0)]
        # strip leading zeros so val is the true valuation when possible
        i = 0
        while i < len(coeffs) and _z(coeffs[i]):
            i += 1
        if i == len(coeffs):
            self.val, self.coeffs, self.prec = prec, [], prec
        else:
            self.val, self.coeffs, self.prec = val + i, coeffs[i:], prec

    @staticmethod
    def const(c, prec: int = EXACT) -> "Laurent":
        return Laurent(0, [c], prec)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int):
        if k >= self.prec:
            raise ValueError(f"coefficient t^{k} beyond precision {self.prec}")
        i = k - self.val
        if i < 0 or i >= len(self.coeffs):
            return mpq(0)
        return self.coeffs[i]

    def __add__(self, other):
        if not isinstance(other, Laurent):
            other = Laurent.const(other, self.prec)
        prec = min(self.prec, other.prec)
        live = [s for s in (self, other) if s.coeffs]
        if not live:
            return Laurent(0, [], prec)
        lo = min(s.val for s in live)
        hi = min(prec, max(s.val + len(s.coeffs) for s in live))
        out = [self.coeff(k) + other.coeff(k) for k in range(lo, hi)]
        return Laurent(lo, out, prec)

    __radd__ = __add__

    def __neg__(self):
        return Laurent(self.val, [-c for c in self.coeffs], self.prec)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Laurent):
            if _z(other):
                return Laurent(0, [], EXACT)
            return Laurent(self.val, [c * other for c in self.coeffs], self.prec)
        if self.is_zero or other.is_zero:
            # a zero series has val == prec, so the generic bound still applies
            return Laurent(0, [], min(self.prec + other.val, other.prec + self.val))
        val = self.val + other.val
        prec = min(self.prec + other.val, other.prec + self.val)
        a, b = self.coeffs, other.coeffs
        n = min(prec - val, len(a) + len(b) - 1)
        out = []
        for k in range(n):
            s = 0
            for i in range(max(0, k - len(b) + 1), min(k + 1, len(a))):
                s = s + a[i] * b[k - i]
            out.append(s)
        return Laurent(val, out, prec)

    __rmul__ = __mul__

    def inverse(self) -> "Laurent":
        if self.is_zero:
            raise ZeroDivisionError("series is zero to working precision")
        if self.prec >= EXACT // 2:
            if len(self.coeffs) == 1:
                return Laurent(-self.val, [1 / self.coeffs[0]], EXACT)
            raise ValueError("inverse of an exact series needs a working precision")
        a = self.coeffs
        n = self.prec - self.val  # relative precision
        inv0 = 1 / a[0]
        out = [inv0]
        for k in range(1, n):
            s = 0
            for i in range(1, min(k + 1, len(a))):
                s = s + a[i] * out[k - i]
            out.append(-s * inv0)
        return Laurent(-self.val, out, n - self.val)

    def __truediv__(self, other):
        if isinstance(other, Laurent):
            return self * other.inverse()
        return self * (1 / other)

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = Laurent.const(mpq(1))
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __repr__(self):
        return f"Laurent(val={self.val}, {self.coeffs}, prec={self.prec})"


def _is_two_torsion(E: EllipticCurve, P: CurvePoint) -> bool:
    return E.dF_dy(P.x, P.y) == 0


def _local_xy(E: EllipticCurve, P: CurvePoint, prec: int) -> tuple[Laurent, Laurent]:
    if P.is_infinity:
        a1, a2, a3, a4, a6 = E.ainvs
        # w = -1/y as a power series in t = -x/y; w = t^3 + ...
        n = prec + 6
        t = Laurent(1, [mpq(1)], n)
        w = Laurent(3, [mpq(1)], n)
        for _ in range(n):
            w = t ** 3 + a1 * t * w + a2 * (t * t) * w + a3 * (w * w) + a4 * t * (w * w) + a6 * w ** 3
        x = t / w
        y = Laurent(0, [mpq(-1)], n) / w
        return _trunc(x, prec), _trunc(y, prec)
    n = prec + 1
    t = Laurent(1, [mpq(1)], n)
    x0, y0 = P.x, P.y
    if not _is_two_torsion(E, P):
        x = Laurent(0, [x0, mpq(1)], n)
        y = Laurent.const(y0, n)
        fy = E.dF_dy(x0, y0)
        for _ in range(n):
            y = y - _F(E, x, y) / fy
        return _trunc(x, prec), _trunc(y, prec)
    y = Laurent(0, [y0, mpq(1)], n)
    x = Laurent.const(x0, n)
    fx = E.dF_dx(x0, y0)
    for _ in range(n):
        x = x - _F(E, x, y) / fx
    return _trunc(x, prec), _trunc(y, prec)


def _trunc(s: Laurent, prec: int) -> Laurent:
    return Laurent(s.val, s.coeffs, min(s.prec, prec))


def _F(E, x, y):
    a1, a2, a3, a4, a6 = E.ainvs
    return y * y + a1 * x * y + a3 * y - (x * x * x + a2 * x * x + a4 * x + a6)


@lru_cache(maxsize=4096)
def local_xy(E: EllipticCurve, P: CurvePoint, prec: int) -> tuple[Laurent, Laurent]:
    """Laurent expansions (x(t), y(t)) at P, correct to absolute precision ``prec``."""
    return _local_xy(E, P, prec)


def series_of_poly(coeffs_hi_first, s: Laurent) -> Laurent:
    """Horner evaluation of a univariate polynomial (high degree first) at a series."""
    out = Laurent(0, [], EXACT)
    for c in coeffs_hi_first:
        out = out * s + c
    return out


def series_eval(s: Laurent):
    """Value at t = 0 of a series without pole."""
    if not s.is_zero and s.val < 0:
        raise ZeroDivisionError("series has a pole")
    return s.coeff(0)
