"""Rational functions on E, sections of line bundles O(D), and Riemann-Roch spaces.

A rational function is stored as (g0(x) + g1(x) y) / h(x) with h monic and
no common factor of g0, g1, h.  A section of O(D) is a pair (representative
divisor R, function f) with div f + R >= 0; sections with the same class but
different representatives are different objects, and sums need equal
representatives.  All polynomial arithmetic goes through sympy's dense
univariate routines over QQ (elements are gmpy2 mpq).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from sympy.polys.densearith import dup_add, dup_mul, dup_mul_ground, dup_neg, dup_quo_ground, dup_exquo, dup_sub
from sympy.polys.densebasic import dup_degree, dup_strip
from sympy.polys.densetools import dup_eval
from sympy.polys.domains import QQ
from sympy.polys.euclidtools import dup_gcd
from sympy.polys.factortools import dup_factor_list
from sympy.polys.matrices import DomainMatrix

from .ec_core import CurveError, CurvePoint, Divisor, DivisorClass, EllipticCurve, O, class_of
from .qfield import Quad, is_zero, mpq, q_from_json, q_to_json, squarefree_part, to_q
from .series import EXACT, Laurent, local_xy, series_of_poly

__all__ = [
    "PoleError",
    "FieldError",
    "RationalFunction",
    "Section",
    "h0",
    "hom_dim",
    "rr_basis",
    "riemann_roch_space",
    "unit_section",
    "section_mul",
    "section_eval",
    "zero_divisor",
]


class PoleError(ZeroDivisionError):
    """Evaluation of a function or section at one of its poles."""


class FieldError(ArithmeticError):
    """A point needed by the computation is not defined over Q or a quadratic field."""


def _p(coeffs) -> list:
    return dup_strip([QQ.convert(to_q(c)) if not isinstance(c, type(QQ(1))) else c for c in coeffs])


ONE = [QQ(1)]
X = [QQ(1), QQ(0)]


def _peval(f, v):
    """Horner evaluation at an mpq or Quad."""
    out = mpq(0)
    for c in f:
        out = out * v + c
    return out


def _deg(f) -> int:
    d = dup_degree(f)
    return -1 if d < 0 else d


# ---------------------------------------------------------------------------
# rational functions


class RationalFunction:
    """(g0(x) + g1(x) y) / h(x) on a fixed Weierstrass curve, in canonical form."""

    __slots__ = ("E", "g0", "g1", "h")

    def __init__(self, E: EllipticCurve, g0, g1, h=ONE):
        g0, g1, h = _p(g0), _p(g1), _p(h)
        if not h:
            raise ZeroDivisionError("zero denominator")
        if not g0 and not g1:
            g0, g1, h = [], [], ONE
        else:
            c = dup_gcd(dup_gcd(g0, g1, QQ) if g0 and g1 else (g0 or g1), h, QQ)
            if _deg(c) > 0:
                g0 = dup_exquo(g0, c, QQ) if g0 else []
                g1 = dup_exquo(g1, c, QQ) if g1 else []
                h = dup_exquo(h, c, QQ)
            lc = h[0]
            if lc != 1:
                g0 = dup_quo_ground(g0, lc, QQ)
                g1 = dup_quo_ground(g1, lc, QQ)
                h = dup_quo_ground(h, lc, QQ)
        self.E, self.g0, self.g1, self.h = E, g0, g1, h

    # constructors
    @staticmethod
    def const(E, c) -> "RationalFunction":
        return RationalFunction(E, [to_q(c)], [])

    @staticmethod
    def x(E) -> "RationalFunction":
        return RationalFunction(E, X, [])

    @staticmethod
    def y(E) -> "RationalFunction":
        return RationalFunction(E, [], ONE)

    @property
    def is_zero(self) -> bool:
        return not self.g0 and not self.g1

    def _same(self, other):
        if other.E != self.E:
            raise CurveError("functions on different curves")

    def _lift(self, other):
        if isinstance(other, RationalFunction):
            self._same(other)
            return other
        return RationalFunction.const(self.E, other)

    def __add__(self, other):
        other = self._lift(other)
        h = dup_mul(self.h, other.h, QQ)
        g0 = dup_add(dup_mul(self.g0, other.h, QQ), dup_mul(other.g0, self.h, QQ), QQ)
        g1 = dup_add(dup_mul(self.g1, other.h, QQ), dup_mul(other.g1, self.h, QQ), QQ)
        return RationalFunction(self.E, g0, g1, h)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(self.E, dup_neg(self.g0, QQ), dup_neg(self.g1, QQ), self.h)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, RationalFunction):
            c = QQ.convert(to_q(other))
            return RationalFunction(self.E, dup_mul_ground(self.g0, c, QQ), dup_mul_ground(self.g1, c, QQ), self.h)
        self._same(other)
        E = self.E
        f3 = _p([1, E.a2, E.a4, E.a6])
        hx = _p([E.a1, E.a3])
        a0, a1_, b0, b1 = self.g0, self.g1, other.g0, other.g1
        yy = dup_mul(a1_, b1, QQ)
        # y^2 = f3 - hx * y
        g0 = dup_add(dup_mul(a0, b0, QQ), dup_mul(yy, f3, QQ), QQ)
        g1 = dup_sub(dup_add(dup_mul(a0, b1, QQ), dup_mul(a1_, b0, QQ), QQ), dup_mul(yy, hx, QQ), QQ)
        return RationalFunction(E, g0, g1, dup_mul(self.h, other.h, QQ))

    __rmul__ = __mul__

    def norm_numerator(self) -> list:
        """N(g) = g * conj(g) as a polynomial in x, for the numerator g = g0 + g1 y."""
        E = self.E
        f3 = _p([1, E.a2, E.a4, E.a6])
        hx = _p([E.a1, E.a3])
        g0, g1 = self.g0, self.g1
        return dup_sub(dup_sub(dup_mul(g0, g0, QQ), dup_mul(dup_mul(hx, g0, QQ), g1, QQ), QQ),
                       dup_mul(f3, dup_mul(g1, g1, QQ), QQ), QQ)

    def inverse(self) -> "RationalFunction":
        if self.is_zero:
            raise ZeroDivisionError("inverse of the zero function")
        hx = _p([self.E.a1, self.E.a3])
        # 1/g = conj(g)/N(g), conj(g) = g0 - g1 hx - g1 y
        c0 = dup_sub(self.g0, dup_mul(self.g1, hx, QQ), QQ)
        c1 = dup_neg(self.g1, QQ)
        n = self.norm_numerator()
        return RationalFunction(self.E, dup_mul(c0, self.h, QQ), dup_mul(c1, self.h, QQ), n)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = RationalFunction.const(self.E, 1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.E == other.E and self.g0 == other.g0 and self.g1 == other.g1 and self.h == other.h

    def __hash__(self):
        return hash((tuple(self.g0), tuple(self.g1), tuple(self.h)))

    # orders and expansions
    def numerator_pole_order(self) -> int:
        """Pole order at O of the numerator g0 + g1 y (0 for constants)."""
        return max(2 * _deg(self.g0) if self.g0 else -1, 2 * _deg(self.g1) + 3 if self.g1 else -1, 0)

    def ord_at(self, P: CurvePoint) -> int:
        if self.is_zero:
            raise ValueError("order of the zero function")
        if P.is_infinity:
            return -self.numerator_pole_order() + 2 * _deg(self.h)
        return _ord_num(self.E, self.g0, self.g1, P) - _ord_num(self.E, self.h, [], P)

    def series_at(self, P: CurvePoint, prec: int) -> Laurent:
        """Expansion in the fixed uniformizer at P, to absolute precision ``prec``."""
        vh = -2 * _deg(self.h) if P.is_infinity else _ord_num(self.E, self.h, [], P)
        work = prec + max(vh, 0) + 4 + (2 * _deg(self.h) + self.numerator_pole_order() if P.is_infinity else 0)
        xs, ys = local_xy(self.E, P, work)
        num = series_of_poly(self.g0, xs) + series_of_poly(self.g1, xs) * ys
        den = series_of_poly(self.h, xs)
        den = Laurent(den.val, den.coeffs, min(den.prec, work + 2 * len(self.h)))
        out = num / den
        if out.prec < prec:
            raise ArithmeticError("insufficient working precision")
        return Laurent(out.val, out.coeffs, prec)

    def __call__(self, P: CurvePoint):
        if P.is_infinity:
            if self.ord_at(P) < 0:
                raise PoleError("pole at O")
            if self.ord_at(P) > 0 or self.is_zero:
                return mpq(0)
            s = self.series_at(P, 1)
            return s.coeff(0)
        hv = _peval(self.h, P.x)
        if not is_zero(hv):
            return (_peval(self.g0, P.x) + _peval(self.g1, P.x) * P.y) / hv
        if self.is_zero:
            return mpq(0)
        if self.ord_at(P) < 0:
            raise PoleError(f"pole at {P!r}")
        return self.series_at(P, 1).coeff(0)

    def __repr__(self):
        return f"RationalFunction(({_fmt(self.g0)}) + ({_fmt(self.g1)})*y / ({_fmt(self.h)}))"

    def to_json(self):
        return {"g0": [q_to_json(c) for c in self.g0], "g1": [q_to_json(c) for c in self.g1], "h": [q_to_json(c) for c in self.h]}

    @staticmethod
    def from_json(E, obj) -> "RationalFunction":
        return RationalFunction(E, [q_from_json(c) for c in obj["g0"]], [q_from_json(c) for c in obj["g1"]], [q_from_json(c) for c in obj["h"]])


def _fmt(f) -> str:
    if not f:
        return "0"
    d = len(f) - 1
    terms = []
    for i, c in enumerate(f):
        if c == 0:
            continue
        e = d - i
        terms.append(f"{c}" + ("" if e == 0 else ("*x" if e == 1 else f"*x^{e}")))
    return " + ".join(terms)


def _ord_num(E: EllipticCurve, g0, g1, P: CurvePoint) -> int:
    """ord_P(g0(x) + g1(x) y) at an affine point, exactly."""
    if not g0 and not g1:
        raise ValueError("order of zero")
    # the total number of zeros equals the pole order at O: a safe precision bound
    bound = max(2 * _deg(g0) if g0 else 0, 2 * _deg(g1) + 3 if g1 else 0) + 1
    xs, ys = local_xy(E, P, bound + 1)
    s = series_of_poly(g0, xs) + series_of_poly(g1, xs) * ys
    if s.is_zero:
        raise ArithmeticError("order exceeds the degree bound")
    return s.val


# ---------------------------------------------------------------------------
# sections


@dataclass(frozen=True, eq=False)
class Section:
    """A global section of O(rep): a function f with div f + rep >= 0."""

    rep: Divisor
    func: RationalFunction

    @property
    def curve(self) -> EllipticCurve:
        return self.func.E

    @property
    def cls(self) -> DivisorClass:
        return class_of(self.curve, self.rep)

    @property
    def is_zero(self) -> bool:
        return self.func.is_zero

    def __mul__(self, other):
        if isinstance(other, Section):
            return Section(self.rep + other.rep, self.func * other.func)
        return Section(self.rep, self.func * other)

    __rmul__ = __mul__

    def __add__(self, other: "Section") -> "Section":
        if self.rep != other.rep:
            raise CurveError("adding sections with different representative divisors")
        return Section(self.rep, self.func + other.func)

    def __neg__(self):
        return Section(self.rep, -self.func)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        return isinstance(other, Section) and self.rep == other.rep and self.func == other.func

    def __hash__(self):
        return hash((self.rep, self.func))

    def twist(self, u: "Section") -> "Section":
        """Multiply by a unit section, moving to another representative of the same class."""
        return self * u

    def local_series(self, b: CurvePoint, prec: int) -> Laurent:
        """f * t^{rep(b)} at b, a power series (valuation >= 0) in the uniformizer."""
        if self.is_zero:
            return Laurent(0, [], EXACT)
        s = self.func.series_at(b, prec - self.rep[b])
        out = Laurent(s.val + self.rep[b], s.coeffs, s.prec + self.rep[b])
        if not out.is_zero and out.val < 0:
            raise CurveError(f"section violates its pole bound at {b!r}")
        return out

    def local_value(self, b: CurvePoint):
        """Value at b in the local trivialization t^{-rep(b)} of O(rep)."""
        if self.is_zero:
            return mpq(0)
        return self.local_series(b, 1).coeff(0)

    def order_at(self, b: CurvePoint) -> int:
        """Multiplicity of b in the zero divisor."""
        return self.func.ord_at(b) + self.rep[b]

    def check(self) -> bool:
        """Verify the pole bound at O, at the support of rep and at the poles of f."""
        if self.is_zero:
            return True
        pts = set(self.rep.support) | set(_pole_candidates(self.func)) | {O}
        return all(self.order_at(P) >= 0 for P in pts)

    def to_json(self):
        return {"rep": self.rep.to_json(), "func": self.func.to_json()}

    @staticmethod
    def from_json(E, obj) -> "Section":
        return Section(Divisor.from_json(obj["rep"]), RationalFunction.from_json(E, obj["func"]))

    def __repr__(self):
        return f"Section(rep={self.rep!r}, {self.func!r})"


def section_mul(s: Section, t: Section) -> Section:
    return s * t


def section_eval(s: Section, b: CurvePoint):
    """Value of the underlying function at b (pole error at poles)."""
    return s.func(b)


# ---------------------------------------------------------------------------
# points over Q or a quadratic field


def _points_over_x(E: EllipticCurve, x0) -> list[CurvePoint]:
    """All points with abscissa x0 (x0 rational), as rational or quadratic points."""
    hx = E.hx(x0)
    disc = hx * hx + 4 * E.f3(x0)
    if disc == 0:
        return [CurvePoint(x0, -hx / 2)]
    r = Quad.sqrt_of(disc)
    return [CurvePoint(x0, _q(( -hx + r) / 2)), CurvePoint(x0, _q((-hx - r) / 2))]


def _q(v):
    if isinstance(v, Quad):
        return Quad.make(v.a, v.b, v.d)
    return to_q(v)


def _roots_xpoly(f) -> list:
    """Distinct roots of a polynomial over QQ lying in Q or a quadratic field."""
    out = []
    if _deg(f) <= 0:
        return out
    for fac, _ in dup_factor_list(f, QQ)[1]:
        d = _deg(fac)
        if d == 1:
            out.append(-fac[1] / fac[0])
        elif d == 2:
            a, b, c = fac
            disc = b * b - 4 * a * c
            r = Quad.sqrt_of(disc)
            out.append(_q((-b + r) / (2 * a)))
            out.append(_q((-b - r) / (2 * a)))
        else:
            raise FieldError(f"zero abscissae of degree {d} over Q")
    return out


def _pole_candidates(f: RationalFunction) -> list[CurvePoint]:
    pts = []
    for x0 in _roots_xpoly(f.h):
        if isinstance(x0, Quad):
            raise FieldError("pole at a point of degree > 2")
        pts.extend(_points_over_x(f.E, x0))
    return pts


def _zero_candidates(f: RationalFunction) -> list[CurvePoint]:
    E = f.E
    g0, g1 = f.g0, f.g1
    pts = []
    if g0 and g1:
        c = dup_gcd(g0, g1, QQ)
    else:
        c = g0 or g1
    if not g1:
        # g = g0(x): zeros are all points over the roots of g0
        for x0 in _roots_xpoly(g0):
            if isinstance(x0, Quad):
                pts.extend(_points_over_quad_x(E, x0))
            else:
                pts.extend(_points_over_x(E, x0))
        return pts
    for x0 in _roots_xpoly(c) if _deg(c) > 0 else []:
        if isinstance(x0, Quad):
            pts.extend(_points_over_quad_x(E, x0))
        else:
            pts.extend(_points_over_x(E, x0))
    r0 = dup_exquo(g0, c, QQ) if g0 else []
    r1 = dup_exquo(g1, c, QQ)
    red = RationalFunction(E, r0, r1)
    for x0 in _roots_xpoly(red.norm_numerator()):
        yv = -_peval(r0, x0) / _peval(r1, x0)
        pts.append(CurvePoint(_q(x0), _q(yv)))
    return pts


def _points_over_quad_x(E, x0: Quad) -> list[CurvePoint]:
    from .qfield import sqrt_in_field

    hx = E.hx(x0)
    disc = hx * hx + 4 * E.f3(x0)
    if is_zero(disc):
        return [CurvePoint(x0, _q(-hx / 2))]
    r = sqrt_in_field(disc)
    if r is None:
        raise FieldError("points over a quadratic abscissa are not quadratic")
    return [CurvePoint(x0, _q((-hx + r) / 2)), CurvePoint(x0, _q((-hx - r) / 2))]


def zero_divisor(s: Section) -> Divisor:
    """div(f) + rep; raises FieldError if a zero is not defined over a quadratic field."""
    if s.is_zero:
        raise ValueError("zero divisor of the zero section")
    E = s.curve
    cands = set(s.rep.support) | set(_zero_candidates(s.func)) | set(_pole_candidates(s.func)) | {O}
    out = {}
    for P in cands:
        m = s.order_at(P)
        if m < 0:
            raise CurveError(f"section has a pole at {P!r}")
        if m:
            out[P] = m
    D = Divisor(out)
    if D.degree != s.rep.degree:
        raise ArithmeticError(f"zero divisor degree {D.degree} != {s.rep.degree}")
    return D


# ---------------------------------------------------------------------------
# Riemann-Roch


def h0(c: DivisorClass) -> int:
    if c.degree > 0:
        return c.degree
    if c.degree == 0 and c.aj.is_infinity:
        return 1
    return 0


def hom_dim(src: DivisorClass, dst: DivisorClass) -> int:
    return h0(dst - src)


def _ord_x_minus(P: CurvePoint, x0, E) -> int:
    """ord_P(x - x0) at an affine point P."""
    if P.x != x0:
        return 0
    return 2 if E.dF_dy(P.x, P.y) == 0 else 1


def _require_rational_support(D: Divisor):
    for P in D:
        if not P.is_rational:
            raise FieldError("Riemann-Roch spaces are computed for divisors with rational support")


@lru_cache(maxsize=2048)
def _rr_cached(E: EllipticCurve, D: Divisor) -> tuple:
    _require_rational_support(D)
    for P in D:
        E.check(P)
    if D.degree < 0:
        return ()
    if D.degree == 0:
        # L(D) is L(D + O) when D is principal, and 0 otherwise
        if not class_of(E, D).is_trivial:
            return ()
        sp = _rr_cached(E, D + Divisor({O: 1}))
        return tuple(Section(D, s.func) for s in sp if s.order_at(O) >= 1)
    h = ONE
    poles = []
    for P, n in D.items():
        if not P.is_infinity and n > 0:
            poles.append(P)
            h = dup_mul(h, _pow([QQ(1), -P.x], n), QQ)
    n_O = D[O]
    N = 2 * _deg(h) + n_O
    monos = []  # (g0, g1, pole order)
    for i in range(N // 2 + 1):
        monos.append(([QQ(1)] + [QQ(0)] * i, [], 2 * i))
    for i in range(max((N - 3) // 2 + 1, 0)):
        monos.append(([], [QQ(1)] + [QQ(0)] * i, 2 * i + 3))
    monos.sort(key=lambda m: -m[2])
    # points where the numerator must vanish: support of D and the zeros of h
    pts = {P for P in D if not P.is_infinity}
    for P in poles:
        pts.add(E.neg(P))
    rows = []
    for P in sorted(pts, key=CurvePoint.sort_key):
        ord_h = sum(n * _ord_x_minus(P, Q.x, E) for Q, n in D.items() if n > 0 and not Q.is_infinity)
        m = ord_h - D[P]
        if m <= 0:
            continue
        xs, ys = local_xy(E, P, m + 1)
        sers = [series_of_poly(g0, xs) + series_of_poly(g1, xs) * ys for g0, g1, _ in monos]
        for k in range(m):
            rows.append([QQ.convert(s.coeff(k)) for s in sers])
    ncol = len(monos)
    if rows:
        K = DomainMatrix(rows, (len(rows), ncol), QQ).nullspace()
        kernel = [row for row in K.rref()[0].to_list() if any(row)] if K.shape[0] else []
    else:
        kernel = [[QQ(1) if j == i else QQ(0) for j in range(ncol)] for i in range(ncol)]
    out = []
    for vec in kernel:
        g0, g1 = [], []
        for c, (m0, m1, _) in zip(vec, monos):
            if c:
                g0 = dup_add(g0, dup_mul_ground(m0, c, QQ), QQ) if m0 else g0
                g1 = dup_add(g1, dup_mul_ground(m1, c, QQ), QQ) if m1 else g1
        out.append(Section(D, RationalFunction(E, g0, g1, h)))
    if len(out) != D.degree:
        raise ArithmeticError(f"L(D) has dimension {len(out)}, expected {D.degree}")
    return tuple(out)


def _pow(f, n):
    out = ONE
    for _ in range(n):
        out = dup_mul(out, f, QQ)
    return out


def riemann_roch_space(E: EllipticCurve, D: Divisor) -> list[Section]:
    """A basis of L(D) for any degree (empty for deg < 0, at most one section for deg 0)."""
    return list(_rr_cached(E, D))


def rr_basis(E: EllipticCurve, D: Divisor) -> list[Section]:
    if D.degree <= 0:
        raise ValueError("rr_basis needs a divisor of positive degree")
    return list(_rr_cached(E, D))


@lru_cache(maxsize=2048)
def unit_section(E: EllipticCurve, R: Divisor) -> Section:
    """The nowhere-vanishing section of O(R) for R principal, normalized to local value 1 at O."""
    sp = _rr_cached(E, R)
    if R.degree != 0 or len(sp) != 1:
        raise CurveError(f"{R!r} is not principal")
    s = sp[0]
    v = s.local_value(O)
    return s * (1 / v)
