"""Chow ring of P(V) for a rank-3 bundle V over a curve of genus b.

Basis 1, H, F, H^2, HF, H^2F with F^2 = 0, H^3 = deg(V) H^2F and H^2F the class
of a point.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

__all__ = [
    "ChowClass",
    "ChowError",
    "BASIS",
    "chow_mul",
    "top_degree",
    "section_class",
    "canonical_classes",
    "parse_chow",
    "evaluate",
]

# (power of H, power of F)
BASIS = ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (2, 1))
_NAMES = ("1", "H", "F", "H^2", "H*F", "H^2*F")
_INDEX = {m: i for i, m in enumerate(BASIS)}


class ChowError(ValueError):
    pass


@dataclass(frozen=True)
class ChowClass:
    coeffs: tuple = (0, 0, 0, 0, 0, 0)
    deg_v: int = 5
    genus: int = 1

    def __post_init__(self):
        if len(self.coeffs) != 6:
            raise ChowError("a class has six coordinates")
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    @staticmethod
    def one(deg_v=5, genus=1):
        return ChowClass((1, 0, 0, 0, 0, 0), deg_v, genus)

    @staticmethod
    def H(deg_v=5, genus=1):
        return ChowClass((0, 1, 0, 0, 0, 0), deg_v, genus)

    @staticmethod
    def F(deg_v=5, genus=1):
        return ChowClass((0, 0, 1, 0, 0, 0), deg_v, genus)

    def _ring(self, other):
        if isinstance(other, ChowClass) and (other.deg_v, other.genus) != (self.deg_v, self.genus):
            raise ChowError("classes from different rings")

    def _lift(self, other):
        if isinstance(other, ChowClass):
            self._ring(other)
            return other
        if isinstance(other, int):
            return ChowClass((other, 0, 0, 0, 0, 0), self.deg_v, self.genus)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return ChowClass(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), self.deg_v, self.genus)

    __radd__ = __add__

    def __neg__(self):
        return ChowClass(tuple(-a for a in self.coeffs), self.deg_v, self.genus)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return chow_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ChowError("negative power")
        out = ChowClass.one(self.deg_v, self.genus)
        for _ in range(n):
            out = out * self
        return out

    def degree_parts(self) -> dict:
        out = {}
        for c, (a, b) in zip(self.coeffs, BASIS):
            if c:
                out.setdefault(a + b, []).append((a, b))
        return out

    def is_pure(self) -> bool:
        return len(self.degree_parts()) <= 1

    def __str__(self):
        terms = []
        for c, name in zip(self.coeffs, _NAMES):
            if not c:
                continue
            if name == "1":
                terms.append(str(c))
            elif c == 1:
                terms.append(name)
            elif c == -1:
                terms.append("-" + name)
            else:
                terms.append(f"{c}*{name}")
        return "+".join(terms).replace("+-", "-") if terms else "0"


def _mono_mul(m1, m2, deg_v) -> tuple[int, tuple | None]:
    a, b = m1[0] + m2[0], m1[1] + m2[1]
    if b > 1 or a + b > 3:
        return 0, None
    if (a, b) == (3, 0):
        return deg_v, (2, 1)
    return 1, (a, b)


def chow_mul(x: ChowClass, y: ChowClass) -> ChowClass:
    x._ring(y)
    out = [0] * 6
    for c1, m1 in zip(x.coeffs, BASIS):
        if not c1:
            continue
        for c2, m2 in zip(y.coeffs, BASIS):
            if not c2:
                continue
            k, m = _mono_mul(m1, m2, x.deg_v)
            if m is not None:
                out[_INDEX[m]] += k * c1 * c2
    return ChowClass(tuple(out), x.deg_v, x.genus)


def top_degree(x: ChowClass) -> int:
    return x.coeffs[5]


def section_class(d_i: int, d_j: int, deg_v: int = 5, genus: int = 1) -> ChowClass:
    """Class of {y_i = y_j = 0}, i.e. (H - d_i F)(H - d_j F)."""
    H, F = ChowClass.H(deg_v, genus), ChowClass.F(deg_v, genus)
    return (H - d_i * F) * (H - d_j * F)


def canonical_classes(deg_v: int = 5, genus: int = 1) -> tuple[ChowClass, ChowClass]:
    """K of P(V), and K_P + C restricted class for the conic bundle C ~ 2H - 2F."""
    H, F = ChowClass.H(deg_v, genus), ChowClass.F(deg_v, genus)
    K_P = -3 * H + (deg_v + 2 * genus - 2) * F
    return K_P, K_P + (2 * H - 2 * F)


# ---------------------------------------------------------------------------
# expressions

_TOKEN = re.compile(r"\s*(?:(\d+)|([HF])|(\*\*|[-+*^()]))")


def _tokens(s: str):
    pos = 0
    out = []
    s = s.strip()
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise ChowError(f"unexpected character at {pos}: {s[pos:pos + 10]!r}")
        num, var, op = m.groups()
        out.append(("num", int(num)) if num else ("var", var) if var else ("op", "^" if op == "**" else op))
        pos = m.end()
        while pos < len(s) and s[pos].isspace():
            pos += 1
    return out


class _Parser:
    def __init__(self, toks, deg_v, genus):
        self.toks, self.i = toks, 0
        self.deg_v, self.genus = deg_v, genus

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None, val=None):
        t = self.peek()
        if t[0] is None or (kind and t[0] != kind) or (val and t[1] != val):
            raise ChowError(f"expected {val or kind}, got {t[1]!r}")
        self.i += 1
        return t

    def expr(self):
        v = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            w = self.term()
            v = v + w if op == "+" else v - w
        return v

    def term(self):
        v = self.unary()
        while True:
            t = self.peek()
            if t == ("op", "*"):
                self.take()
                v = v * self.unary()
            elif t[0] in ("num", "var") or t == ("op", "("):
                v = v * self.unary()  # implicit product, e.g. 3H
            else:
                return v

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            n = self.take("num")[1]
            return base ** n
        return base

    def atom(self):
        t = self.peek()
        if t[0] == "num":
            self.take()
            return ChowClass((t[1], 0, 0, 0, 0, 0), self.deg_v, self.genus)
        if t[0] == "var":
            self.take()
            return ChowClass.H(self.deg_v, self.genus) if t[1] == "H" else ChowClass.F(self.deg_v, self.genus)
        if t == ("op", "("):
            self.take()
            v = self.expr()
            self.take("op", ")")
            return v
        raise ChowError(f"unexpected token {t[1]!r}")


def parse_chow(s: str, deg_v: int = 5, genus: int = 1) -> ChowClass:
    p = _Parser(_tokens(s), deg_v, genus)
    if not p.toks:
        raise ChowError("empty expression")
    v = p.expr()
    if p.i != len(p.toks):
        raise ChowError(f"trailing input at token {p.i}")
    return v


def evaluate(s: str, deg_v: int = 5, genus: int = 1) -> int | ChowClass:
    """Top-degree number if the result is a point class multiple, else the class."""
    v = parse_chow(s, deg_v, genus)
    if all(c == 0 for c in v.coeffs[:5]):
        return top_degree(v)
    return v
