"""The branch cubic G, the branch curve Delta = C n G, and the open-condition checks.

Smoothness and the critical locus are decided by Groebner bases.  Away from a
finite set S of special points of B (the origin and the points over the
x-values where some representative or some denominator lives) every
coefficient becomes a polynomial in x, y after clearing one common
denominator, and Delta is cut out of {E = 0} x A^2 by polynomials; the open
set is imposed with a Rabinowitsch variable.  Over each point of S the same
questions are asked fiberwise on the first-order germ in the local
uniformizer.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from itertools import product
from typing import Mapping

import sympy

from .ec_core import CurveError, CurvePoint, Divisor, O, _scalar_json, class_of, lin_equiv
from .moduli_catalog import FamilyDescriptor, Frame, default_frame, family, frame_from_curve, invariants
from .qfield import Quad, is_zero, mpq
from .rel_forms import (
    RelForm,
    Sigma2,
    TauResult,
    Y,
    _mono_rep,
    base_points,
    build_conic,
    build_sigma2,
    check_fibers_reduced,
    classify_fiber,
    entry_basis,
    member_reps,
    tau_of,
)
from .rr_sections import FieldError, RationalFunction, Section, _points_over_x, unit_section, zero_divisor

__all__ = [
    "CubicShape",
    "BranchCurve",
    "SmoothnessResult",
    "CriticalLocus",
    "VerificationReport",
    "ConsistencyError",
    "NonGenericError",
    "admissible_monomials",
    "build_cubic",
    "delta_components",
    "check_delta_avoids_P",
    "check_delta_smooth",
    "sufficient_conditions",
    "critical_locus",
    "verify_member",
    "sample_params",
    "search_member",
]

X, YY, Z = sympy.symbols("x y z")
SW = sympy.Symbol("s")  # second Rabinowitsch variable
DEFAULT_DEGREE_CAP = 40
PREFILTER_PRIMES = 3


class ConsistencyError(ArithmeticError):
    """Two independent computations of the same object disagree."""


class NonGenericError(ValueError):
    pass


# ---------------------------------------------------------------------------
# the cubic


def admissible_monomials(desc: FamilyDescriptor | str, fr: Frame | None = None) -> list[tuple]:
    """Cubic monomials whose class equals the twist class of G, from the divisor classes."""
    from .bundle_calc import cubic_monomials, monomial_class

    desc = family(desc) if isinstance(desc, str) else desc
    fr = fr or default_frame(desc.name)
    classes = [fr.cls(e) for e in desc.d_exprs()]
    tw = desc.twist_G(fr)
    return [m for m in cubic_monomials() if lin_equiv(monomial_class(m, classes), tw)]


@dataclass(frozen=True)
class CubicShape:
    family: str
    monomials: tuple
    k: tuple  # k_0..k_3, coefficient of y1^(3-i) y2^i

    def __post_init__(self):
        allowed = {m[1] for m in self.monomials}
        for i, c in enumerate(self.k):
            if c and i not in allowed:
                raise ValueError(f"k{i} must vanish for {self.family}")
        if sum(1 for c in self.k if c) < 2:
            raise NonGenericError("at least two k_i must be nonzero")

    def binary(self):
        y1, y2 = Y[0], Y[1]
        return sum(sympy.Integer(c) * y1 ** (3 - i) * y2 ** i for i, c in enumerate(self.k))


def build_cubic(desc: FamilyDescriptor, fr: Frame, k, reps=None) -> RelForm:
    reps = reps or member_reps(desc, fr)
    shape = CubicShape(desc.name, tuple(desc.cubic), tuple(int(c) for c in k))
    E = fr.curve
    RG = desc.twist_G(fr).canonical_divisor()
    coeffs = {}
    for i, c in enumerate(shape.k):
        if c:
            e = (3 - i, i, 0)
            coeffs[e] = unit_section(E, _mono_rep(e, reps.rows) - RG) * c
    return RelForm(3, coeffs, reps.rows, RG)


@dataclass
class BranchCurve:
    conic: RelForm
    cubic: RelForm
    tau: TauResult | None = None
    base: tuple = ()

    def __post_init__(self):
        if self.conic.row_reps != self.cubic.row_reps:
            raise CurveError("conic and cubic live on different bundles")

    @property
    def curve(self):
        return self.conic.curve


def delta_components(desc: FamilyDescriptor | str, k, fr: Frame | None = None) -> int:
    """Number of connected components of Delta for a squarefree cubic with constant k."""
    desc = family(desc) if isinstance(desc, str) else desc
    fr = fr or default_frame(desc.name)
    shape = CubicShape(desc.name, tuple(desc.cubic), tuple(int(c) for c in k))
    s = sympy.Symbol("s")
    g = sympy.Poly(shape.binary().subs({Y[0]: s, Y[1]: 1}), s)
    # homogeneous factors: a root at infinity when the y1^3 coefficient vanishes
    n_inf = 3 - g.degree()
    if n_inf > 1 or sympy.degree(sympy.gcd(g, g.diff(s)), s) > 0:
        raise NonGenericError(f"cubic {shape.binary()} has a repeated factor")
    D1, D2 = (fr.cls(e) for e in desc.d_exprs()[:2])
    if lin_equiv(D1, D2):
        # every linear factor is a relative hyperplane
        return 3
    # only y1 and y2 can split off; what remains is one irreducible movable piece
    c = 0
    rest = 3
    if shape.k[3] == 0:  # y1 | G
        c += 1
        rest -= 1
    if shape.k[0] == 0:  # y2 | G
        c += 1
        rest -= 1
    return c + (1 if rest > 0 else 0)


def check_delta_avoids_P(cubic: RelForm, base) -> bool:
    for b, Yv in (base.points if hasattr(base, "points") else base):
        vals = cubic.fiber_values(b)
        s = sum((c * Yv[0] ** e[0] * Yv[1] ** e[1] * Yv[2] ** e[2] for e, c in vals.items()), mpq(0))
        if is_zero(s):
            return False
    return True


# ---------------------------------------------------------------------------
# polynomial models


def _r(c):
    if isinstance(c, Quad):
        raise FieldError("special point not rational")
    return sympy.Rational(int(c.numerator), int(c.denominator))


def _dup_expr(f):
    n = len(f)
    return sum((_r(c) * X ** (n - 1 - i) for i, c in enumerate(f)), sympy.Integer(0))


def curve_poly(E):
    a1, a2, a3, a4, a6 = (_r(c) for c in E.ainvs)
    return YY ** 2 + a1 * X * YY + a3 * YY - (X ** 3 + a2 * X ** 2 + a4 * X + a6)


def _lcm_den(forms) -> sympy.Poly:
    L = sympy.Poly(1, X)
    for F in forms:
        for c in F.coeffs.values():
            L = L.lcm(sympy.Poly(_dup_expr(c.func.h), X))
    return L.monic()


def _affine_form(F: RelForm, L: sympy.Poly):
    """L * F as a polynomial in x, y, y1, y2, y3 (valid away from the special points)."""
    out = sympy.Integer(0)
    for e, c in F.coeffs.items():
        f = c.func
        q = sympy.Poly(L.as_expr(), X).quo(sympy.Poly(_dup_expr(f.h), X)).as_expr()
        num = (_dup_expr(f.g0) + _dup_expr(f.g1) * YY) * q
        out += sympy.expand(num) * Y[0] ** e[0] * Y[1] ** e[1] * Y[2] ** e[2]
    return sympy.expand(out)


def _local_forms(F: RelForm, b: CurvePoint):
    """Constant and linear terms in the uniformizer at b, as forms in y1, y2, y3."""
    f0 = sympy.Integer(0)
    f1 = sympy.Integer(0)
    for e, c in F.coeffs.items():
        s = c.local_series(b, 2)
        m = Y[0] ** e[0] * Y[1] ** e[1] * Y[2] ** e[2]
        f0 += _r(s.coeff(0)) * m
        f1 += _r(s.coeff(1)) * m
    return sympy.expand(f0), sympy.expand(f1)


@dataclass
class _Model:
    E: object
    Epoly: object
    C: object  # affine conic
    G: object  # affine cubic
    H: object  # product of (x - x0) over special x0
    special: list  # special points of B including O
    Cform: RelForm
    Gform: RelForm
    xs: list = field(default_factory=list)  # special abscissae

    def deriv(self, P):
        """The derivation E_y d/dx - E_x d/dy, tangent to the curve."""
        return sympy.expand(sympy.diff(self.Epoly, YY) * sympy.diff(P, X) - sympy.diff(self.Epoly, X) * sympy.diff(P, YY))


def _special_xs(forms, extra_divisors) -> list:
    xs = set()
    for F in forms:
        for c in F.coeffs.values():
            for D in (c.rep,):
                xs.update(P.x for P in D.support if not P.is_infinity)
    for D in extra_divisors:
        xs.update(P.x for P in D.support if not P.is_infinity)
    return xs


def build_model(C: RelForm, G: RelForm) -> _Model:
    E = C.curve
    LC = _lcm_den([C])
    LG = _lcm_den([G])
    xs = set()
    for L in (LC, LG):
        for fac, _ in sympy.factor_list(L.as_expr(), X)[1]:
            p = sympy.Poly(fac, X)
            if p.degree() != 1:
                raise FieldError("denominator with a non-rational root")
            r = -p.all_coeffs()[1] / p.all_coeffs()[0]
            xs.add(mpq(int(r.p), int(r.q)))
    for x0 in _special_xs([C, G], list(C.row_reps) + [C.twist_rep, G.twist_rep]):
        if isinstance(x0, Quad):
            raise FieldError("representative with a non-rational point")
        xs.add(x0)
    xs = sorted(xs)
    special = [O]
    for x0 in xs:
        special.extend(_points_over_x(E, x0))
    H = sympy.Integer(1)
    for x0 in xs:
        H *= X - _r(x0)
    H = sympy.expand(H)
    return _Model(E, curve_poly(E), _strip_units(_affine_form(C, LC), H), _strip_units(_affine_form(G, LG), H),
                  H, special, C, G, xs)


def _strip_units(F, H):
    """Divide out a common factor of the coefficients that is a unit on U_0 (roots at special x)."""
    coeffs = sympy.Poly(F, *Y).coeffs()
    g = sympy.gcd_list(coeffs)
    if g.free_symbols - {X}:
        return F
    g = sympy.Poly(g, X)
    if g.degree() <= 0:
        return F
    # only keep the part of g supported at special abscissae
    u = sympy.Poly(1, X)
    hp = sympy.Poly(H, X)
    while True:
        d = g.gcd(hp)
        if d.degree() <= 0:
            break
        u = u * d
        g = g.quo(d)
    if u.degree() <= 0:
        return F
    return sympy.expand(sympy.cancel(F / u.as_expr()))


def _minors2(rows):
    (a, b, c), (d, e, f) = rows
    return [sympy.expand(a * e - b * d), sympy.expand(a * f - c * d), sympy.expand(b * f - c * e)]


def _gb(polys, gens, modulus=None):
    polys = [p for p in polys if p != 0]
    if modulus is None:
        return sympy.groebner(polys, *gens, order="grevlex", domain="QQ")
    ints = []
    for p in polys:
        _, q = sympy.Poly(p, *gens, domain="QQ").clear_denoms(convert=True)
        ints.append(q.as_expr())
    return sympy.groebner(ints, *gens, order="grevlex", modulus=modulus)


def _is_unit(gb) -> bool:
    return list(gb.exprs) == [1]


def _max_degree(polys, gens) -> int:
    return max((sympy.Poly(p, *gens).total_degree() for p in polys if p != 0), default=0)


def _std_monomial_count(gb, gens) -> int:
    """dim_Q of Q[gens]/I for a zero-dimensional I given by a Groebner basis."""
    if _is_unit(gb):
        return 0
    lms = [sympy.Poly(p, *gens).monoms(order="grevlex")[0] for p in gb.exprs]
    n = len(gens)
    bounds = []
    for i in range(n):
        pure = [m[i] for m in lms if all(m[j] == 0 for j in range(n) if j != i) and m[i] > 0]
        if not pure:
            raise ValueError("ideal is not zero-dimensional")
        bounds.append(min(pure))
    count = 0
    for m in product(*(range(b) for b in bounds)):
        if not any(all(m[j] >= lm[j] for j in range(n)) for lm in lms):
            count += 1
    return count


def _chart(expr, k: int, v=1):
    return sympy.expand(expr.subs(Y[k], v))


def _primes(seed: int, n: int) -> list[int]:
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        p = sympy.nextprime(10 ** 6 + rng.randrange(10 ** 6))
        if p not in out:
            out.append(int(p))
    return out


# ---------------------------------------------------------------------------
# smoothness


@dataclass
class SmoothnessResult:
    status: str  # "smooth", "singular", "undecided"
    prefilter: str  # "likely smooth", "likely singular", "skipped"
    witness: dict | None = None

    @property
    def smooth(self) -> bool:
        return self.status == "smooth"

    def to_json(self):
        return {"status": self.status, "prefilter": self.prefilter, "witness": self.witness}


def _u0_system(M: _Model, k: int):
    """Singular-locus system of Delta on U_0 in the chart y_k = 1."""
    others = [i for i in range(3) if i != k]
    u, v = Y[others[0]], Y[others[1]]
    C, G = _chart(M.C, k), _chart(M.G, k)
    rows = [[M.deriv(C), sympy.diff(C, u), sympy.diff(C, v)], [M.deriv(G), sympy.diff(G, u), sympy.diff(G, v)]]
    polys = [M.Epoly, C, G] + _minors2(rows) + [sympy.expand(Z * M.H - 1)]
    return polys, (X, YY, u, v, Z)


def _local_system(M: _Model, b: CurvePoint, k: int):
    others = [i for i in range(3) if i != k]
    u, v = Y[others[0]], Y[others[1]]
    C0, C1 = (_chart(f, k) for f in _local_forms(M.Cform, b))
    G0, G1 = (_chart(f, k) for f in _local_forms(M.Gform, b))
    rows = [[C1, sympy.diff(C0, u), sympy.diff(C0, v)], [G1, sympy.diff(G0, u), sympy.diff(G0, v)]]
    return [C0, G0] + _minors2(rows), (u, v)


def _reduced_systems(M: _Model, k: int):
    """Delta smooth over U_0 in the chart y_k = 1 of P(O(D1)+O(D2)) iff both systems are empty.

    C = q(y1, y2) + c y3^2 with c a unit and G free of y3, so Delta is a
    double cover of Gamma = {G = 0} branched along q = 0: Delta is smooth iff
    Gamma is smooth and q restricted to Gamma has only simple zeros.
    """
    s = Y[1 - k]
    q = _chart(_chart(M.C, 2, 0), k)
    G = _chart(M.G, k)
    dG, Gs = M.deriv(G), sympy.diff(G, s)
    gamma_sing = [M.Epoly, G, dG, Gs]
    tangency = [M.Epoly, G, q, sympy.expand(dG * sympy.diff(q, s) - Gs * M.deriv(q))]
    return [("Gamma singular", gamma_sing), ("q tangent to Gamma", tangency)], (X, YY, s)


def _reduced_local(M: _Model, b: CurvePoint, k: int):
    s = Y[1 - k]
    C0, C1 = (_chart(_chart(f, 2, 0), k) for f in _local_forms(M.Cform, b))
    G0, G1 = (_chart(f, k) for f in _local_forms(M.Gform, b))
    Gs, qs = sympy.diff(G0, s), sympy.diff(C0, s)
    return [("Gamma singular", [G0, G1, Gs]),
            ("q tangent to Gamma", [G0, C0, sympy.expand(G1 * qs - Gs * C1)])], (s,)


def _vanishes_off_u0(gb, gens, M: _Model) -> bool | None:
    """Whether V(I) lies over the special abscissae, i.e. H is in the radical of I.

    For zero-dimensional I the nilpotency index of H in Q[gens]/I is at most
    the length of that ring, so H^L in I decides it.  None if I is not
    zero-dimensional.
    """
    try:
        L = _std_monomial_count(gb, gens)
    except ValueError:
        return None
    r = gb.reduce(M.H)[1]
    for _ in range(L):
        if r == 0:
            return True
        r = gb.reduce(sympy.expand(r * M.H))[1]
    return r == 0


def _u0_unit(polys, gens, M: _Model):
    """(is unit over U_0, basis of the ideal used for the decision)."""
    gb = _gb(polys, gens)
    if _is_unit(gb):
        return True, gb
    v = _vanishes_off_u0(gb, gens, M)
    if v is not None:
        return v, gb
    gz = _gb(polys + [sympy.expand(Z * M.H - 1)], gens + (Z,))
    return _is_unit(gz), gz


def check_delta_smooth(C: RelForm, G: RelForm, degree_cap: int = DEFAULT_DEGREE_CAP, seed: int = 0,
                       model: _Model | None = None, full_exact: bool = False) -> SmoothnessResult:
    """Decide smoothness of Delta exactly; a mod-p pass on the full system runs first.

    The full singular-locus system of Delta lives in x, y and two fiber
    coordinates; charts y1 = 1 and y2 = 1 suffice because [0:0:1] is never on
    C.  The exact decision uses the equivalent double-cover reduction (three
    variables); ``full_exact`` also runs the full system over Q.
    """
    M = model or build_model(C, G)
    for b in M.special:
        c = M.Cform.coefficient((0, 0, 2))
        if c is None or c.rep.degree != 0:
            raise CurveError("the y3^2 coefficient of the conic must be a unit")
    full = [(k, *_u0_system(M, k)) for k in (0, 1)]
    reduced = [(k, *_reduced_systems(M, k)) for k in (0, 1)]
    degs = [_max_degree(p, g) for _, p, g in full]
    degs += [_max_degree(p, g) for _, sy, g in reduced for _, p in sy]
    if max(degs) > degree_cap:
        return SmoothnessResult("undecided", "skipped", {"reason": f"system degree exceeds {degree_cap}"})
    hits = 0
    for p in _primes(seed, PREFILTER_PRIMES):
        if all(_is_unit(_gb(polys, gens, modulus=p)) for _, polys, gens in full):
            hits += 1
    prefilter = "likely smooth" if hits == PREFILTER_PRIMES else "likely singular"

    for k, systems, gens in reduced:
        for what, polys in systems:
            ok, gb = _u0_unit(polys, gens, M)
            if not ok:
                return SmoothnessResult("singular", prefilter, {
                    "where": "U0", "chart": f"y{k + 1}=1", "reason": what, "ideal": [str(e) for e in gb.exprs]})
    if full_exact:
        for k, polys, gens in full:
            ok, gb = _u0_unit(polys[:-1], gens[:-1], M)
            if not ok:
                raise ConsistencyError("full singular-locus system disagrees with the double-cover reduction")
    for b in M.special:
        for k in (0, 1):
            for what, polys in _reduced_local(M, b, k)[0]:
                gb = _gb(polys, _reduced_local(M, b, k)[1])
                if not _is_unit(gb):
                    return SmoothnessResult("singular", prefilter, {
                        "where": b.to_json(), "chart": f"y{k + 1}=1", "reason": what,
                        "ideal": [str(e) for e in gb.exprs]})
            if full_exact:
                polys, gens = _local_system(M, b, k)
                if not _is_unit(_gb(polys, gens)):
                    raise ConsistencyError(f"full local system at {b!r} disagrees with the reduction")
    return SmoothnessResult("smooth", prefilter)


# ---------------------------------------------------------------------------
# critical locus


@dataclass
class CriticalLocus:
    open_length: int
    special: list  # (point, local length)
    chart: str
    rank_matches: bool
    sing_in_y3: bool
    sing_count: int

    @property
    def length(self) -> int:
        return self.open_length + sum(n for _, n in self.special)

    def to_json(self):
        return {
            "length": self.length,
            "open_length": self.open_length,
            "special": [{"b": b.to_json(), "length": n} for b, n in self.special if n],
            "chart": self.chart,
            "rank_locus_equals_y3_section": self.rank_matches,
            "sing_C_in_y3_zero": self.sing_in_y3,
            "sing_C_count": self.sing_count,
        }


def resultant_section(C: RelForm, G: RelForm) -> Section:
    """Res_{y1:y2}(q, G) where C = q(y1, y2) + c y3^2; a section of a degree-6 bundle."""
    s = sympy.Symbol("s")
    qs = sympy.symbols("q0:3")
    gs = sympy.symbols("g0:4")
    res = sympy.Poly(sympy.resultant(sum(qs[i] * s ** (2 - i) for i in range(3)),
                                     sum(gs[i] * s ** (3 - i) for i in range(4)), s), *qs, *gs)
    E = C.curve

    def coeff(F, e):
        c = F.coefficient(e)
        if c is None:
            return Section(_mono_rep(e, F.row_reps) - F.twist_rep, RationalFunction.const(E, 0))
        return c

    qv = [coeff(C, (2 - i, i, 0)) for i in range(3)]
    gv = [coeff(G, (3 - i, i, 0)) for i in range(4)]
    vals = qv + gv
    total = None
    for mon, c in res.terms():
        t = None
        for v, n in zip(vals, mon):
            for _ in range(n):
                t = v if t is None else t * v
        t = t * mpq(int(c.p), int(c.q))
        total = t if total is None else total + t
    return total


def _unit_on_u0(polys, gens, M: _Model) -> bool:
    return _u0_unit(polys, gens, M)[0]


def _open_length(polys, gens, M: _Model) -> tuple[int, object]:
    """Length over U_0 of the zero-dimensional scheme {polys = 0} in an affine chart.

    The length on the whole chart minus the part over the special abscissae;
    each local part is read off from I + (x - x0)^N, which stops growing
    exactly when (x - x0)^N vanishes in the local Artinian ring.
    """
    gb = _gb(polys, gens)
    try:
        total = _std_monomial_count(gb, gens)
    except ValueError:
        # positive-dimensional over some special fiber: saturate instead
        gz = _gb(polys + [sympy.expand(Z * M.H - 1)], gens + (Z,))
        return _std_monomial_count(gz, gens + (Z,)), gb
    for x0 in M.xs:
        prev, N = -1, 1
        while True:
            n = _std_monomial_count(_gb(polys + [(X - _r(x0)) ** N], gens), gens)
            if n == prev:
                break
            prev, N = n, N + 1
        total -= prev
    return total, gb


def _reduces_to_zero(p, gb) -> bool:
    return gb.reduce(p)[1] == 0


def critical_locus(C: RelForm, G: RelForm, base=(), model: _Model | None = None) -> CriticalLocus:
    """Delta n {y3 = 0} and the fiberwise rank-deficiency locus, compared, with total length."""
    M = model or build_model(C, G)
    # chart y1 + lam y2 = 1 covering every critical point over U_0
    lam = None
    for cand in (0, 1, -1, 2, -2, sympy.Rational(1, 2), 3):
        miss = [M.Epoly] + [_chart(_chart(p, 2, 0).subs(Y[0], -cand * Y[1]), 1) for p in (M.C, M.G)]
        if _unit_on_u0(miss, (X, YY), M):
            lam = cand
            break
    if lam is None:
        raise ConsistencyError("no affine chart contains the critical locus")
    sub = {Y[0]: 1 - lam * Y[1]}
    Cc, Gc = sympy.expand(M.C.subs(sub)), sympy.expand(M.G.subs(sub))
    gens3 = (X, YY, Y[1])
    open_len, _ = _open_length([M.Epoly, _chart(Cc, 2, 0), _chart(Gc, 2, 0)], gens3, M)

    gens = (X, YY, Y[1], Y[2])
    rows = [[sympy.expand(sympy.diff(M.C, y).subs(sub)) for y in Y], [sympy.expand(sympy.diff(M.G, y).subs(sub)) for y in Y]]
    rk = [M.Epoly, Cc, Gc, *_minors2(rows)]
    # rank locus contains Delta n {y3=0}: every generator reduces to 0 modulo the y3-ideal
    y3_gb = _gb([M.Epoly, Cc, Gc, Y[2]], gens)
    inc1 = all(_reduces_to_zero(p, y3_gb) for p in rk)
    # and y3 lies in the rank ideal over U_0: the minors y3*c*G_yi with c the unit y3^2
    # coefficient, and G_y1, G_y2 never vanish together on C n G over U_0
    c33 = sympy.Poly(M.C, *Y).coeff_monomial(Y[2] ** 2)
    c_unit = _unit_on_u0([M.Epoly, sympy.expand(c33)], (X, YY), M)
    no_common = _unit_on_u0([M.Epoly, Cc, Gc, rows[1][0], rows[1][1]], gens, M)
    inc2 = c_unit and no_common
    rank_ok = inc1 and inc2

    R = resultant_section(C, G)
    special = []
    for b in M.special:
        n = R.order_at(b)
        special.append((b, n))
        if n:
            for k in (0, 1):
                others = [i for i in range(3) if i != k]
                u, v = Y[others[0]], Y[others[1]]
                C0, _ = (_chart(f, k) for f in _local_forms(M.Cform, b))
                G0, _ = (_chart(f, k) for f in _local_forms(M.Gform, b))
                full = [[sympy.diff(C0, w) for w in (u, v)], [sympy.diff(G0, w) for w in (u, v)]]
                a = _gb([C0, G0, sympy.expand(full[0][0] * full[1][1] - full[0][1] * full[1][0])], (u, v))
                bb = _gb([C0, G0, Y[2]], (u, v))
                if list(a.exprs) != list(bb.exprs):
                    rank_ok = False
    if not rank_ok:
        raise ConsistencyError("rank-deficiency locus differs from Delta n {y3 = 0}")
    deg_R = R.rep.degree
    total = open_len + sum(n for _, n in special)
    if total != deg_R:
        raise ConsistencyError(f"critical length {total} but the resultant has degree {deg_R}")

    sing_in, sing_count = _sing_C(M)
    return CriticalLocus(open_len, special, f"y1+{lam}*y2=1", rank_ok, sing_in, sing_count)


def _sing_C(M: _Model):
    """Is Sing(C) inside {y3 = 0}, and how many points (counted by length) does it have."""
    inside = True
    count = 0
    for k in (0, 1):
        others = [i for i in range(3) if i != k]
        u, v = Y[others[0]], Y[others[1]]
        C = _chart(M.C, k)
        polys = [M.Epoly, C, M.deriv(C), sympy.diff(C, u), sympy.diff(C, v)]
        if k == 1:
            polys.append(Y[0])  # chart y2 = 1 only for the points with y1 = 0
        gens = (X, YY, u, v)
        n, gb = _open_length(polys, gens, M)
        count += n
        if not _unit_on_u0(polys + [sympy.expand(SW * Y[2] - 1)], gens + (SW,), M):
            inside = False
    for b in M.special:
        for k in (0, 1):
            others = [i for i in range(3) if i != k]
            u, v = Y[others[0]], Y[others[1]]
            C0, C1 = (_chart(f, k) for f in _local_forms(M.Cform, b))
            polys = [C0, C1, sympy.diff(C0, u), sympy.diff(C0, v)]
            if k == 1:
                polys.append(Y[0])
            gb = _gb(polys, (u, v))
            count += _std_monomial_count(gb, (u, v))
            if not _is_unit(_gb(polys + [sympy.expand(SW * Y[2] - 1)], (u, v, SW))):
                inside = False
    return inside, count


# ---------------------------------------------------------------------------
# sufficient conditions


def _common_zero(s: Section, t: Section) -> bool:
    if s.is_zero or t.is_zero:
        return True
    Zs, Zt = zero_divisor(s), zero_divisor(t)
    return any(P in Zt for P in Zs.support)


def sufficient_conditions(desc: FamilyDescriptor | str, params: Mapping, fr: Frame | None = None) -> dict:
    """The explicit per-family sufficient conditions for the open conditions."""
    desc = family(desc) if isinstance(desc, str) else desc
    fr = fr or default_frame(desc.name)
    p = _letter_params(desc, params)
    s2 = build_sigma2(desc, fr, p)
    ent = {desc.shape[i][j]: s2.entries[i][j] for i in range(3) for j in range(3)}
    out = {}
    det = s2.det()
    out["det_nonzero"] = not det.is_zero
    out["tau_reduced"] = out["det_nonzero"] and zero_divisor(det).is_reduced()
    if desc.v1 == "split":
        a, b = ent["a"], ent["b"]
        out["a_b_coprime"] = not _common_zero(a, b)
        if desc.name == "M_4_2":
            out["b_nonzero"] = not b.is_zero
    else:
        C = build_conic(s2, desc.v1)
        if "c" in ent:
            out["abcd_nonzero"] = all(not ent[l].is_zero for l in "abcd")
            q22 = C.coefficient((0, 2, 0))
            out["y2_squared_coeff_squarefree"] = q22 is not None and zero_divisor(q22).is_reduced()
    out["holds"] = all(out.values())
    return out


# ---------------------------------------------------------------------------
# verification


def _letter_params(desc: FamilyDescriptor, params: Mapping) -> dict:
    out = {}
    for l in desc.letters:
        key = l if l in params else f"{l}{desc.index}"
        if key not in params:
            raise KeyError(f"missing parameter {l}{desc.index}")
        out[l] = [int(c) for c in params[key]]
    return out


@dataclass
class VerificationReport:
    family: str
    curve: dict
    params: dict
    seed: int | None
    conditions: dict
    invariants: dict
    components: int | None
    crit_length: int | None
    passed: bool
    details: dict = field(default_factory=dict)
    diagnosis: list = field(default_factory=list)
    status: str = "pass"

    def to_json(self):
        return {
            "family": self.family,
            "curve": self.curve,
            "params": self.params,
            "seed": self.seed,
            "conditions": self.conditions,
            "invariants": self.invariants,
            "components": self.components,
            "crit_length": self.crit_length,
            "pass": self.passed,
            "status": self.status,
            "diagnosis": self.diagnosis,
            "details": self.details,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)


def verify_member(desc: FamilyDescriptor | str, params: Mapping, curve=None, seed: int | None = None,
                  degree_cap: int = DEFAULT_DEGREE_CAP) -> VerificationReport:
    """Check the open conditions for one member; ``curve`` is a Frame, an EllipticCurve or None."""
    desc = family(desc) if isinstance(desc, str) else desc
    if curve is None:
        fr = default_frame(desc.name)
    elif isinstance(curve, Frame):
        fr = curve
    else:
        fr = frame_from_curve(desc.name, curve)
    p = _letter_params(desc, params)
    k = [int(c) for c in params["k"]]
    report_params = {f"{l}{desc.index}": v for l, v in p.items()}
    report_params["k"] = k

    s2 = build_sigma2(desc, fr, p)
    C = build_conic(s2, desc.v1)
    G = build_cubic(desc, fr, k, s2.reps)
    cond = {}
    details = {}
    diagnosis = []

    tau = None
    if s2.det().is_zero:
        cond["tau_reduced"] = False
        diagnosis.append("det sigma2 vanishes identically")
    else:
        tau = tau_of(s2)
        cond["tau_reduced"] = tau.reduced
        details["tau"] = tau.to_json()
        if not tau.reduced:
            diagnosis.append("tau not reduced")

    if tau is not None:
        kinds = {repr(b): classify_fiber(C, b) for b in tau.divisor.support}
        cond["fibers_reduced"] = "double-line" not in kinds.values()
        details["tau_fibers"] = kinds
        if not cond["fibers_reduced"]:
            msg = "double-line fibers"
            if desc.v1 == "split" and not any(p["b"]):
                msg += " (Polizzi-type locus)"
            diagnosis.append(msg)
    else:
        cond["fibers_reduced"] = False

    base = None
    if tau is not None and tau.reduced and cond["fibers_reduced"]:
        base = base_points(s2, tau)
        cond["delta_avoids_P"] = check_delta_avoids_P(G, base)
        details["base_points"] = base.to_json()
    else:
        cond["delta_avoids_P"] = False

    M = build_model(C, G)
    sm = check_delta_smooth(C, G, degree_cap=degree_cap, seed=seed or 0, model=M)
    cond["delta_smooth"] = sm.smooth
    details["smoothness"] = sm.to_json()
    if sm.status == "singular":
        diagnosis.append("Delta singular")

    try:
        comps = delta_components(desc, k, fr)
    except NonGenericError as e:
        comps = None
        diagnosis.append(f"non-generic cubic: {e}")

    passed = all(cond.values())
    crit = None
    if passed:
        cl = critical_locus(C, G, base, model=M)
        crit = cl.length
        details["critical_locus"] = cl.to_json()
        if not cl.sing_in_y3 or cl.sing_count != len(base):
            raise ConsistencyError("Sing(C) differs from the base points")

    inv = invariants(1, 1, tau.divisor.degree if tau else 2).to_json()
    status = "pass" if passed else ("undecided" if sm.status == "undecided" and all(
        v for c, v in cond.items() if c != "delta_smooth") else "fail")
    return VerificationReport(desc.name, fr.curve.to_json(), report_params, seed, cond, inv, comps, crit,
                              passed, details, diagnosis, status)


def sample_params(desc: FamilyDescriptor, fr: Frame, rng: random.Random, bound: int = 9) -> dict:
    bases = entry_basis(desc, fr)
    out = {}
    for l in desc.letters:
        while True:
            v = [rng.randint(-bound, bound) for _ in bases[l]]
            if any(v):
                break
        out[f"{l}{desc.index}"] = v
    allowed = {m[1] for m in desc.cubic}
    out["k"] = [rng.choice([c for c in range(-bound, bound + 1) if c]) if i in allowed else 0 for i in range(4)]
    return out


def search_member(desc: FamilyDescriptor | str, seed: int = 0, curve=None, attempts: int = 50,
                  force_b_zero: bool = False, degree_cap: int = DEFAULT_DEGREE_CAP):
    """Sample integer parameters until a member passes; returns (report, attempts used)."""
    desc = family(desc) if isinstance(desc, str) else desc
    if curve is None:
        fr = default_frame(desc.name)
    elif isinstance(curve, Frame):
        fr = curve
    else:
        fr = frame_from_curve(desc.name, curve)
    rng = random.Random(seed)
    last = None
    for n in range(1, attempts + 1):
        params = sample_params(desc, fr, rng)
        if force_b_zero:
            if desc.v1 != "split":
                raise ValueError("forcing b = 0 applies to the split families")
            params[f"b{desc.index}"] = [0] * len(params[f"b{desc.index}"])
        try:
            rep = verify_member(desc, params, fr, seed=seed, degree_cap=degree_cap)
        except NonGenericError:
            continue
        rep.details["attempt"] = n
        last = rep
        if rep.passed or force_b_zero:
            return rep, n
    return last, attempts
