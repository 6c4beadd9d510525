"""Relative forms on P(V2): the matrix sigma2, the conic bundle, tau, base points, fiber types.

V2 = O(D1) + O(D2) + O(D3) with relative coordinates y1, y2, y3.  Each O(D_i)
carries a fixed representative divisor R_i, and a form of degree n twisted by
L (representative R_L) has, as coefficient of y^e, a section with
representative sum(e_i R_i) - R_L.  Keeping representatives additive makes
every fiberwise evaluation consistent: at a point b the local value of a
coefficient is f * t^rep(b), i.e. the value in the trivializations
t^{-R_i(b)} of the O(D_i).

The same code runs on symbolic matrices (sympy symbols for the free entries,
1 for the unit entries), which is how the table equations are reproduced.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import sympy

from .bundle_calc import RankTwoBundle
from .ec_core import CurveError, CurvePoint, Divisor, DivisorClass, O, class_of
from .moduli_catalog import FamilyDescriptor, Frame
from .qfield import is_zero, mpq
from .rr_sections import RationalFunction, Section, riemann_roch_space, unit_section, zero_divisor

__all__ = [
    "Sigma2",
    "RelForm",
    "BasePointSet",
    "TauResult",
    "member_reps",
    "build_sigma2",
    "build_conic",
    "conic_symbolic",
    "conic_display",
    "cubic_display",
    "sigma2_symbolic",
    "entry_basis",
    "tau_of",
    "base_points",
    "classify_fiber",
    "check_fibers_reduced",
    "fiber_matrix",
    "rank3",
    "Y",
]

Y = sympy.symbols("y1 y2 y3")


# ---------------------------------------------------------------------------
# representatives


@dataclass(frozen=True)
class Reps:
    """Representative divisors: rows R_i of V2, columns of Sym^2 V1, and the conic twist."""

    rows: tuple[Divisor, Divisor, Divisor]
    cols: tuple[Divisor, Divisor, Divisor]
    conic_twist: Divisor
    weights: tuple  # per-column weights of the Veronese conic (Atiyah case)


def member_reps(desc: FamilyDescriptor, fr: Frame) -> Reps:
    E = fr.curve
    rows = tuple(fr.cls(e).canonical_divisor() for e in desc.d_exprs())
    if desc.v1 == "split":
        p = fr["p"]
        mp = E.neg(p)
        r1 = Divisor({p: 1})  # O(p)
        r2 = Divisor({mp: 1, O: -1})  # O(0 - p), canonical representative
        cols = (r1 * 2, r1 + r2, r2 * 2)
        return Reps(rows, cols, cols[0] + cols[2], ())
    etas = [fr[f"eta{i}"] for i in (1, 2, 3)]
    cols = tuple(Divisor({e: 1}) for e in etas)
    two_O = Divisor({O: 2})
    # psi_j: nowhere-vanishing section of O(2 eta_j - 2 O), i.e. 1/(x - x(eta_j))
    weights = tuple(unit_section(E, Divisor({e: 2, O: -2})) for e in etas)
    return Reps(rows, cols, two_O, weights)


# ---------------------------------------------------------------------------
# sigma2


@dataclass(frozen=True)
class Sigma2:
    """3x3 matrix; entry (i, j) maps the j-th summand of Sym^2 V1 to O(D_i)."""

    entries: tuple
    v1_kind: str
    reps: Reps | None = None  # None for symbolic matrices
    symbolic: bool = False

    def __post_init__(self):
        if self.symbolic:
            return
        for i in range(3):
            for j in range(3):
                s = self.entries[i][j]
                want = self.reps.rows[i] - self.reps.cols[j]
                if s.rep != want:
                    raise CurveError(f"entry ({i + 1},{j + 1}) has representative {s.rep!r}, expected {want!r}")

    @property
    def curve(self):
        return self.entries[0][0].curve

    def column(self, j: int) -> dict:
        """sigma2 applied to the j-th generator, as a linear form in y."""
        out = {}
        for i in range(3):
            e = [0, 0, 0]
            e[i] = 1
            out[tuple(e)] = self.entries[i][j]
        return out

    def det(self):
        m = self.entries
        return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))

    def fiber_matrix(self, b: CurvePoint) -> list[list]:
        return [[self.entries[i][j].local_value(b) for j in range(3)] for i in range(3)]

    def to_json(self):
        if self.symbolic:
            return [[str(e) for e in row] for row in self.entries]
        return [[e.to_json() for e in row] for row in self.entries]


def entry_basis(desc: FamilyDescriptor, fr: Frame, reps: Reps | None = None) -> dict[str, list[Section]]:
    """For each free letter, the Riemann-Roch basis its integer parameters refer to."""
    reps = reps or member_reps(desc, fr)
    out = {}
    for i in range(3):
        for j in range(3):
            e = desc.shape[i][j]
            if e not in ("0", "1"):
                out[e] = riemann_roch_space(fr.curve, reps.rows[i] - reps.cols[j])
    return out


def build_sigma2(desc: FamilyDescriptor, fr: Frame, params: Mapping[str, list[int]]) -> Sigma2:
    """Concrete sigma2: free entries are integer combinations of the Riemann-Roch bases."""
    E = fr.curve
    reps = member_reps(desc, fr)
    bases = entry_basis(desc, fr, reps)
    rows = []
    for i in range(3):
        row = []
        for j in range(3):
            e = desc.shape[i][j]
            rep = reps.rows[i] - reps.cols[j]
            if e == "0":
                row.append(Section(rep, RationalFunction.const(E, 0)))
            elif e == "1":
                row.append(unit_section(E, rep))
            else:
                coeffs = list(params[e])
                basis = bases[e]
                if len(coeffs) != len(basis):
                    raise ValueError(f"parameter {e} needs {len(basis)} coefficients, got {len(coeffs)}")
                s = Section(rep, RationalFunction.const(E, 0))
                for c, bs in zip(coeffs, basis):
                    if c:
                        s = s + bs * c
                row.append(s)
        rows.append(tuple(row))
    return Sigma2(tuple(rows), desc.v1, reps)


def sigma2_symbolic(desc: FamilyDescriptor) -> Sigma2:
    rows = []
    for i in range(3):
        row = []
        for j in range(3):
            e = desc.shape[i][j]
            row.append(sympy.Integer(int(e)) if e in ("0", "1") else sympy.Symbol(f"{e}{desc.index}"))
        rows.append(tuple(row))
    return Sigma2(tuple(rows), desc.v1, None, symbolic=True)


# ---------------------------------------------------------------------------
# relative forms


def _form_mul(f: dict, g: dict) -> dict:
    out = {}
    for e1, c1 in f.items():
        for e2, c2 in g.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            t = c1 * c2
            out[e] = out[e] + t if e in out else t
    return out


def _form_add(f: dict, g: dict, sign=1) -> dict:
    out = dict(f)
    for e, c in g.items():
        c = c if sign == 1 else -c
        out[e] = out[e] + c if e in out else c
    return out


def _is_zero_coeff(c) -> bool:
    if isinstance(c, Section):
        return c.is_zero
    return sympy.expand(c) == 0


@dataclass(frozen=True)
class RelForm:
    """Homogeneous form of degree n in y1, y2, y3 with section coefficients, twisted by L."""

    degree: int
    coeffs: Mapping[tuple, object]
    row_reps: tuple | None = None
    twist_rep: Divisor | None = None

    def __post_init__(self):
        clean = {e: c for e, c in self.coeffs.items() if not _is_zero_coeff(c)}
        object.__setattr__(self, "coeffs", dict(sorted(clean.items(), reverse=True)))
        for e in self.coeffs:
            if sum(e) != self.degree:
                raise ValueError(f"monomial {e} not of degree {self.degree}")
        if self.row_reps is not None:
            for e, c in self.coeffs.items():
                want = _mono_rep(e, self.row_reps) - self.twist_rep
                if c.rep != want:
                    raise CurveError(f"coefficient of {e} has representative {c.rep!r}, expected {want!r}")

    @property
    def symbolic(self) -> bool:
        return self.row_reps is None

    @property
    def curve(self):
        return next(iter(self.coeffs.values())).curve

    def twist_class(self) -> DivisorClass:
        return class_of(self.curve, self.twist_rep)

    def coefficient(self, e):
        return self.coeffs.get(tuple(e))

    def scaled(self, c) -> "RelForm":
        return RelForm(self.degree, {e: v * c for e, v in self.coeffs.items()}, self.row_reps, self.twist_rep)

    def times(self, u: Section) -> "RelForm":
        """Multiply by a section u, i.e. view the form as twisted by L(-div u) instead."""
        return RelForm(self.degree, {e: v * u for e, v in self.coeffs.items()}, self.row_reps, self.twist_rep - u.rep)

    def as_sympy(self):
        if not self.symbolic:
            raise TypeError("as_sympy is for symbolic forms")
        return sympy.expand(sum(c * Y[0] ** e[0] * Y[1] ** e[1] * Y[2] ** e[2] for e, c in self.coeffs.items()))

    def fiber_values(self, b: CurvePoint) -> dict:
        """Coefficient values at b in the local trivializations."""
        return {e: c.local_value(b) for e, c in self.coeffs.items()}

    def local_series(self, b: CurvePoint, prec: int) -> dict:
        return {e: c.local_series(b, prec) for e, c in self.coeffs.items()}

    def to_json(self):
        if self.symbolic:
            return {"degree": self.degree, "terms": [{"monomial": list(e), "coeff": str(c)} for e, c in self.coeffs.items()]}
        return {
            "degree": self.degree,
            "twist": self.twist_rep.to_json(),
            "terms": [{"monomial": list(e), "section": c.to_json()} for e, c in self.coeffs.items()],
        }


def _mono_rep(e, row_reps) -> Divisor:
    out = Divisor()
    for k, R in zip(e, row_reps):
        if k:
            out = out + R * k
    return out


def build_conic(s2: Sigma2, V1: RankTwoBundle | str | None = None) -> RelForm:
    """Sym^2(sigma2) composed with the Veronese conic of P(V1).

    Split V1: sigma2(x0^2) sigma2(x1^2) - sigma2(x0 x1)^2.  Atiyah V1: the sum of
    psi_j sigma2(z_j)^2, negated so that the y3^2 coefficient is -1 at O.
    """
    kind = V1.kind if isinstance(V1, RankTwoBundle) else (V1 or s2.v1_kind)
    if kind != s2.v1_kind:
        raise CurveError("sigma2 shape does not match V1")
    cols = [s2.column(j) for j in range(3)]
    if kind == "split":
        form = _form_add(_form_mul(cols[0], cols[2]), _form_mul(cols[1], cols[1]), sign=-1)
    else:
        form = {}
        for j in range(3):
            sq = _form_mul(cols[j], cols[j])
            w = 1 if s2.symbolic else s2.reps.weights[j]
            form = _form_add(form, {e: c * w for e, c in sq.items()})
        form = {e: -c for e, c in form.items()}
    if s2.symbolic:
        return RelForm(2, form)
    return RelForm(2, form, s2.reps.rows, s2.reps.conic_twist)


def conic_symbolic(desc: FamilyDescriptor):
    return build_conic(sigma2_symbolic(desc), desc.v1).as_sympy()


def _lin_str(col: dict) -> str:
    terms = []
    for e, c in sorted(col.items(), reverse=True):
        if c == 0:
            continue
        v = f"y{e.index(1) + 1}"
        terms.append(v if c == 1 else f"{c}{v}")
    return "+".join(terms) if terms else "0"


def conic_display(desc: FamilyDescriptor) -> str:
    """The conic in the layout of the equation table, e.g. y2(a1y1+b1y2)=y3^2."""
    s2 = sigma2_symbolic(desc)
    cols = [_lin_str(s2.column(j)) for j in range(3)]
    if desc.v1 == "split":
        c3 = f"({cols[2]})" if "+" in cols[2] else cols[2]
        return f"{cols[0]}{c3}={cols[1]}^2"
    return "+".join(f"({c})^2" if "+" in c else _square_mono(c) for c in cols) + "=0"


def _square_mono(c: str) -> str:
    # a5y1 -> a5^2y1^2
    i = c.rfind("y")
    coef, var = c[:i], c[i:]
    return (f"{coef}^2" if coef else "") + f"{var}^2"


def cubic_display(desc: FamilyDescriptor) -> str:
    terms = []
    for e in desc.cubic:
        k = f"k{e[1]}"
        mono = "".join(f"y{i + 1}" + (f"^{n}" if n > 1 else "") for i, n in enumerate(e) if n)
        terms.append(k + mono)
    return "+".join(terms) + "=0"


# ---------------------------------------------------------------------------
# tau and base points


@dataclass(frozen=True)
class TauResult:
    divisor: Divisor
    reduced: bool
    det: Section

    def to_json(self):
        return {"divisor": self.divisor.to_json(), "reduced": self.reduced, "degree": self.divisor.degree}


def tau_of(s2: Sigma2) -> TauResult:
    d = s2.det()
    if d.is_zero:
        raise ValueError("det sigma2 vanishes identically")
    D = zero_divisor(d)
    return TauResult(D, D.is_reduced(), d)


def rank3(m) -> int:
    """Rank of a 3x3 matrix over Q or a quadratic field."""
    def z(v):
        return is_zero(v)

    det = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
           - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
           + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
    if not z(det):
        return 3
    for i in range(3):
        for i2 in range(i + 1, 3):
            for j in range(3):
                for j2 in range(j + 1, 3):
                    if not z(m[i][j] * m[i2][j2] - m[i][j2] * m[i2][j]):
                        return 2
    if any(not z(v) for row in m for v in row):
        return 1
    return 0


def _cross(u, v):
    return [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]


def _normalize(vec):
    for c in vec:
        if not is_zero(c):
            return [v / c for v in vec]
    raise ValueError("zero vector")


@dataclass(frozen=True)
class BasePointSet:
    points: tuple  # ((b, (Y1, Y2, Y3)), ...)

    def __len__(self):
        return len(self.points)

    def to_json(self):
        from .ec_core import _scalar_json

        return [{"b": b.to_json(), "Y": [_scalar_json(c) for c in Yv]} for b, Yv in self.points]


def fiber_matrix(s2: Sigma2, b: CurvePoint):
    return s2.fiber_matrix(b)


def base_points(s2: Sigma2, tau: TauResult | None = None) -> BasePointSet:
    tau = tau or tau_of(s2)
    if not tau.reduced:
        raise ValueError("base points are defined for reduced tau")
    out = []
    for b in tau.divisor.support:
        M = s2.fiber_matrix(b)
        if rank3(M) != 2:
            raise ValueError(f"fiber matrix at {b!r} has rank {rank3(M)}, expected 2")
        cols = [[M[i][j] for i in range(3)] for j in range(3)]
        Yv = None
        for j1 in range(3):
            for j2 in range(j1 + 1, 3):
                c = _cross(cols[j1], cols[j2])
                if any(not is_zero(v) for v in c):
                    Yv = c
                    break
            if Yv:
                break
        Yv = _normalize(Yv)
        for j in range(3):
            if not is_zero(sum(Yv[i] * M[i][j] for i in range(3))):
                raise ArithmeticError("base point is not in the cokernel direction")
        out.append((b, tuple(Yv)))
    return BasePointSet(tuple(out))


# ---------------------------------------------------------------------------
# fibers of the conic bundle

FIBER_TYPES = {3: "smooth", 2: "two-lines", 1: "double-line"}


def _sym_matrix(vals: dict):
    A = [[mpq(0)] * 3 for _ in range(3)]
    for e, c in vals.items():
        idx = [i for i in range(3) for _ in range(e[i])]
        i, j = idx
        if i == j:
            A[i][i] = A[i][i] + c
        else:
            A[i][j] = A[i][j] + c / 2
            A[j][i] = A[j][i] + c / 2
    return A


def conic_fiber_matrix(C: RelForm, b: CurvePoint):
    return _sym_matrix(C.fiber_values(b))


def _unit_at(E, b: CurvePoint) -> Section:
    """A section of O(2 O), non-vanishing at b and not constant: x - c."""
    if b.is_infinity:
        return Section(Divisor({O: 2}), RationalFunction.x(E))
    c = 0 if not is_zero(b.x) else 1
    return Section(Divisor({O: 2}), RationalFunction(E, [1, -c], []))


def classify_fiber(C: RelForm, b: CurvePoint) -> str:
    r = rank3(conic_fiber_matrix(C, b))
    # the rank must not depend on the trivialization: re-test after twisting by a unit at b
    r2 = rank3(conic_fiber_matrix(C.times(_unit_at(C.curve, b)), b))
    if r2 != r:
        raise ArithmeticError(f"fiber rank at {b!r} depends on the representative")
    if r == 0:
        raise ValueError(f"conic vanishes identically over {b!r}")
    return FIBER_TYPES[r]


def check_fibers_reduced(C: RelForm, tau: TauResult | Divisor) -> bool:
    D = tau.divisor if isinstance(tau, TauResult) else tau
    return all(classify_fiber(C, b) != "double-line" for b in D.support)
