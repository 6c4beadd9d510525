"""The eight families: descriptors, default curves, invariants, dimension counts and constraints.

Divisor data are written as formal sums of named points ("0" is the origin,
"p" the torsion point of the split families, "eta1..3" the 2-torsion points,
"sigma" a 3-torsion point) and resolved against a :class:`Frame`, i.e. a curve
together with those points.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Mapping

from .bundle_calc import RankThreeSplit, RankTwoBundle, aut_dim, delta_dim, hom_dim_bundles, sym2
from .ec_core import (
    CurveError,
    CurvePoint,
    Divisor,
    DivisorClass,
    EllipticCurve,
    O,
    TorsionFrame,
    class_of,
    find_torsion_curve,
    lin_equiv,
    rational_torsion_points,
)

__all__ = [
    "TorsionError",
    "Frame",
    "FamilyDescriptor",
    "SurfaceInvariants",
    "DimensionBreakdown",
    "catalog",
    "family",
    "FAMILY_NAMES",
    "default_frame",
    "frame_from_curve",
    "invariants",
    "expected_dim_bound",
    "dimension",
    "verify_class_constraints",
    "class_constraint_report",
    "distinguishing_invariants",
    "invariant_tuple",
    "mutate",
]


class TorsionError(CurveError):
    """The curve lacks the rational torsion a family needs."""


SPLIT_SHAPE = (("0", "0", "a"), ("1", "0", "b"), ("0", "1", "0"))
DIAG_SHAPE = (("a", "0", "0"), ("0", "d", "0"), ("0", "0", "1"))
FULL_SHAPE = (("a", "b", "0"), ("c", "d", "0"), ("0", "0", "1"))

CUBIC_FULL = ((3, 0, 0), (2, 1, 0), (1, 2, 0), (0, 3, 0))
CUBIC_Y1 = ((3, 0, 0), (1, 2, 0))
CUBIC_PURE = ((3, 0, 0), (0, 3, 0))


@dataclass(frozen=True)
class Frame:
    """A curve with named points; all catalog data are resolved against one."""

    curve: EllipticCurve
    points: Mapping[str, CurvePoint]
    provenance: Mapping[str, object] = field(default_factory=dict)

    def __getitem__(self, name):
        if isinstance(name, CurvePoint):
            return name
        try:
            return self.points[name]
        except KeyError:
            raise TorsionError(f"frame has no point named {name!r}") from None

    def divisor(self, expr: Mapping) -> Divisor:
        return Divisor([(self[k], n) for k, n in expr.items()])

    def cls(self, expr: Mapping) -> DivisorClass:
        return class_of(self.curve, self.divisor(expr))

    def to_json(self):
        return {
            "curve": self.curve.to_json(),
            "points": {k: v.to_json() for k, v in sorted(self.points.items())},
            "provenance": dict(self.provenance),
        }


def _expr(**kw) -> tuple:
    return tuple(sorted(kw.items()))


@dataclass(frozen=True)
class FamilyDescriptor:
    name: str  # command-line name, e.g. M_i_2p
    label: str  # typeset name
    index: int  # subscript of the matrix parameters a_i, b_i, ...
    v1: str  # "split" or "atiyah"
    torsion: int | None  # order of p for split families
    D: tuple  # three class expressions (tuples of (point name, multiplicity))
    shape: tuple  # 3x3 entries: "0", "1" or a parameter letter
    tau: tuple  # class expression of |tau|
    tau_fixed: bool  # tau is a fixed divisor rather than moving in a linear system
    cubic: tuple  # admissible monomials of the cubic (exponents of y1, y2, y3)
    components: int  # second index of the name

    @property
    def params(self) -> list[str]:
        letters = sorted({e for row in self.shape for e in row if e not in ("0", "1")})
        return [f"{c}{self.index}" for c in letters]

    @property
    def letters(self) -> list[str]:
        return sorted({e for row in self.shape for e in row if e not in ("0", "1")})

    def d_exprs(self) -> list[dict]:
        return [dict(e) for e in self.D]

    def tau_expr(self) -> dict:
        return dict(self.tau)

    def required_torsion(self) -> dict:
        if self.v1 == "split":
            return {"p": self.torsion}
        req = {"eta": 2}
        if any("sigma" in dict(e) for e in self.D):
            req["sigma"] = 3
        return req

    # --- class data on a frame
    def V1(self, fr: Frame) -> RankTwoBundle:
        if self.v1 == "split":
            return RankTwoBundle.split(fr.cls({"p": 1}), fr.cls({"0": 1, "p": -1}))
        return RankTwoBundle.atiyah(fr.cls({"0": 1}))

    def V2(self, fr: Frame) -> RankThreeSplit:
        return RankThreeSplit(tuple(fr.cls(e) for e in self.d_exprs()))

    def tau_class(self, fr: Frame) -> DivisorClass:
        return fr.cls(self.tau_expr())

    def twist_G(self, fr: Frame) -> DivisorClass:
        return (self.V1(fr).det + self.tau_class(fr)) * 2

    def to_json(self):
        return {
            "name": self.name,
            "label": self.label,
            "V1": self.v1,
            "torsion": self.torsion,
            "D": [dict(e) for e in self.D],
            "sigma2_shape": [list(r) for r in self.shape],
            "tau": {"class": dict(self.tau), "fixed": self.tau_fixed},
            "cubic_monomials": [list(m) for m in self.cubic],
            "params": self.params,
            "required_torsion": self.required_torsion(),
            "components": self.components,
        }


_CATALOG = (
    FamilyDescriptor("M_2_3", "M_{2,3}", 1, "split", 2,
                     (_expr(**{"0": 2}), _expr(**{"0": 2}), _expr(**{"0": 1})),
                     SPLIT_SHAPE, _expr(**{"0": 2}), False, CUBIC_FULL, 3),
    FamilyDescriptor("M_4_2", "M_{4,2}", 2, "split", 4,
                     (_expr(**{"0": 2}), _expr(p=2), _expr(**{"0": 1})),
                     SPLIT_SHAPE, _expr(p=2), False, CUBIC_Y1, 2),
    FamilyDescriptor("M_3_1", "M_{3,1}", 3, "split", 3,
                     (_expr(**{"0": 1, "p": 1}), _expr(p=2), _expr(**{"0": 1})),
                     SPLIT_SHAPE, _expr(**{"0": 2}), False, CUBIC_PURE, 1),
    FamilyDescriptor("M_6_1", "M_{6,1}", 4, "split", 6,
                     (_expr(**{"p": 4, "0": -2}), _expr(p=2), _expr(**{"0": 1})),
                     SPLIT_SHAPE, _expr(**{"0": 2}), False, CUBIC_PURE, 1),
    FamilyDescriptor("M_i_3", "M_{i,3}", 5, "atiyah", None,
                     (_expr(**{"0": 2}), _expr(**{"0": 2}), _expr(eta3=1)),
                     DIAG_SHAPE, _expr(eta1=1, eta2=1), True, CUBIC_FULL, 3),
    FamilyDescriptor("M_i_2", "M_{i,2}", 6, "atiyah", None,
                     (_expr(**{"0": 2}), _expr(eta1=1, eta2=1), _expr(eta3=1)),
                     FULL_SHAPE, _expr(**{"0": 2}), False, CUBIC_Y1, 2),
    FamilyDescriptor("M_i_2p", "M_{i,2}'", 7, "atiyah", None,
                     (_expr(**{"0": 2}), _expr(**{"0": 1, "eta1": 1}), _expr(eta3=1)),
                     FULL_SHAPE, _expr(**{"0": 1, "eta2": 1}), False, CUBIC_Y1, 2),
    FamilyDescriptor("M_i_1", "M_{i,1}", 8, "atiyah", None,
                     (_expr(**{"0": 1, "sigma": 1}), _expr(sigma=2), _expr(eta3=1)),
                     FULL_SHAPE, _expr(**{"0": 1, "eta3": 1}), False, CUBIC_PURE, 1),
)

FAMILY_NAMES = tuple(f.name for f in _CATALOG)


def catalog() -> list[FamilyDescriptor]:
    return list(_CATALOG)


def family(name: str) -> FamilyDescriptor:
    for f in _CATALOG:
        if f.name == name:
            return f
    raise KeyError(f"unknown family {name!r}; known: {', '.join(FAMILY_NAMES)}")


# ---------------------------------------------------------------------------
# curves

# (order of the marked point, full 2-torsion needed)
_SEARCH = {
    "M_2_3": (2, True),
    "M_4_2": (4, False),
    "M_3_1": (3, False),
    "M_6_1": (6, False),
    "M_i_3": (2, True),
    "M_i_2": (2, True),
    "M_i_2p": (2, True),
    "M_i_1": (3, True),
}


def _frame_points(desc: FamilyDescriptor, tf_points: Mapping[str, CurvePoint]) -> dict:
    pts = {"0": O}
    if desc.v1 == "split":
        pts["p"] = tf_points["p"]
    else:
        for i in (1, 2, 3):
            pts[f"eta{i}"] = tf_points[f"eta{i}"]
        if "sigma" in desc.required_torsion():
            pts["sigma"] = tf_points["p"]
    return pts


@lru_cache(maxsize=None)
def default_frame(name: str) -> Frame:
    """Curve found by Tate-normal-form search, torsion re-verified by the group law."""
    desc = family(name)
    order, full2 = _SEARCH[name]
    tf: TorsionFrame = find_torsion_curve(order, full_two_torsion=full2)
    fr = Frame(tf.curve, _frame_points(desc, tf.points), {"search": dict(tf.search)})
    _check_frame(desc, fr)
    return fr


def frame_from_curve(name: str, E: EllipticCurve) -> Frame:
    """Pick the named torsion points of a family on a user-supplied curve."""
    desc = family(name)
    tors = rational_torsion_points(E)
    order = {P: E.torsion_order(P, 12) for P in tors}
    pts = {"0": O}
    req = desc.required_torsion()
    if "p" in req:
        cands = [P for P in tors if order[P] == req["p"]]
        if not cands:
            raise TorsionError(f"{name} needs a rational point of order {req['p']}")
        pts["p"] = cands[0]
    if "eta" in req:
        etas = E.two_torsion_points()
        if len(etas) != 3:
            raise TorsionError(f"{name} needs full rational 2-torsion")
        for i, P in enumerate(etas, start=1):
            pts[f"eta{i}"] = P
    if "sigma" in req:
        cands = [P for P in tors if order[P] == 3]
        if not cands:
            raise TorsionError(f"{name} needs a rational 3-torsion point")
        pts["sigma"] = cands[0]
    fr = Frame(E, pts, {"source": "user curve"})
    _check_frame(desc, fr)
    return fr


def _check_frame(desc: FamilyDescriptor, fr: Frame):
    E = fr.curve
    for name, n in desc.required_torsion().items():
        keys = ["eta1", "eta2", "eta3"] if name == "eta" else [name]
        for k in keys:
            if E.torsion_order(fr[k], 12) != n:
                raise TorsionError(f"point {k} does not have order {n}")
    if desc.v1 == "atiyah":
        e1, e2, e3 = fr["eta1"], fr["eta2"], fr["eta3"]
        if len({e1, e2, e3}) != 3 or not E.add(e1, e2) == e3:
            raise TorsionError("eta1, eta2, eta3 must be the three distinct 2-torsion points")


# ---------------------------------------------------------------------------
# invariants and dimensions


@dataclass(frozen=True)
class SurfaceInvariants:
    p_g: int
    q: int
    chi: int
    K2: int
    fiber_genus: int = 2

    def to_json(self):
        return {"p_g": self.p_g, "q": self.q, "chi": self.chi, "K2": self.K2, "fiber_genus": self.fiber_genus}


def invariants(deg_v1: int, b: int, deg_tau: int) -> SurfaceInvariants:
    """chi and K^2 of a genus-2 fibration from deg V1, base genus b and deg tau.

    q is taken equal to b (the fibration is the Albanese map, as in the catalog),
    so p_g = chi - 1 + q.
    """
    if deg_v1 < 1 or b < 0 or deg_tau < 0:
        raise ValueError("need deg V1 >= 1, b >= 0, deg tau >= 0")
    chi = deg_v1 + (b - 1)
    K2 = 2 * deg_v1 + 8 * (b - 1) + deg_tau
    q = b
    return SurfaceInvariants(p_g=chi - 1 + q, q=q, chi=chi, K2=K2)


def expected_dim_bound(p_g: int, K2: int) -> int:
    return 11 * p_g - 2 * K2


@dataclass(frozen=True)
class DimensionBreakdown:
    family: str
    h: int
    delta: int
    alpha1: int
    alpha2: int

    @property
    def dim(self) -> int:
        return 1 + self.h + self.delta - self.alpha1 - self.alpha2

    def as_tuple(self) -> tuple:
        return (self.h, self.delta, self.alpha1, self.alpha2, self.dim)

    def to_json(self):
        return {"family": self.family, "h": self.h, "delta": self.delta, "alpha1": self.alpha1,
                "alpha2": self.alpha2, "dim": self.dim}


def dimension(desc: FamilyDescriptor | str, fr: Frame | None = None) -> DimensionBreakdown:
    if isinstance(desc, str):
        desc = family(desc)
    fr = fr or default_frame(desc.name)
    V1, V2 = desc.V1(fr), desc.V2(fr)
    return DimensionBreakdown(
        family=desc.name,
        h=hom_dim_bundles(sym2(V1), V2),
        delta=delta_dim(desc.twist_G(fr), V2),
        alpha1=aut_dim(V1),
        alpha2=aut_dim(V2),
    )


# ---------------------------------------------------------------------------
# class constraints


def class_constraint_report(desc: FamilyDescriptor, fr: Frame | None = None) -> dict:
    fr = fr or default_frame(desc.name)
    E = fr.curve
    D1, D2, D3 = desc.V2(fr).classes if _degrees_ok(desc, fr) else [fr.cls(e) for e in desc.d_exprs()]
    tau = desc.tau_class(fr)
    T = D1 - D2
    zero2 = fr.cls({"0": 2})
    t_order = T.order(12)
    out = {
        "degrees_221": [D1.degree, D2.degree, D3.degree] == [2, 2, 1],
        "degree_sum_5": D1.degree + D2.degree + D3.degree == 5,
        "tau_degree_2": tau.degree == 2,
        "T_order": t_order,
        "T_order_in_123": t_order in (1, 2, 3),
        "D2_is_T_2O": lin_equiv(D2, T + zero2),
    }
    if desc.v1 == "split":
        out["D3_is_O"] = lin_equiv(D3, fr.cls({"0": 1}))
        out["tau_is_T3_2O"] = lin_equiv(tau, T * 3 + zero2)
    else:
        out["D3_is_eta3"] = lin_equiv(D3, fr.cls({"eta3": 1}))
        out["tau_is_T3_O_eta3"] = lin_equiv(tau, T * 3 + fr.cls({"0": 1, "eta3": 1}))
    # |tau| is the class of det sigma2: sum of the D_i minus the Sym^2 V1 classes
    S = sym2(desc.V1(fr)).classes
    det_cls = D1 + D2 + D3 - S[0] - S[1] - S[2]
    out["tau_is_det_sigma2"] = lin_equiv(tau, det_cls)
    out["twist_G_is_6O"] = lin_equiv(desc.twist_G(fr), fr.cls({"0": 6}))
    out["ok"] = all(v for k, v in out.items() if k != "T_order")
    return out


def _degrees_ok(desc, fr) -> bool:
    d = [fr.cls(e).degree for e in desc.d_exprs()]
    return d[0] >= d[1] >= d[2]


def verify_class_constraints(desc: FamilyDescriptor | str, fr: Frame | None = None) -> bool:
    if isinstance(desc, str):
        desc = family(desc)
    return class_constraint_report(desc, fr)["ok"]


def distinguishing_invariants(desc: FamilyDescriptor | str, fr: Frame | None = None) -> dict:
    """(summands of V1, order of its degree-0 summand, order of (det V1)^2 - tau, order of D1 - D2)."""
    if isinstance(desc, str):
        desc = family(desc)
    fr = fr or default_frame(desc.name)
    V1 = desc.V1(fr)
    D1, D2, _ = [fr.cls(e) for e in desc.d_exprs()]
    deg0 = [c for c in V1.summands if c.degree == 0]
    rec = {
        "v1_summands": 2 if V1.kind == "split" else 1,
        "v1_degree0_torsion": deg0[0].order(12) if deg0 else None,
        "det2_minus_tau_torsion": (V1.det * 2 - desc.tau_class(fr)).order(12),
        "D1_minus_D2_torsion": (D1 - D2).order(12),
    }
    return rec


def invariant_tuple(desc, fr=None) -> tuple:
    r = distinguishing_invariants(desc, fr)
    return (r["v1_summands"], r["v1_degree0_torsion"], r["det2_minus_tau_torsion"], r["D1_minus_D2_torsion"])


def mutate(desc: FamilyDescriptor, **changes) -> FamilyDescriptor:
    """A copy of a descriptor with some fields replaced (used to test constraint detection)."""
    return replace(desc, **changes)
