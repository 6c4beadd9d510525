"""Rank-2 and split rank-3 bundle descriptors on E and their Hom/Aut dimension counts.

Bundles are kept at the level of divisor classes: a split bundle is a list of
line-bundle classes, the Atiyah bundle (indecomposable, rank 2, det of degree 1)
is stored by its determinant and handled only through its symmetric square.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement

from .ec_core import CurveError, DivisorClass, EllipticCurve, O
from .rr_sections import h0, hom_dim

__all__ = [
    "RankTwoBundle",
    "SymDecomposition",
    "RankThreeSplit",
    "sym2",
    "aut_dim",
    "hom_dim_bundles",
    "delta_dim",
    "cubic_monomials",
]


@dataclass(frozen=True)
class RankTwoBundle:
    """Split(c1, c2) or Atiyah(det); ``c1`` is the summand whose square comes first in Sym^2."""

    kind: str
    c1: DivisorClass | None = None
    c2: DivisorClass | None = None
    det_class: DivisorClass | None = None

    def __post_init__(self):
        if self.kind == "split":
            if self.c1 is None or self.c2 is None:
                raise ValueError("split bundle needs two classes")
        elif self.kind == "atiyah":
            if self.det_class is None or self.det_class.degree != 1:
                raise ValueError("the Atiyah bundle is taken with determinant of degree 1")
        else:
            raise ValueError(f"unknown bundle kind {self.kind!r}")

    @staticmethod
    def split(c1: DivisorClass, c2: DivisorClass) -> "RankTwoBundle":
        return RankTwoBundle("split", c1=c1, c2=c2)

    @staticmethod
    def atiyah(det: DivisorClass) -> "RankTwoBundle":
        return RankTwoBundle("atiyah", det_class=det)

    @property
    def curve(self) -> EllipticCurve:
        return (self.c1 if self.kind == "split" else self.det_class).curve

    @property
    def det(self) -> DivisorClass:
        return self.c1 + self.c2 if self.kind == "split" else self.det_class

    @property
    def degree(self) -> int:
        return self.det.degree

    @property
    def summands(self) -> list[DivisorClass]:
        return [self.c1, self.c2] if self.kind == "split" else []

    def to_json(self):
        if self.kind == "split":
            return {"kind": "split", "summands": [self.c1.to_json(), self.c2.to_json()]}
        return {"kind": "atiyah", "det": self.det_class.to_json()}


@dataclass(frozen=True)
class SymDecomposition:
    classes: tuple[DivisorClass, DivisorClass, DivisorClass]

    @property
    def degrees(self) -> tuple[int, int, int]:
        return tuple(c.degree for c in self.classes)


@dataclass(frozen=True)
class RankThreeSplit:
    """O(D1) + O(D2) + O(D3) with d3 <= d2 <= d1."""

    classes: tuple[DivisorClass, DivisorClass, DivisorClass]

    def __post_init__(self):
        d = [c.degree for c in self.classes]
        if not d[0] >= d[1] >= d[2]:
            raise ValueError(f"summand degrees must be non-increasing, got {d}")

    @property
    def degree(self) -> int:
        return sum(c.degree for c in self.classes)

    @property
    def degrees(self) -> tuple[int, int, int]:
        return tuple(c.degree for c in self.classes)


def sym2(V1: RankTwoBundle) -> SymDecomposition:
    if V1.kind == "split":
        a, b = V1.c1, V1.c2
        return SymDecomposition((a * 2, a + b, b * 2))
    det = V1.det_class
    if not det.aj.is_infinity:
        raise CurveError("Sym^2 of the Atiyah bundle is tabulated only for det = O(0); translate first")
    E = det.curve
    etas = E.two_torsion_points()
    if len(etas) != 3:
        raise CurveError("the curve needs full rational 2-torsion")
    return SymDecomposition(tuple(DivisorClass.of_point(E, P) for P in etas))


def _aut_split(classes) -> int:
    return sum(h0(ci - cj) for ci in classes for cj in classes)


def aut_dim(V) -> int:
    if isinstance(V, RankTwoBundle):
        if V.kind == "atiyah":
            # End of an indecomposable bundle of coprime rank and degree is the constants
            return 1
        return _aut_split(V.summands)
    if isinstance(V, RankThreeSplit):
        return _aut_split(V.classes)
    raise TypeError(f"unsupported bundle {V!r}")


def hom_dim_bundles(src: SymDecomposition, dst: RankThreeSplit) -> int:
    return sum(hom_dim(s, d) for s in src.classes for d in dst.classes)


def cubic_monomials() -> list[tuple[int, int, int]]:
    """Exponent triples of the degree-3 monomials in y1, y2, y3, lexicographically decreasing."""
    out = []
    for combo in combinations_with_replacement(range(3), 3):
        e = [0, 0, 0]
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return sorted(out, reverse=True)


def monomial_class(exps, classes) -> DivisorClass:
    E = classes[0].curve
    out = DivisorClass.trivial(E)
    for e, c in zip(exps, classes):
        out = out + c * e
    return out


def delta_dim(source: DivisorClass, V2: RankThreeSplit) -> int:
    return sum(h0(monomial_class(m, V2.classes) - source) for m in cubic_monomials())
