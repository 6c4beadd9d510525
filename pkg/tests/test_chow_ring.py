import pytest
import sympy
from hypothesis import given, settings, strategies as st

from ellfib.chow_ring import (
    ChowClass,
    ChowError,
    canonical_classes,
    evaluate,
    parse_chow,
    section_class,
    top_degree,
)

Hs, Fs = sympy.symbols("H F")


def _to_poly(c: ChowClass):
    mons = (1, Hs, Fs, Hs**2, Hs * Fs, Hs**2 * Fs)
    return sum(k * m for k, m in zip(c.coeffs, mons))


def _reduce(expr, deg_v):
    # independent route: normal form in Q[H, F]/(F^2, H^3 - d H^2 F, degree > 3)
    rels = [Fs**2, Hs**3 - deg_v * Hs**2 * Fs]
    _, r = sympy.reduced(sympy.expand(expr), rels, Hs, Fs, order="grevlex")
    p = sympy.Poly(r, Hs, Fs)
    return sympy.expand(sum(c * Hs**a * Fs**b for (a, b), c in p.terms() if a + b <= 3))


coeff = st.integers(-7, 7)
classes = st.tuples(coeff, coeff, coeff, coeff, coeff, coeff)


@settings(max_examples=120, deadline=None)
@given(classes, classes, classes, st.integers(-3, 8))
def test_ring_axioms(a, b, c, d):
    x, y, z = (ChowClass(t, d, 1) for t in (a, b, c))
    assert x * y == y * x
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * ChowClass.one(d, 1) == x
    assert x - x == ChowClass((0,) * 6, d, 1)
    assert _to_poly(x * y) == _reduce(_to_poly(x) * _to_poly(y), d)


def test_relations():
    H, F = ChowClass.H(), ChowClass.F()
    assert F * F == ChowClass((0,) * 6)
    assert H ** 3 == 5 * (H * H * F)
    assert top_degree(H * H * F) == 1
    assert (H ** 4).coeffs == (0,) * 6


def test_section_and_canonical_classes():
    assert section_class(3, 2) == parse_chow("H^2-5HF")
    K_P, K_C = canonical_classes(5, 1)
    assert str(K_C) == "-H+3*F"
    assert str(K_P) == "-3*H+5*F"


@pytest.mark.parametrize("expr,value", [
    ("(3*H-6*F)*(H^2-5*H*F)", -6),
    ("(-H+3*F)*(H^2-5*H*F)", 3),
    ("(3*H-6*F)*(H^2-4*H*F)", -3),
    ("(2H-2F)(3H-6F)(H-F)", 6),
    ("F*F", 0),
    ("H**3", 5),
])
def test_intersection_numbers(expr, value):
    assert evaluate(expr, 5, 1) == value


def test_non_point_result_is_a_class():
    v = evaluate("H*F")
    assert isinstance(v, ChowClass) and v.is_pure()


@pytest.mark.parametrize("bad", ["", "H+", "(H", "H^", "x", "H F)"])
def test_parse_errors(bad):
    with pytest.raises(ChowError):
        parse_chow(bad)


def test_mixed_rings_rejected():
    with pytest.raises(ChowError):
        ChowClass.H(5) * ChowClass.H(4)
