from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ellfib.ec_core import (
    CurveError,
    CurvePoint,
    Divisor,
    DivisorClass,
    EllipticCurve,
    O,
    class_of,
    find_torsion_curve,
    integral_short_model,
    lin_equiv,
    rational_torsion_points,
    tate_normal_form,
)
from ellfib.qfield import Quad, mpq, q_from_json, q_to_json, to_q

# 37a: y^2 + y = x^3 - x, Mordell-Weil group Z generated by (0, 0)
E37 = EllipticCurve(0, 0, 1, -1, 0)
P37 = E37.point(0, 0)
# multiples of the generator, tabulated independently
MULTIPLES_37 = {
    1: (0, 0),
    2: (1, 0),
    3: (-1, -1),
    4: (2, -3),
    5: (Fraction(1, 4), Fraction(-5, 8)),
    6: (6, 14),
    7: (Fraction(-5, 9), Fraction(8, 27)),
}


def test_to_q_accepts_common_inputs():
    assert to_q(3) == mpq(3)
    assert to_q("2/6") == mpq(1, 3)
    assert to_q(Fraction(-1, 2)) == mpq(-1, 2)
    assert q_from_json(q_to_json(mpq(7, 3))) == mpq(7, 3)


def test_quad_arithmetic():
    r = Quad.sqrt_of(mpq(8))
    assert r * r == mpq(8)
    z = Quad(mpq(1), mpq(2), 5)
    assert z * z.inverse() == 1
    assert z.norm() == 1 - 4 * 5


def test_singular_curve_rejected():
    with pytest.raises(CurveError):
        EllipticCurve(0, 0, 0, 0, 0)


@pytest.mark.parametrize("n", sorted(MULTIPLES_37))
def test_multiples_on_37a(n):
    x, y = MULTIPLES_37[n]
    assert E37.mul(n, P37) == E37.point(x, y)


def test_negation_and_identity():
    Q = E37.mul(3, P37)
    assert E37.add(Q, E37.neg(Q)) == O
    assert E37.add(Q, O) == Q
    assert E37.neg(O) == O


def _collinear(E, P, Q, R) -> bool:
    """The line through P, Q (tangent if P = Q) meets E again at R."""
    if P.is_infinity or Q.is_infinity or R.is_infinity:
        return True
    if P == Q:
        # tangent direction (dF/dy, -dF/dx) at P
        dx, dy = E.dF_dy(P.x, P.y), -E.dF_dx(P.x, P.y)
    else:
        dx, dy = Q.x - P.x, Q.y - P.y
    return dx * (R.y - P.y) - dy * (R.x - P.x) == 0


small = st.integers(min_value=-6, max_value=6)


@settings(max_examples=120, deadline=None)
@given(small, small, small)
def test_group_law_axioms(a, b, c):
    P, Q, R = (E37.mul(k, P37) for k in (a, b, c))
    add = E37.add
    assert add(P, Q) == add(Q, P)
    assert add(add(P, Q), R) == add(P, add(Q, R))
    S = add(P, Q)
    assert E37.contains(S)
    # chord-tangent: P, Q and -(P+Q) lie on one line
    assert _collinear(E37, P, Q, E37.neg(S))
    assert add(P, E37.mul(b, P37)) == E37.mul(a + b, P37)


E3 = EllipticCurve(1, 0, 5, 0, 0)  # (0, 0) has order 3, (-5/4, -5/8) has infinite order


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2), st.integers(-3, 3), st.integers(0, 2), st.integers(-3, 3))
def test_group_law_with_torsion(t1, n1, t2, n2):
    T, R = E3.point(0, 0), E3.point(Fraction(-5, 4), Fraction(-5, 8))
    P = E3.add(E3.mul(t1, T), E3.mul(n1, R))
    Q = E3.add(E3.mul(t2, T), E3.mul(n2, R))
    assert E3.add(P, Q) == E3.add(E3.mul((t1 + t2) % 3, T), E3.mul(n1 + n2, R))
    assert _collinear(E3, P, Q, E3.neg(E3.add(P, Q)))


def test_torsion_orders():
    assert E3.torsion_order(E3.point(0, 0)) == 3
    assert E3.torsion_order(E3.point(Fraction(-5, 4), Fraction(-5, 8))) is None
    assert E37.torsion_order(P37) is None


def test_two_torsion_points_sorted():
    E = EllipticCurve(0, -1, 0, -4, 4)  # (x-1)(x-2)(x+2)
    pts = E.two_torsion_points()
    assert [P.x for P in pts] == [-2, 1, 2]
    assert all(E.torsion_order(P) == 2 for P in pts)


@pytest.mark.parametrize("order,full2", [(2, True), (3, False), (4, False), (6, False), (3, True)])
def test_find_torsion_curve(order, full2):
    tf = find_torsion_curve(order, full_two_torsion=full2)
    E = tf.curve
    assert E.ainvs[0] == 0 and E.ainvs[2] == 0
    assert all(c.denominator == 1 for c in E.ainvs)
    assert E.torsion_order(tf["p"]) == order
    if full2:
        assert len(E.two_torsion_points()) == 3


def test_default_curves():
    # frozen from the search: the curves the catalog uses
    tf = find_torsion_curve(2, full_two_torsion=True)
    assert tuple(tf.curve.ainvs) == (0, -1, 0, -4, 4)
    assert tf["p"] == tf.curve.point(2, 0)
    tf = find_torsion_curve(4)
    assert tuple(tf.curve.ainvs) == (0, -3, 0, -8, 16)
    assert tf["p"] == tf.curve.point(0, -4)
    tf = find_torsion_curve(3, full_two_torsion=True)
    assert tuple(tf.curve.ainvs) == (0, 13, 0, -240, 576)
    assert tf["p"] == tf.curve.point(12, -36)


def test_integral_short_model_preserves_group():
    E = tate_normal_form(mpq(1, 2), mpq(0))
    E2, phi, phi_inv = integral_short_model(E)
    P = CurvePoint(mpq(0), mpq(0))
    for n in range(1, 5):
        assert phi(E.mul(n, P)) == E2.mul(n, phi(P))
        assert phi_inv(phi(E.mul(n, P))) == E.mul(n, P)


def test_rational_torsion_points():
    E = EllipticCurve(0, -1, 0, -4, 4)
    tors = rational_torsion_points(E)
    assert len(tors) == 8  # Z/2 x Z/4
    assert sorted(E.torsion_order(P) or 0 for P in tors).count(4) == 4


def test_divisor_arithmetic():
    Q = E37.mul(2, P37)
    D = Divisor({P37: 2, O: -1}) + Divisor({Q: 1})
    assert D.degree == 2
    assert not D.is_effective()
    assert (D - D).degree == 0 and len(D - D) == 0
    assert Divisor.from_json(D.to_json()) == D
    assert Divisor({P37: 1, Q: 1}).is_reduced()
    assert not Divisor({P37: 2}).is_reduced()


def test_divisor_classes():
    D = Divisor({P37: 1, E37.mul(2, P37): 1})
    c = class_of(E37, D)
    assert c.degree == 2 and c.aj == E37.mul(3, P37)
    assert lin_equiv(c, DivisorClass.of_point(E37, E37.mul(3, P37)) + DivisorClass.of_point(E37, O))
    assert class_of(E37, c.canonical_divisor()) == c
    T = E3.point(0, 0)
    t = DivisorClass.of_point(E3, T) - DivisorClass.of_point(E3, O)
    assert t.order() == 3
    assert (t * 3).is_trivial
