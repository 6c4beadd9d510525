import random

import pytest
import sympy

from ellfib.branch import sample_params
from ellfib.ec_core import CurveError, O, class_of
from ellfib.moduli_catalog import FAMILY_NAMES, catalog, default_frame, family
from ellfib.rel_forms import (
    FIBER_TYPES,
    RelForm,
    Sigma2,
    Y,
    base_points,
    build_conic,
    build_sigma2,
    check_fibers_reduced,
    classify_fiber,
    conic_display,
    conic_symbolic,
    cubic_display,
    rank3,
    tau_of,
)

# conic and cubic columns of the equation table, written as in the source
TABLE_CONIC = {
    "M_2_3": "y2*(a1*y1+b1*y2)=y3**2",
    "M_4_2": "y2*(a2*y1+b2*y2)=y3**2",
    "M_3_1": "y2*(a3*y1+b3*y2)=y3**2",
    "M_6_1": "y2*(a4*y1+b4*y2)=y3**2",
    "M_i_3": "a5**2*y1**2+d5**2*y2**2+y3**2=0",
    "M_i_2": "(a6*y1+c6*y2)**2+(b6*y1+d6*y2)**2+y3**2=0",
    "M_i_2p": "(a7*y1+c7*y2)**2+(b7*y1+d7*y2)**2+y3**2=0",
    "M_i_1": "(a8*y1+c8*y2)**2+(b8*y1+d8*y2)**2+y3**2=0",
}
TABLE_CUBIC = {
    "M_2_3": "k0*y1**3+k1*y1**2*y2+k2*y1*y2**2+k3*y2**3",
    "M_4_2": "y1*(k0*y1**2+k2*y2**2)",
    "M_3_1": "k0*y1**3+k3*y2**3",
    "M_6_1": "k0*y1**3+k3*y2**3",
    "M_i_3": "k0*y1**3+k1*y1**2*y2+k2*y1*y2**2+k3*y2**3",
    "M_i_2": "y1*(k0*y1**2+k2*y2**2)",
    "M_i_2p": "y1*(k0*y1**2+k2*y2**2)",
    "M_i_1": "k0*y1**3+k3*y2**3",
}
# |tau| column of the two sigma2 tables
TABLE_TAU = {
    "M_2_3": {"0": 2}, "M_4_2": {"p": 2}, "M_3_1": {"0": 2}, "M_6_1": {"0": 2},
    "M_i_3": {"eta1": 1, "eta2": 1}, "M_i_2": {"0": 2}, "M_i_2p": {"0": 1, "eta2": 1},
    "M_i_1": {"0": 1, "eta3": 1},
}


def _member(name, seed=1):
    desc = family(name)
    fr = default_frame(name)
    p = sample_params(desc, fr, random.Random(seed))
    letters = {l: p[f"{l}{desc.index}"] for l in desc.letters}
    return desc, fr, build_sigma2(desc, fr, letters), p


def _one_side(eq: str):
    lhs, rhs = eq.split("=")
    return sympy.expand(sympy.sympify(lhs) - sympy.sympify(rhs))


@pytest.mark.parametrize("name", FAMILY_NAMES)
def test_conic_matches_table(name):
    got = sympy.expand(conic_symbolic(family(name)))
    want = _one_side(TABLE_CONIC[name])
    assert got == want or got == -want


DISPLAY = {
    "M_2_3": "y2(a1y1+b1y2)=y3^2",
    "M_i_3": "a5^2y1^2+d5^2y2^2+y3^2=0",
    "M_i_2": "(a6y1+c6y2)^2+(b6y1+d6y2)^2+y3^2=0",
}


@pytest.mark.parametrize("name", sorted(DISPLAY))
def test_conic_display(name):
    assert conic_display(family(name)) == DISPLAY[name]


@pytest.mark.parametrize("name", FAMILY_NAMES)
def test_cubic_shape_matches_table(name):
    desc = family(name)
    k = sympy.symbols("k0:4")
    built = sum(k[e[1]] * Y[0] ** e[0] * Y[1] ** e[1] * Y[2] ** e[2] for e in desc.cubic)
    want = sympy.sympify(TABLE_CUBIC[name], locals={f"y{i + 1}": Y[i] for i in range(3)})
    assert sympy.expand(built - want) == 0
    assert cubic_display(desc).endswith("=0")


@pytest.mark.parametrize("name", FAMILY_NAMES)
def test_tau_class(name):
    desc, fr, s2, _ = _member(name)
    tau = tau_of(s2)
    assert tau.reduced and tau.divisor.degree == 2
    assert class_of(fr.curve, tau.divisor) == fr.cls(TABLE_TAU[name])


def test_tau_fixed_for_diagonal_family():
    desc, fr, s2, _ = _member("M_i_3", seed=5)
    assert tau_of(s2).divisor == fr.divisor({"eta1": 1, "eta2": 1})


@pytest.mark.parametrize("name", FAMILY_NAMES)
def test_fibers_and_base_points(name):
    desc, fr, s2, _ = _member(name)
    C = build_conic(s2, desc.V1(fr))
    tau = tau_of(s2)
    assert check_fibers_reduced(C, tau)
    for b in tau.divisor.support:
        assert classify_fiber(C, b) == "two-lines"
    # away from tau the fiber is a smooth conic
    assert classify_fiber(C, O) == "smooth" or O in tau.divisor.support
    base = base_points(s2, tau)
    assert len(base.points) == 2
    for b, Yv in base.points:
        assert Yv[2] == 0
        assert rank3(s2.fiber_matrix(b)) == 2
    # the y3^2 coefficient is a unit with local value -1 at the origin
    assert C.coefficient((0, 0, 2)).local_value(O) == -1


def test_sigma2_entry_reps_checked():
    desc, fr, s2, _ = _member("M_2_3")
    assert all(s2.entries[i][j].rep == s2.reps.rows[i] - s2.reps.cols[j] for i in range(3) for j in range(3))
    bad = [list(r) for r in s2.entries]
    bad[0][0], bad[0][1] = bad[0][1], bad[0][0]
    with pytest.raises(CurveError):
        Sigma2(tuple(tuple(r) for r in bad), "split", s2.reps)


def test_b_zero_gives_double_lines():
    desc = family("M_2_3")
    fr = default_frame("M_2_3")
    s2 = build_sigma2(desc, fr, {"a": [3, 1], "b": [0, 0]})
    C = build_conic(s2, "split")
    tau = tau_of(s2)
    assert not check_fibers_reduced(C, tau)
    assert "double-line" in {classify_fiber(C, b) for b in tau.divisor.support}


def test_fiber_type_names():
    assert set(FIBER_TYPES.values()) == {"smooth", "two-lines", "double-line"}


def test_relform_json_keys():
    desc, fr, s2, _ = _member("M_3_1")
    C = build_conic(s2, "split")
    j = C.to_json()
    assert j["degree"] == 2
    assert isinstance(C, RelForm)
    with pytest.raises(TypeError):
        C.as_sympy()
