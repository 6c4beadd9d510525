import pytest

from ellfib.bundle_calc import (
    RankThreeSplit,
    RankTwoBundle,
    aut_dim,
    cubic_monomials,
    delta_dim,
    hom_dim_bundles,
    monomial_class,
    sym2,
)
from ellfib.ec_core import CurveError, DivisorClass
from ellfib.moduli_catalog import catalog, default_frame


def test_cubic_monomials():
    m = cubic_monomials()
    assert len(m) == 10 and m[0] == (3, 0, 0) and m[-1] == (0, 0, 3)
    assert all(sum(e) == 3 for e in m)


@pytest.mark.parametrize("desc", catalog(), ids=lambda d: d.name)
def test_sym2_degrees(desc):
    fr = default_frame(desc.name)
    V1 = desc.V1(fr)
    S = sym2(V1)
    assert sum(S.degrees) == 3 * V1.degree == 3
    assert S.degrees == ((2, 1, 0) if desc.v1 == "split" else (1, 1, 1))


def test_sym2_atiyah_summands_are_two_torsion_points():
    fr = default_frame("M_i_3")
    S = sym2(RankTwoBundle.atiyah(fr.cls({"0": 1})))
    E = fr.curve
    assert set(S.classes) == {DivisorClass.of_point(E, fr[f"eta{i}"]) for i in (1, 2, 3)}


def test_sym2_atiyah_needs_origin_determinant():
    fr = default_frame("M_i_3")
    with pytest.raises(CurveError):
        sym2(RankTwoBundle.atiyah(fr.cls({"eta1": 1})))


def test_aut_dims():
    fr = default_frame("M_2_3")
    assert aut_dim(RankTwoBundle.atiyah(fr.cls({"0": 1}))) == 1
    # O(p) + O(0 - p): h0 of the two degree-zero differences vanish, two degree-one pieces
    assert aut_dim(catalog()[0].V1(fr)) == 3
    V2 = RankThreeSplit((fr.cls({"0": 2}),) * 2 + (fr.cls({"0": 1}),))
    assert aut_dim(V2) == 4 + 2 + 1 == 7


def test_hom_and_delta_for_first_family():
    desc = catalog()[0]
    fr = default_frame(desc.name)
    assert hom_dim_bundles(sym2(desc.V1(fr)), desc.V2(fr)) == 10
    assert delta_dim(desc.twist_G(fr), desc.V2(fr)) == 4
    classes = desc.V2(fr).classes
    assert monomial_class((3, 0, 0), classes) == classes[0] * 3
