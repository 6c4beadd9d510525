from fractions import Fraction

import pytest

from ellfib.ec_core import EllipticCurve
from ellfib.moduli_catalog import (
    FAMILY_NAMES,
    Frame,
    TorsionError,
    catalog,
    class_constraint_report,
    default_frame,
    dimension,
    distinguishing_invariants,
    expected_dim_bound,
    family,
    frame_from_curve,
    invariant_tuple,
    invariants,
    mutate,
    verify_class_constraints,
)

# displayed dimension array: (h, delta, alpha1, alpha2, dim) in catalog order
TABLE_DIMS = {
    "M_2_3": (10, 4, 3, 7, 5),
    "M_4_2": (9, 2, 3, 5, 4),
    "M_3_1": (9, 2, 3, 5, 4),
    "M_6_1": (9, 2, 3, 5, 4),
    "M_i_3": (7, 4, 1, 7, 4),
    "M_i_2": (7, 2, 1, 5, 4),
    "M_i_2p": (7, 2, 1, 5, 4),
    "M_i_1": (7, 2, 1, 5, 4),
}


def _e(**kw):
    return tuple(sorted(kw.items()))


SPLIT_POOL = [_e(**{"0": 2}), _e(p=2), _e(**{"0": 1, "p": 1}), _e(**{"0": 1}), _e(p=4, **{"0": -2}),
              _e(**{"0": 3}), _e(p=1)]
ATIYAH_POOL = [_e(**{"0": 2}), _e(eta1=1, eta2=1), _e(**{"0": 1, "eta1": 1}), _e(**{"0": 1, "eta2": 1}),
               _e(eta3=1), _e(**{"0": 1, "eta3": 1}), _e(**{"0": 1}), _e(**{"0": 3})]


def test_catalog_names_and_order():
    assert FAMILY_NAMES == tuple(TABLE_DIMS)
    assert [d.components for d in catalog()] == [3, 2, 1, 1, 3, 2, 2, 1]
    with pytest.raises(KeyError):
        family("M_5_5")


@pytest.mark.parametrize("name", FAMILY_NAMES)
def test_dimension_matches_table(name):
    assert dimension(name).as_tuple() == TABLE_DIMS[name]


def test_invariants():
    inv = invariants(1, 1, 2)
    assert (inv.chi, inv.K2, inv.p_g, inv.q, inv.fiber_genus) == (1, 4, 1, 1, 2)
    assert expected_dim_bound(1, 4) == 3
    assert expected_dim_bound(inv.p_g, inv.K2) == 3


@pytest.mark.parametrize("name", FAMILY_NAMES)
def test_class_constraints(name):
    rep = class_constraint_report(family(name), default_frame(name))
    assert rep["ok"], rep
    assert rep["T_order"] in (1, 2, 3)


def test_distinguishing_tuples_distinct():
    tuples = [invariant_tuple(n) for n in FAMILY_NAMES]
    assert len(set(tuples)) == 8


def _detected(m, fr, others) -> bool:
    deg = sum(fr.cls(e).degree for e in m.d_exprs())
    return deg != 5 or not verify_class_constraints(m, fr) or invariant_tuple(m, fr) in others


@pytest.mark.parametrize("name", FAMILY_NAMES)
def test_single_field_mutations_detected(name):
    desc = family(name)
    fr = default_frame(name)
    others = {invariant_tuple(n) for n in FAMILY_NAMES if n != name}
    pool = SPLIT_POOL if desc.v1 == "split" else ATIYAH_POOL
    if "sigma" in fr.points:
        pool = pool + [_e(**{"0": 1, "sigma": 1}), _e(sigma=2)]
    tried = 0
    for e in pool:
        for i in range(3):
            if fr.cls(dict(e)) == fr.cls(dict(desc.D[i])):
                continue
            D = list(desc.D)
            D[i] = e
            assert _detected(mutate(desc, D=tuple(D)), fr, others), (i, e)
            tried += 1
        if fr.cls(dict(e)) != desc.tau_class(fr):
            assert _detected(mutate(desc, tau=e), fr, others), ("tau", e)
            tried += 1
    assert tried > 10


def test_non_torsion_shift_detected():
    E = EllipticCurve(1, 0, 5, 0, 0)
    fr = frame_from_curve("M_3_1", E)
    assert verify_class_constraints("M_3_1", fr)
    r = E.point(Fraction(-5, 4), Fraction(-5, 8))
    assert E.torsion_order(r) is None
    fr2 = Frame(E, dict(fr.points, r=r), {})
    desc = family("M_3_1")
    D = list(desc.D)
    D[1] = tuple(sorted((dict(D[1]) | {"r": 1, "0": -1}).items()))
    rep = class_constraint_report(mutate(desc, D=tuple(D)), fr2)
    assert not rep["ok"] and rep["T_order"] is None


def test_missing_torsion_raises():
    E = EllipticCurve(0, 0, 1, -1, 0)  # 37a has trivial torsion
    for name in ("M_i_1", "M_3_1", "M_2_3"):
        with pytest.raises(TorsionError):
            frame_from_curve(name, E)


def test_frame_torsion_orders():
    for name in FAMILY_NAMES:
        fr = default_frame(name)
        for key, n in family(name).required_torsion().items():
            keys = ["eta1", "eta2", "eta3"] if key == "eta" else [key]
            assert all(fr.curve.torsion_order(fr[k]) == n for k in keys)


def test_distinguishing_invariants_fields():
    d = distinguishing_invariants("M_6_1")
    assert d["v1_degree0_torsion"] == 6 and d["v1_summands"] == 2
    assert distinguishing_invariants("M_i_1")["v1_degree0_torsion"] is None
