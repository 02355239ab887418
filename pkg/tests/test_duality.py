import pytest

from ahsslab.abgroup import FGAbGroup
from ahsslab.ahss import AhssInstance, CoefficientTheory
from ahsslab.complexes import Cochain, NotRestrictedTriangulation
from ahsslab.data import load_complex, load_document
from ahsslab.duality import (
    NotACycle,
    NotOriented,
    build_pair,
    check_cochain,
    cycle_check,
    dual_cycles,
    gysin_class_ordinary,
    intersection_number,
    pairing,
    pd_cochain,
    rank_equivalence_check,
    verify_main_theorem,
)

Z = FGAbGroup(1)
Z2 = FGAbGroup.cyclic(2)

PAIRS = [
    ("torus_meridian", Z),
    ("s2xs1", Z),
    ("torusxs2", Z),
    ("klein_circle", Z2),
    ("rp2xs2", Z2),
]


def _pair(name):
    doc = load_document(name)
    return build_pair(doc.complex, doc.subcomplex)


@pytest.fixture(scope="module")
def reports():
    return {name: verify_main_theorem(_pair(name), CoefficientTheory.ordinary(G), 1) for name, G in PAIRS}


@pytest.mark.parametrize("name, G", PAIRS)
def test_main_theorem(reports, name, G):
    rep = reports[name]
    assert rep["verdict"] == "EQUAL"
    assert rep["pd_cochain"]["cocycle"]
    assert rep["survival"]["survives"]
    assert rep["pairings"]["pd"] == rep["pairings"]["gysin"]
    assert rep["certificate"]


# [DERIVED] pairings of PD(Y) against the free H_1 / dual-cycle basis, from
# the independent intersection oracle, then frozen.
@pytest.mark.parametrize("name, pd", [
    ("torus_meridian", [0, 1]),
    ("s2xs1", [-1]),
    ("torusxs2", [0, 1]),
    ("klein_circle", [1, 1]),
    ("rp2xs2", [0, 1]),
])
def test_pairings_frozen(reports, name, pd):
    assert reports[name]["pairings"]["pd"] == pd


@pytest.mark.parametrize("name", ["torus_meridian", "s2xs1", "torusxs2"])
def test_pairing_equals_intersection(name):
    pair = _pair(name)
    pd = pd_cochain(pair).cochain
    zs = dual_cycles(pair)
    assert zs
    for z in zs:
        assert pairing(pd, z) == intersection_number(pair, z)


def test_point_in_sphere():
    X = load_complex("s2")
    pair = build_pair(X, [[X.labels[0]]])
    pd = pd_cochain(pair).cochain
    assert [intersection_number(pair, z) for z in dual_cycles(pair)] == [1]
    assert pd.degree == 2
    g = gysin_class_ordinary(pair)
    assert g.degree == 2 and g.is_cocycle()
    # different cochains, same class
    rep = verify_main_theorem(pair, CoefficientTheory.ordinary(Z), 1)
    assert rep["verdict"] == "EQUAL"
    assert rep["pairings"]["pd"] == rep["pairings"]["gysin"] == [1]


def test_whole_manifold():
    X = load_complex("torus")
    Y = [X.simplex_labels(s) for k in range(3) for s in X.simplices(k)]
    pair = build_pair(X, Y)
    assert pair.codim == 0
    assert pd_cochain(pair).cochain.values == gysin_class_ordinary(pair).values


def test_eta_zero_is_trivial():
    rep = verify_main_theorem(_pair("torus_meridian"), CoefficientTheory.ordinary(Z), 0)
    assert rep["verdict"] == "TRIVIAL"


def test_ktheory_not_applicable_but_survives():
    rep = verify_main_theorem(_pair("torus_meridian"), CoefficientTheory.ktheory(2), 1)
    assert rep["verdict"] == "not applicable"
    assert rep["survival"]["survives"]
    assert rep["honesty_flags"] == []


def test_rank_equivalence():
    pair = _pair("torus_meridian")
    Yc = pair.Y.complex
    one = Cochain.from_integers(Yc, 0, [1] * Yc.ncells(0))
    assert rank_equivalence_check(pair, {0: one})
    assert rank_equivalence_check(pair, {0: one.scale(2)})


@pytest.mark.parametrize("name", ["torus_meridian", "s2xs1"])
def test_perturbation_rejected(name):
    pair = _pair(name)
    pd = pd_cochain(pair).cochain
    k = pd.degree
    for j in range(pair.D.ncells(k)):
        e = Cochain.from_integers(pair.D, k, [int(i == j) for i in range(pair.D.ncells(k))])
        bad = pd + e
        if bad.is_cocycle():
            continue
        with pytest.raises(NotACycle):
            check_cochain(pair, bad)
        s = AhssInstance(pair.D, CoefficientTheory.ordinary(Z)).survivor_class(k, 0, bad)
        assert not s.survives and s.died_at == 1
        return
    pytest.fail("no non-cocycle perturbation found")


def test_orientation_requirements():
    pair = _pair("rp2xs2")
    assert not cycle_check(pair, 1, Z)
    assert cycle_check(pair, 1, Z2)
    with pytest.raises(NotOriented):
        pd_cochain(pair, 1, Z)


def test_non_closed_subcomplex_rejected():
    doc = load_document("torus_meridian")
    with pytest.raises(NotRestrictedTriangulation):
        build_pair(doc.complex, [["0", "1"]])
