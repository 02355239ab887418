import json

import pytest
from hypothesis import given, strategies as st

from ahsslab.abgroup import FGAbGroup
from ahsslab.complexes import (
    Cochain,
    NotAManifold,
    NotRestrictedTriangulation,
    SimplicialComplex,
    Subcomplex,
    barycentric_subdivision,
    betti_numbers,
    check_links,
    cohomology,
    cohomology_presentation,
    dual_block_decomposition,
    fundamental_cycle,
    homology,
    product_complex,
)
from ahsslab.data import NAMES, load_complex
from ahsslab.io import DocumentParseError, DocumentValidationError, parse_document

from _oracle import simplicial_cohomology

Z = FGAbGroup(1)
Z2 = FGAbGroup.cyclic(2)

# Integral cohomology (rank, torsion) per degree.  [DERIVED] sympy Smith
# forms of the coboundary matrices (tests/_oracle.py), then frozen.
FROZEN = {
    "point": [(1, ())],
    "s1": [(1, ()), (1, ())],
    "s2": [(1, ()), (0, ()), (1, ())],
    "torus": [(1, ()), (2, ()), (1, ())],
    "rp2": [(1, ()), (0, ()), (0, (2,))],
    "klein": [(1, ()), (1, ()), (0, (2,))],
    "rp3": [(1, ()), (0, ()), (0, (2,)), (1, ())],
    "rp4": [(1, ()), (0, ()), (0, (2,)), (0, ()), (0, (2,))],
    "s2xs1": [(1, ()), (1, ()), (1, ()), (1, ())],
    "rp2xs2": [(1, ()), (0, ()), (1, (2,)), (0, ()), (0, (2,))],
    "torusxs2": [(1, ()), (2, ()), (2, ()), (2, ()), (1, ())],
    "torus_meridian": [(1, ()), (2, ()), (1, ())],
    "klein_circle": [(1, ()), (1, ()), (0, (2,))],
}
CELLS = {"torus": (7, 21, 14), "rp2": (6, 15, 10), "rp4": (20, 160, 450, 515, 206)}
SMALL = ["point", "s1", "s2", "torus", "rp2", "klein", "rp3"]


def test_every_bundled_complex_frozen():
    assert set(FROZEN) == set(NAMES)


@pytest.mark.parametrize("name", NAMES)
def test_cohomology_frozen(name):
    X = load_complex(name)
    got = [cohomology(X, Z, p) for p in range(X.dim + 1)]
    assert got == [FGAbGroup(r, t) for r, t in FROZEN[name]]


@pytest.mark.parametrize("name", SMALL)
@pytest.mark.parametrize("modulus", [0, 2, 4])
def test_cohomology_matches_oracle(name, modulus):
    X = load_complex(name)
    G = FGAbGroup.cyclic(modulus) if modulus else Z
    for p in range(X.dim + 1):
        r, t = simplicial_cohomology(X, p, modulus)
        assert cohomology(X, G, p) == FGAbGroup(r, t)


@pytest.mark.parametrize("name, counts", sorted(CELLS.items()))
def test_cell_counts(name, counts):
    assert load_complex(name).cell_counts == counts


@pytest.mark.parametrize("name", SMALL)
def test_homology_and_cohomology_agree_with_uct(name):
    X = load_complex(name)
    for p in range(X.dim + 1):
        H = homology(X, p)
        C = cohomology(X, Z, p)
        Hprev = homology(X, p - 1) if p else FGAbGroup()
        # H^p = Hom(H_p) + Ext(H_{p-1})
        assert C == FGAbGroup(H.rank, Hprev.torsion)


@pytest.mark.parametrize("name", ["s2", "torus", "rp2", "klein"])
def test_subdivision_invariance(name):
    X = load_complex(name)
    S = barycentric_subdivision(X).complex
    assert S.euler_characteristic() == X.euler_characteristic()
    for G in (Z, Z2):
        for p in range(X.dim + 1):
            assert cohomology(S, G, p) == cohomology(X, G, p)


def test_fundamental_cycle():
    assert fundamental_cycle(load_complex("torus")) is not None
    assert fundamental_cycle(load_complex("rp2")) is None
    assert fundamental_cycle(load_complex("rp2"), modulus=2) is not None


@pytest.mark.parametrize("name", ["s2", "torus", "rp3", "s2xs1"])
def test_dual_blocks_integral(name):
    X = load_complex(name)
    D = dual_block_decomposition(X)
    n = X.dim
    for p in range(n + 1):
        assert homology(D, n - p) == cohomology(X, Z, p)
        # dual k-cells correspond to (n-k)-simplices
        assert D.ncells(n - p) == X.ncells(p)


@pytest.mark.parametrize("name", ["rp2", "klein", "rp4"])
def test_dual_blocks_mod2(name):
    X = load_complex(name)
    with pytest.raises(NotAManifold):
        dual_block_decomposition(X)
    D = dual_block_decomposition(X, modulus=2)
    for p in range(X.dim + 1):
        assert D.ncells(X.dim - p) == X.ncells(p)


def test_non_manifold_rejected():
    # two triangles glued at one vertex
    X = SimplicialComplex.from_facets([["a", "b", "c"], ["a", "d", "e"]])
    with pytest.raises(NotAManifold):
        dual_block_decomposition(X)
    # suspension of two circles: links of the cone points are not spheres
    circle2 = [["a", "b"], ["b", "c"], ["a", "c"], ["d", "e"], ["e", "f"], ["d", "f"]]
    susp = [e + [t] for e in circle2 for t in ("N", "S")]
    with pytest.raises(NotAManifold):
        check_links(SimplicialComplex.from_facets(susp))


def test_product_complex():
    S1 = load_complex("s1")
    T = product_complex(S1, S1)
    assert betti_numbers(T) == (1, 2, 1)
    assert T.euler_characteristic() == 0


def test_subcomplex_requires_restriction():
    X = load_complex("torus")
    with pytest.raises(NotRestrictedTriangulation):
        Subcomplex(X, [["0", "1", "99"]], by_label=True, close=True)


@given(st.sampled_from(["torus", "rp3"]), st.integers(0, 1), st.data())
def test_coboundary_squares_to_zero(name, p, data):
    X = load_complex(name)
    vals = data.draw(st.lists(st.integers(-3, 3), min_size=X.ncells(p), max_size=X.ncells(p)))
    assert Cochain.from_integers(X, p, vals).coboundary().coboundary().is_zero()


@pytest.mark.parametrize("name", ["torus", "rp2"])
def test_class_presentation_roundtrip(name):
    X = load_complex(name)
    for p in range(X.dim + 1):
        P = cohomology_presentation(X, Z, p)
        for k, g in enumerate(P.generators()):
            assert g.is_cocycle()
            coords = P.coordinates(g)
            assert coords == tuple(int(i == k) for i in range(P.ngens))


def test_document_parsing():
    doc = parse_document(json.dumps({"simplices": [["a", "b"], ["b", "c"], ["a", "c"]]}))
    assert doc.complex.cell_counts == (3, 3)
    with pytest.raises(DocumentParseError):
        parse_document("{not json")
    with pytest.raises(DocumentParseError):
        parse_document(json.dumps({"vertices": ["a"]}))
    with pytest.raises(DocumentValidationError):
        parse_document(json.dumps({"simplices": [["a", "a"]]}))
    with pytest.raises(DocumentValidationError):
        parse_document(json.dumps({"simplices": [["a", "b"]], "orientation_cycle": [1, 1]}))
