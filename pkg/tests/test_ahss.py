import pytest

from ahsslab.abgroup import FGAbGroup, IntMatrix
from ahsslab.ahss import AhssInstance, CoefficientTheory
from ahsslab.complexes import Cochain, barycentric_subdivision, cohomology, dual_block_decomposition
from ahsslab.data import load_complex

ORDINARY = ["point", "s2", "torus", "rp2", "klein", "rp3"]
COEFFS = ["Z", "Z/2", "Z/6", "Z^2+Z/4"]


def _mod(M: IntMatrix, g: int) -> IntMatrix:
    return IntMatrix([[v % g if g else v for v in row] for row in M.rows], M.ncols)


@pytest.mark.parametrize("name", ORDINARY)
@pytest.mark.parametrize("G", COEFFS)
def test_ordinary_collapse(name, G):
    X = load_complex(name)
    I = AhssInstance(X, CoefficientTheory.ordinary(G))
    R = I.run()
    Gg = FGAbGroup.parse(G)
    for n in range(X.dim + 1):
        gr = R.graded(n)
        assert len(gr) == 1 and gr[0] == (n, cohomology(X, Gg, n))
    assert R.flags == []


@pytest.mark.parametrize("name", ORDINARY)
@pytest.mark.parametrize("G", ["Z", "Z/6"])
def test_d1_is_coboundary(name, G):
    X = load_complex(name)
    I = AhssInstance(X, CoefficientTheory.ordinary(G))
    for p in range(X.dim):
        for M, g in zip(I.d1(p, 0), FGAbGroup.parse(G).orders):
            assert M == _mod(X.coboundary_matrix(p), g)


@pytest.mark.parametrize("name", ORDINARY)
@pytest.mark.parametrize("G", COEFFS)
def test_methods_agree(name, G):
    X = load_complex(name)
    a = AhssInstance(X, CoefficientTheory.ordinary(G), method="presentation")
    b = AhssInstance(X, CoefficientTheory.ordinary(G), method="invariants")
    for p in range(X.dim + 1):
        assert a.e2(p, 0) == b.e2(p, 0)


def test_e1_cell_counts():
    X = load_complex("torus")
    I = AhssInstance(X, CoefficientTheory.ktheory(2))
    assert I.e1(1, -2).group == FGAbGroup(21)
    assert I.e1(1, -1).group == FGAbGroup()
    P = AhssInstance(load_complex("point"), CoefficientTheory.ktheory(0, -4, 4))
    assert P.e1(0, -2).group == FGAbGroup(1)
    assert P.e1(0, 1).group == FGAbGroup()


def test_e1_phi_roundtrip():
    X = load_complex("rp2")
    I = AhssInstance(X, CoefficientTheory.ordinary("Z/2"))
    E = I.e1(1, 0)
    c = Cochain.from_integers(X, 1, [i % 2 for i in range(X.ncells(1))], FGAbGroup.cyclic(2))
    assert E.phi_inverse(E.phi(c)) == c


def test_unit():
    T = CoefficientTheory.ktheory(4)
    assert T.coefficient(0) == FGAbGroup(1)
    assert T.unit == (1,)
    assert all(T.coefficient(q).is_trivial() for q in (-3, -1, 1))


@pytest.mark.parametrize("name, graded", [
    ("s2", {0: "Z", 2: "Z"}),
    ("torus", {0: "Z", 2: "Z"}),
    ("rp2", {0: "Z", 2: "Z/2"}),
    ("rp4", {0: "Z", 2: "Z/2", 4: "Z/2"}),
])
def test_ktheory_degree_zero(name, graded):
    X = load_complex(name)
    I = AhssInstance(X, CoefficientTheory.ktheory(X.dim))
    R = I.run()
    got = {p: g for p, g in R.graded(0) if not g.is_trivial()}
    assert got == {p: FGAbGroup.parse(s) for p, s in graded.items()}
    assert R.flags == []
    for p, evals in I.d3_evaluations.items():
        assert all(e["cochain_zero"] for e in evals)


def test_rp4_reduced_order():
    R = AhssInstance(load_complex("rp4"), CoefficientTheory.ktheory(4)).run()
    assert R.graded_order(0, reduced=True) == 4
    # odd total degree: H^1 and H^3 of RP^4 vanish
    assert all(g.is_trivial() for p, g in R.graded(-1))


def test_ktheory_on_dual_cells_is_flagged():
    X = load_complex("s2xs1")
    D = dual_block_decomposition(X)
    I = AhssInstance(D, CoefficientTheory.ktheory(3))
    flags = I.honesty_flags()
    assert flags and all(f.r == 3 for f in flags)
    assert {(f.p, f.p + f.r) for f in flags} == {(0, 3)}


def test_subdivision_collapse_z2():
    X = load_complex("rp2")
    S = barycentric_subdivision(X).complex
    R = AhssInstance(S, CoefficientTheory.ordinary("Z/2")).run()
    for n in range(3):
        assert R.graded(n)[0][1] == FGAbGroup(0, (2,))


def test_threads_env(monkeypatch):
    X = load_complex("torus")
    base = AhssInstance(X, CoefficientTheory.ordinary("Z")).run()
    monkeypatch.setenv("AHSSLAB_THREADS", "3")
    par = AhssInstance(X, CoefficientTheory.ordinary("Z")).run()
    assert par.einf == base.einf


def test_survivor_of_unit():
    X = load_complex("rp2")
    I = AhssInstance(X, CoefficientTheory.ordinary("Z"))
    one = Cochain.from_integers(X, 0, [1] * X.ncells(0))
    s = I.survivor_class(0, 0, one)
    assert s.survives and s.coordinates == (1,)
    bad = Cochain.from_integers(X, 0, [1] + [0] * (X.ncells(0) - 1))
    s = I.survivor_class(0, 0, bad)
    assert not s.survives and s.died_at == 1
