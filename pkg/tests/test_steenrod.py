import random
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from ahsslab.abgroup import FGAbGroup
from ahsslab.complexes import Cochain
from ahsslab.data import load_complex
from ahsslab.steenrod import (
    CoefficientMismatch,
    NotACocycle,
    bockstein_integral,
    class_coordinates,
    cup,
    cup_i,
    integral_generators,
    is_coboundary,
    mod2_cohomology,
    mod2_generators,
    reduce_mod2,
    sq,
    sq3z,
)

Z2 = FGAbGroup.cyclic(2)
RP = ["rp2", "rp3", "rp4"]


def _powers(X):
    """``x^0..x^n`` for the generator ``x`` of ``H^1(RP^n; Z/2)``."""
    x = mod2_generators(X, 1)[0]
    out = [Cochain.from_integers(X, 0, [1] * X.ncells(0), Z2), x]
    for _ in range(2, X.dim + 1):
        out.append(cup(out[-1], x))
    return out


def _cls(c):
    return class_coordinates(c)


@pytest.mark.parametrize("name", RP)
def test_mod2_cohomology_is_truncated_polynomial(name):
    X = load_complex(name)
    assert [mod2_cohomology(X, p).dimension for p in range(X.dim + 1)] == [1] * (X.dim + 1)
    for k, c in enumerate(_powers(X)):
        assert _cls(c) == (1,), k


@pytest.mark.parametrize("name", RP)
def test_sq_on_powers(name):
    # Sq^k x^m = C(m, k) x^{m+k}
    X = load_complex(name)
    P = _powers(X)
    for m in range(X.dim + 1):
        for k in range(0, X.dim - m + 1):
            expect = comb(m, k) % 2
            assert _cls(sq(k, P[m])) == (expect,), (m, k)


@pytest.mark.parametrize("name", RP)
def test_axioms(name):
    X = load_complex(name)
    P = _powers(X)
    for m in range(1, X.dim + 1):
        a = P[m]
        assert _cls(sq(0, a)) == _cls(a)
        assert sq(0, a) == a or is_coboundary(sq(0, a) + a)
        if 2 * m <= X.dim:
            assert _cls(sq(m, a)) == _cls(cup(a, a))
        assert sq(m + 1, a).is_zero()


@pytest.mark.parametrize("name", RP)
def test_cartan(name):
    X = load_complex(name)
    P = _powers(X)
    n = X.dim
    for i in range(1, n + 1):
        for j in range(1, n + 1 - i):
            ab = cup(P[i], P[j])
            for k in range(0, n - i - j + 1):
                total = None
                for t in range(0, k + 1):
                    term = cup(sq(t, P[i]), sq(k - t, P[j]))
                    total = term if total is None else total + term
                assert _cls(sq(k, ab)) == _cls(total), (i, j, k)


@pytest.mark.parametrize("name", RP)
def test_bockstein(name):
    X = load_complex(name)
    for p in range(X.dim):
        for a in mod2_generators(X, p):
            b = bockstein_integral(a)
            # rho o beta = Sq^1
            assert _cls(reduce_mod2(b.cochain)) == _cls(sq(1, a))
            # beta o beta = 0, seen mod 2 as Sq^1 Sq^1 = 0
            if p + 2 <= X.dim:
                assert _cls(sq(1, sq(1, a))) == (0,) * mod2_cohomology(X, p + 2).dimension


def test_sq3z_on_rp4():
    X = load_complex("rp4")
    gens = integral_generators(X, 2)
    assert len(gens) == 1
    r = sq3z(gens[0])
    assert r.cochain.is_zero()
    for g in integral_generators(X, 0) + integral_generators(X, 1):
        res = sq3z(g)
        assert res.is_zero_class


@pytest.mark.parametrize("name, p", [("rp4", 0), ("rp4", 2), ("rp3", 0), ("torus", 0)])
def test_sq3z_is_two_torsion(name, p):
    X = load_complex(name)
    for g in integral_generators(X, p):
        res = sq3z(g)
        if res.group.ngens:
            assert not any(res.group.reduce([2 * c for c in res.coordinates]))


def _random_mod2(rng, X, d):
    return Cochain.from_integers(X, d, [rng.randrange(2) for _ in range(X.ncells(d))], Z2)


@given(st.integers(0, 10**6), st.sampled_from(["torus", "rp2", "rp3"]))
@settings(max_examples=25)
def test_cup_i_coboundary_identity(seed, name):
    X = load_complex(name)
    rng = random.Random(seed)
    n = X.dim
    p, q = rng.randrange(n + 1), rng.randrange(n + 1)
    i = rng.randrange(min(p, q) + 1)
    if p + q - i + 1 > n:
        return
    a, b = _random_mod2(rng, X, p), _random_mod2(rng, X, q)
    lhs = cup_i(a, b, i).coboundary()
    rhs = Cochain.zero(X, p + q - i + 1, Z2)
    if p + 1 <= n:
        rhs = rhs + cup_i(a.coboundary(), b, i)
    if q + 1 <= n:
        rhs = rhs + cup_i(a, b.coboundary(), i)
    if i >= 1:
        rhs = rhs + cup_i(a, b, i - 1) + cup_i(b, a, i - 1)
    assert lhs == rhs


@given(st.integers(0, 10**6))
@settings(max_examples=20)
def test_cup_graded_commutative_and_associative(seed):
    X = load_complex("torus")
    rng = random.Random(seed)
    gens = {p: mod2_generators(X, p) for p in range(3)}
    a = rng.choice(gens[1])
    b = rng.choice(gens[1])
    assert is_coboundary(cup(a, b) + cup(b, a))
    c = rng.choice(gens[0])
    assert cup(cup(c, a), b) == cup(c, cup(a, b))


def test_errors():
    X = load_complex("rp2")
    integral = Cochain.from_integers(X, 1, [1] + [0] * (X.ncells(1) - 1))
    with pytest.raises(CoefficientMismatch):
        cup_i(integral, integral, 1)
    noncocycle = Cochain.from_integers(X, 1, [1] + [0] * (X.ncells(1) - 1), Z2)
    with pytest.raises(NotACocycle):
        class_coordinates(noncocycle)
