import random

import pytest
from hypothesis import given, settings, strategies as st

from ahsslab.abgroup import FGAbGroup, IntMatrix, reduce_matrix
from ahsslab.specseq import (
    INF,
    FilteredCochainComplex,
    NotADifferential,
    NotFiltrationPreserving,
    cohomology_of,
    differential,
    filtration_on_H,
    page,
    page_homology_iso,
    quotient_complex_cohomology,
    random_filtered_complex,
    relative_cohomology,
    survivors,
)

from _oracle import free_cohomology


def _oracle_H(K, n):
    dims = {k: K.dim(k) for k in K.degrees}
    d = {k: M.tolist() for k, M in K.d.items()}
    return FGAbGroup(*free_cohomology(dims, d, n))


@given(st.integers(0, 10**6))
@settings(max_examples=40)
def test_pages_square_to_zero_and_certify(seed):
    K = random_filtered_complex(random.Random(seed))
    for n in K.degrees:
        for p in range(K.length):
            q = n - p
            for r in range(1, K.length + 1):
                M = differential(K, p, q, r)
                M2 = differential(K, p + r, q - r + 1, r)
                G = page(K, p + 2 * r, q - 2 * r + 2, r).group
                assert reduce_matrix(M2 @ M, G).is_zero()
                w = page_homology_iso(K, p, q, r)
                assert w.kernel_mod_image == w.next_page == w.page_level_group


@given(st.integers(0, 10**6))
@settings(max_examples=40)
def test_einf_is_graded_cohomology(seed):
    K = random_filtered_complex(random.Random(seed))
    for n in K.degrees:
        H = _oracle_H(K, n)
        assert cohomology_of(K, n) == H
        gr = [page(K, p, n - p, INF).group for p in range(K.length)]
        assert filtration_on_H(K, n).graded == gr
        assert sum(g.rank for g in gr) == H.rank
        tors = 1
        for g in gr:
            for t in g.torsion:
                tors *= t
        h_tors = 1
        for t in H.torsion:
            h_tors *= t
        assert tors == h_tors


@given(st.integers(0, 10**6))
@settings(max_examples=20)
def test_relative_groups(seed):
    K = random_filtered_complex(random.Random(seed))
    for n in K.degrees:
        for p in range(K.length):
            for t in range(p, K.length + 1):
                assert relative_cohomology(K, n, p, t).group == quotient_complex_cohomology(K, n, p, t)


@given(st.integers(0, 10**6))
@settings(max_examples=20)
def test_survivors_lift_to_cocycles(seed):
    K = random_filtered_complex(random.Random(seed))
    for n in K.degrees:
        for p in range(K.length):
            sv = survivors(K, p, n - p)
            fin = page(K, p, n - p, INF)
            for k in range(fin.group.ngens):
                e = tuple(int(i == k) for i in range(fin.group.ngens))
                v = fin.presentation.element(e)
                z = sv.lift_to_cocycle(v)
                assert z is not None
                if n in K.d:
                    assert not any(K.d[n].apply(z))


def _two_term(k):
    # Z --k--> Z with the source in F^0 and the target in F^1
    return FilteredCochainComplex({0: (0,), 1: (1,)}, {0: IntMatrix([[k]], 1)}, length=2)


@pytest.mark.parametrize("k", [1, 2, 6])
def test_two_term_complex(k):
    K = _two_term(k)
    assert page(K, 0, 0, 1).group == FGAbGroup(1)
    assert page(K, 1, 0, 1).group == FGAbGroup(1)
    assert differential(K, 0, 0, 1).tolist() == [[k]]
    assert page(K, 1, 0, 2).group == FGAbGroup.from_orders([k])
    assert page(K, 0, 0, 2).group == FGAbGroup()
    assert cohomology_of(K, 1) == FGAbGroup.from_orders([k])


def test_d_squared_nonzero_rejected():
    d = {0: IntMatrix([[1]], 1), 1: IntMatrix([[1]], 1)}
    with pytest.raises(NotADifferential):
        FilteredCochainComplex({0: (0,), 1: (0,), 2: (0,)}, d)


def test_filtration_lowering_rejected():
    with pytest.raises(NotFiltrationPreserving):
        FilteredCochainComplex({0: (1,), 1: (0,)}, {0: IntMatrix([[1]], 1)}, length=2)
