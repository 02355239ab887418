from math import prod

import pytest
from hypothesis import given, strategies as st

from ahsslab.abgroup import (
    FGAbGroup,
    IntMatrix,
    Span,
    Subquotient,
    image_basis,
    invariant_factors,
    kernel_basis,
    membership,
    present,
    smith_normal_form,
)

from _oracle import minors_invariant_factors, sympy_invariant_factors


def matrices(max_side=4, lo=-5, hi=5):
    return st.integers(0, max_side).flatmap(
        lambda m: st.integers(0, max_side).flatmap(
            lambda n: st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=m, max_size=m).map(
                lambda rows: (rows, n)
            )
        )
    )


@given(matrices())
def test_smith_decomposition(mn):
    rows, n = mn
    M = IntMatrix(rows, n)
    D = smith_normal_form(M)
    assert D.U @ M @ D.V == D.S
    assert abs(D.U.determinant()) == 1 and abs(D.V.determinant()) == 1
    assert D.U @ D.Uinv == IntMatrix.identity(M.nrows)
    diag = D.diagonal
    assert all(d >= 0 for d in diag)
    nz = [d for d in diag if d]
    assert diag[: len(nz)] == tuple(nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))


@given(matrices(max_side=4, lo=-4, hi=4))
def test_invariant_factors_match_minors(mn):
    rows, n = mn
    expected = minors_invariant_factors(rows) if rows and n else ()
    assert invariant_factors(IntMatrix(rows, n)) == expected
    assert tuple(d for d in smith_normal_form(IntMatrix(rows, n)).diagonal if d) == expected


@given(matrices(max_side=7, lo=-9, hi=9))
def test_invariant_factors_match_sympy(mn):
    rows, n = mn
    assert invariant_factors(IntMatrix(rows, n)) == sympy_invariant_factors(rows, n)


def test_smith_doc_example():
    assert smith_normal_form([[2, 4], [6, 8]]).diagonal == (2, 4)


@given(st.lists(st.integers(0, 30), max_size=6))
def test_from_orders_preserves_order_and_rank(orders):
    G = FGAbGroup.from_orders(orders)
    assert G.rank == orders.count(0)
    if G.rank == 0:
        assert G.order == prod(orders)
    else:
        assert G.order is None
    assert all(b % a == 0 for a, b in zip(G.torsion, G.torsion[1:]))


@pytest.mark.parametrize(
    "spec, rank, torsion",
    [("0", 0, ()), ("Z", 1, ()), ("Z/2", 0, (2,)), ("Z^2+Z/4", 2, (4,)), ("Z/2+Z/3", 0, (6,)), ("Z/6+Z/4", 0, (2, 12))],
)
def test_parse(spec, rank, torsion):
    G = FGAbGroup.parse(spec)
    assert (G.rank, G.torsion) == (rank, torsion)


def test_invalid_group_rejected():
    with pytest.raises(ValueError):
        FGAbGroup(0, (4, 2))
    with pytest.raises(ValueError):
        FGAbGroup(-1)


@given(matrices(max_side=5))
def test_kernel_and_image(mn):
    rows, n = mn
    M = IntMatrix(rows, n)
    K = kernel_basis(M)
    assert (M @ K).is_zero()
    assert K.ncols == n - len(invariant_factors(M))
    I = image_basis(M)
    S = Span(I)
    for c in M.columns():
        assert S.contains(c)


@given(matrices(max_side=4), st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_membership_roundtrip(mn, coeffs):
    rows, n = mn
    if not rows:
        return
    M = IntMatrix(rows, n)
    v = M.apply(coeffs[:n])
    x = membership(v, M)
    assert x is not None
    assert M.apply(x) == v


@given(st.integers(1, 12), st.integers(1, 12))
def test_cyclic_subquotient(a, b):
    # (a Z) / (ab Z) = Z/b
    sq = Subquotient.of(1, IntMatrix([[a]], 1), IntMatrix([[a * b]], 1))
    P = present(sq)
    assert P.group == FGAbGroup.from_orders([b])
    x = P.element((1,) if P.group.ngens else ())
    assert P.contains(x)
