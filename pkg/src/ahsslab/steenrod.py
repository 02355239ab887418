"""Cochain-level products and the mod-2 Steenrod algebra on ordered simplicial complexes.

Conventions
-----------
A simplex is the increasing tuple ``(v_0, ..., v_n)`` of its vertex numbers.

Cup product (Alexander-Whitney), for ``a`` of degree ``p`` and ``b`` of degree ``q``::

    (a ⌣ b)(v_0..v_{p+q}) = a(v_0..v_p) * b(v_p..v_{p+q})

Cup-i products (mod 2 only, Steenrod's interval formula).  ``a ⌣_i b`` has
degree ``n = p + q - i``.  For ``0 <= u_0 < u_1 < ... < u_i <= n`` put
``u_{-1} = 0`` and ``u_{i+1} = n`` and split ``[0, n]`` into the intervals
``I_k = [u_{k-1}, u_k]`` for ``k = 0..i+1``.  The even-numbered intervals
form the front face, the odd-numbered ones the back face::

    (a ⌣_i b)(σ) = Σ_U a(σ|front) * b(σ|back)     (mod 2)

summing over the ``U`` for which the front face has ``p + 1`` vertices and
the back face ``q + 1``.  Index table:

    ======================  ==================================  ============
    quantity                value                               degree
    ======================  ==================================  ============
    ``a ⌣_0 b``             ``a ⌣ b`` (mod 2)                   p + q
    ``a ⌣_i b``             interval formula above              p + q - i
    ``Sq^k a``, deg a = d   ``a ⌣_{d-k} a``                     d + k
    ``Sq^k a``, k > d       0                                   d + k
    ``β a``                 ``δ ã / 2`` for a 0/1 lift ``ã``    d + 1
    ``Sq³_ℤ a``             ``β Sq² ρ₂ a``                      d + 3
    ======================  ==================================  ============

With these conventions the coboundary identity (mod 2) is

    δ(a ⌣_i b) = a ⌣_{i-1} b + b ⌣_{i-1} a + δa ⌣_i b + a ⌣_i δb

for ``i >= 1`` and ``δ(a ⌣_0 b) = δa ⌣ b + a ⌣ δb``.  No signs are needed
because all cup-i arithmetic is mod 2.  The integral ``Sq³_ℤ`` is used with a
``+`` sign; a sign would not change kernels or images.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Callable, Optional, Sequence

from .abgroup import FGAbGroup
from .complexes import Cochain, SimplicialComplex, cohomology_presentation
from .gf2 import Gf2Cohomology, to_bits

Z = FGAbGroup(1)
Z2 = FGAbGroup(0, (2,))


class CoefficientMismatch(ValueError):
    """Operands have incompatible coefficient groups."""


class IndexOutOfRange(ValueError):
    """A cup-i index or square index outside the admissible range."""


class NotACocycle(ValueError):
    """An operation defined on cohomology received a non-cocycle."""


@dataclass(frozen=True)
class CochainOperation:
    """A named cochain operation with its degree shift and coefficient types."""

    name: str
    arity: int
    degree_shift: int
    domain: str
    codomain: str
    func: Callable

    def __call__(self, *args):
        return self.func(*args)


@dataclass(frozen=True)
class OperationResult:
    """A representative cocycle and, on demand, its class."""

    cochain: Cochain

    @property
    def degree(self) -> int:
        return self.cochain.degree

    @cached_property
    def group(self) -> FGAbGroup:
        return _class_group(self.cochain)

    @cached_property
    def coordinates(self) -> tuple[int, ...]:
        return class_coordinates(self.cochain)

    def is_zero_class(self) -> bool:
        return not any(self.coordinates)


# ---------------------------------------------------------------------------
# helpers


def _simplicial(c: Cochain) -> SimplicialComplex:
    X = c.complex
    if not isinstance(X, SimplicialComplex):
        raise TypeError("cochain products need an ordered simplicial complex")
    return X


def _ints(c: Cochain) -> list[int]:
    if c.coefficients.ngens != 1:
        raise CoefficientMismatch("products need cyclic (ring) coefficients")
    return [v[0] for v in c.values]


def _make(X, degree: int, G: FGAbGroup, values: Sequence[int]) -> Cochain:
    return Cochain(X, degree, G, tuple((v,) for v in values))


def _zero(X, degree: int, G: FGAbGroup) -> Cochain:
    return Cochain.zero(X, degree, G)


def _require_mod2(*cs: Cochain) -> None:
    for c in cs:
        if c.coefficients != Z2:
            raise CoefficientMismatch("cup-i products are implemented mod 2 only")


def _require_cocycle(c: Cochain) -> None:
    if not c.is_cocycle():
        raise NotACocycle(f"degree-{c.degree} cochain is not a cocycle")


@lru_cache(maxsize=None)
def _interval_splits(p: int, q: int, i: int) -> tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]:
    """Front/back vertex positions of every admissible ``U`` for ``⌣_i`` on degrees ``p, q``."""
    n = p + q - i
    out = []
    for U in combinations(range(n + 1), i + 1):
        cuts = (0,) + U + (n,)
        front: list[int] = []
        back: list[int] = []
        for k in range(i + 2):
            lo, hi = cuts[k], cuts[k + 1]
            part = front if k % 2 == 0 else back
            for v in range(lo, hi + 1):
                if not part or part[-1] != v:
                    part.append(v)
        if len(front) == p + 1 and len(back) == q + 1:
            out.append((tuple(front), tuple(back)))
    return tuple(out)


# ---------------------------------------------------------------------------
# products


def cup(a: Cochain, b: Cochain) -> Cochain:
    """Alexander-Whitney cup product over a cyclic coefficient ring.

    >>> from ahsslab.data import load_complex
    >>> X = load_complex("s1")
    >>> one = Cochain.from_integers(X, 0, [1, 1, 1])
    >>> c = Cochain.from_integers(X, 1, [1, 0, 0])
    >>> cup(one, c) == c
    True
    """
    X = _simplicial(a)
    if b.complex is not X:
        raise ValueError("cochains on different complexes")
    if a.coefficients != b.coefficients:
        raise CoefficientMismatch(f"{a.coefficients} vs {b.coefficients}")
    G = a.coefficients
    av, bv = _ints(a), _ints(b)
    p, q = a.degree, b.degree
    n = p + q
    if n > X.dim:
        return _zero(X, n, G)
    idx_a = X.index
    out = []
    for s in X.simplices(n):
        x = av[idx_a(s[: p + 1], p)]
        if x:
            y = bv[idx_a(s[p:], q)]
            out.append(x * y)
        else:
            out.append(0)
    return _make(X, n, G, out)


def cup_i(a: Cochain, b: Cochain, i: int) -> Cochain:
    """Steenrod's ``a ⌣_i b`` with mod-2 coefficients."""
    X = _simplicial(a)
    if b.complex is not X:
        raise ValueError("cochains on different complexes")
    _require_mod2(a, b)
    p, q = a.degree, b.degree
    if i < 0 or i > min(p, q):
        raise IndexOutOfRange(f"cup_{i} needs 0 <= i <= min({p}, {q})")
    n = p + q - i
    if n > X.dim:
        return _zero(X, n, Z2)
    av, bv = _ints(a), _ints(b)
    splits = _interval_splits(p, q, i)
    idx = X.index
    out = []
    for s in X.simplices(n):
        acc = 0
        for front, back in splits:
            if av[idx(tuple(s[j] for j in front), p)] and bv[idx(tuple(s[j] for j in back), q)]:
                acc ^= 1
        out.append(acc)
    return _make(X, n, Z2, out)


def reduce_mod2(a: Cochain) -> Cochain:
    """Coefficient reduction ``ρ₂`` from integral (or even-order cyclic) cochains."""
    G = a.coefficients
    if G.ngens != 1 or (G.orders[0] % 2 if G.orders[0] else 0):
        raise CoefficientMismatch(f"no reduction map {G} -> Z/2")
    return _make(a.complex, a.degree, Z2, [v & 1 for v in _ints(a)])


def sq(k: int, a: Cochain) -> Cochain:
    """``Sq^k a = a ⌣_{d-k} a`` for a mod-2 cocycle of degree ``d``."""
    _simplicial(a)
    _require_mod2(a)
    if k < 0:
        raise IndexOutOfRange("Sq^k needs k >= 0")
    _require_cocycle(a)
    d = a.degree
    if k > d:
        return _zero(a.complex, d + k, Z2)
    return cup_i(a, a, d - k)


def bockstein_integral(a: Cochain) -> OperationResult:
    """Integral Bockstein of a mod-2 cocycle: the class of ``δã / 2``."""
    _require_mod2(a)
    _require_cocycle(a)
    lift = Cochain.from_integers(a.complex, a.degree, _ints(a))
    d = lift.coboundary()
    vals = _ints(d)
    if any(v % 2 for v in vals):
        raise AssertionError("coboundary of a mod-2 cocycle lift must be even")
    return OperationResult(_make(a.complex, a.degree + 1, Z, [v // 2 for v in vals]))


def sq3z(a: Cochain) -> OperationResult:
    """Integral ``Sq³_ℤ = β ∘ Sq² ∘ ρ₂`` of an integral cocycle."""
    if a.coefficients != Z:
        raise CoefficientMismatch("Sq3_Z takes integral cochains")
    _require_cocycle(a)
    return bockstein_integral(sq(2, reduce_mod2(a)))


OPERATIONS = {
    "cup": CochainOperation("cup", 2, 0, "cyclic ring", "same ring", cup),
    "cup_i": CochainOperation("cup_i", 2, 0, "Z/2", "Z/2", cup_i),
    "sq": CochainOperation("sq", 1, 0, "Z/2", "Z/2", sq),
    "bockstein": CochainOperation("bockstein", 1, 1, "Z/2", "Z", bockstein_integral),
    "sq3z": CochainOperation("sq3z", 1, 3, "Z", "Z", sq3z),
    "reduce_mod2": CochainOperation("reduce_mod2", 1, 0, "Z", "Z/2", reduce_mod2),
}


# ---------------------------------------------------------------------------
# classes


def mod2_cohomology(X: SimplicialComplex, p: int) -> Gf2Cohomology:
    """Mod-2 cohomology in degree ``p`` by bit-vector elimination (memoised on ``X``)."""
    cache = X.__dict__.setdefault("_gf2_cache", {})
    if p not in cache:
        n = X.ncells(p) if 0 <= p <= X.dim else 0

        def delta(k):
            if k < 0 or k >= X.dim:
                return [0] * (X.ncells(k) if 0 <= k <= X.dim else 0)
            return [sum(1 << j for j in col) for col in X.coboundary_columns(k)]

        cache[p] = Gf2Cohomology(n, delta(p - 1), delta(p))
    return cache[p]


def is_coboundary(c: Cochain) -> bool:
    """Whether ``c`` is a coboundary (mod-2 fast path, integral presentations otherwise)."""
    if c.degree > c.complex.dim or c.degree < 0:
        return True
    if c.coefficients == Z2:
        return mod2_cohomology(c.complex, c.degree).is_coboundary(to_bits(_ints(c)))
    pres = cohomology_presentation(c.complex, c.coefficients, c.degree)
    return pres.contains(c) and pres.is_zero(c)


def _class_group(c: Cochain) -> FGAbGroup:
    X = c.complex
    if c.degree > X.dim or c.degree < 0:
        return FGAbGroup()
    if c.coefficients == Z2:
        return FGAbGroup(0, (2,) * mod2_cohomology(X, c.degree).dimension)
    return cohomology_presentation(X, c.coefficients, c.degree).group


def class_coordinates(c: Cochain) -> tuple[int, ...]:
    """Coordinates of the class of a cocycle in the presented cohomology group."""
    X = c.complex
    if c.degree > X.dim or c.degree < 0:
        return ()
    if c.coefficients == Z2:
        coords = mod2_cohomology(X, c.degree).coordinates(to_bits(_ints(c)))
        if coords is None:
            raise NotACocycle("not a cocycle")
        return coords
    pres = cohomology_presentation(X, c.coefficients, c.degree)
    if not pres.contains(c):
        raise NotACocycle("not a cocycle")
    return pres.coordinates(c)


def mod2_generators(X: SimplicialComplex, p: int) -> list[Cochain]:
    """Representative cocycles of a basis of ``H^p(X; Z/2)``."""
    H = mod2_cohomology(X, p)
    n = H.ncells
    return [_make(X, p, Z2, [(g >> j) & 1 for j in range(n)]) for g in H.generators]


def integral_generators(X: SimplicialComplex, p: int) -> list[Cochain]:
    return cohomology_presentation(X, Z, p).generators()
