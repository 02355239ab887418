"""The spectral sequence of a finitely filtered cochain complex.

All pages live inside the ambient free modules ``K^n = Z^{m_n}``.  With
``B^s K^n = d(F^s K^{n-1})`` and

    Z_r^{p,q} = {a in F^p K^{p+q} : d a in F^{p+r} K^{p+q+1}},

the page ``E_r^{p,q}`` is the subquotient ``N / D`` with

    N = Z_r + B^{p-r+1} K^{p+q} + F^{p+1} K^{p+q},
    D =       B^{p-r+1} K^{p+q} + F^{p+1} K^{p+q}.

``F^p = K`` for ``p <= 0`` and ``F^p = 0`` for ``p >= l``; ``r = INF`` means
``r = l`` (the page has stabilised there).  The differential is induced by
the ambient ``d`` itself, and the page-homology isomorphism is induced by the
identity of ``K^n``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

from .abgroup import (
    FGAbGroup,
    IntMatrix,
    Span,
    Subquotient,
    SubquotientPresentation,
    hom_homology,
    induced_hom,
    kernel_basis,
    preimage,
    smith_normal_form,
    sparse_rank_and_torsion,
)

INF = math.inf


class NotADifferential(ValueError):
    """``d o d`` is not zero."""


class NotFiltrationPreserving(ValueError):
    """``d`` does not map ``F^p`` into ``F^p``."""


class IsoFailure(AssertionError):
    """The page-homology isomorphism could not be certified."""


class FilteredCochainComplex:
    """Free cochain complex with a coordinate filtration.

    ``dims[n]`` is the rank of ``K^n`` for ``n`` in ``range(nmin, nmax + 1)``;
    ``levels[n][i]`` is the filtration level of basis vector ``i`` (a
    nondecreasing tuple, so each ``F^p`` is spanned by a suffix of the basis);
    ``d[n]`` is the ``m_{n+1} x m_n`` matrix of ``d^n``.  ``length`` is ``l``
    with ``F^l = 0``; all levels must lie in ``[0, l)``.
    """

    def __init__(
        self,
        levels: dict[int, Sequence[int]],
        d: dict[int, IntMatrix],
        length: Optional[int] = None,
        validate: bool = True,
    ):
        self.levels = {n: tuple(int(x) for x in lv) for n, lv in levels.items()}
        if not self.levels:
            raise ValueError("empty complex")
        self.nmin = min(self.levels)
        self.nmax = max(self.levels)
        for n in range(self.nmin, self.nmax + 1):
            self.levels.setdefault(n, ())
        top = max((max(lv) for lv in self.levels.values() if lv), default=-1)
        self.length = top + 1 if length is None else int(length)
        if self.length < 1:
            self.length = 1
        self.d = {}
        for n in range(self.nmin - 1, self.nmax + 1):
            src, dst = self.dim(n), self.dim(n + 1)
            M = d.get(n)
            if M is None:
                M = IntMatrix.zeros(dst, src)
            if M.shape != (dst, src):
                raise ValueError(f"d^{n} has shape {M.shape}, expected {(dst, src)}")
            self.d[n] = M
        self._cache: dict = {}
        if validate:
            self.validate()

    def dim(self, n: int) -> int:
        return len(self.levels.get(n, ()))

    @property
    def degrees(self) -> range:
        return range(self.nmin, self.nmax + 1)

    def validate(self) -> None:
        for n, lv in self.levels.items():
            if any(lv[i] > lv[i + 1] for i in range(len(lv) - 1)):
                raise ValueError(f"levels in degree {n} must be nondecreasing (use adapt_filtration)")
            if lv and (lv[0] < 0 or lv[-1] >= self.length):
                raise ValueError(f"levels in degree {n} must lie in [0, {self.length})")
        for n in self.degrees:
            M = self.d[n]
            src, dst = self.levels[n], self.levels.get(n + 1, ())
            for j, row in enumerate(M.rows):
                for i, v in enumerate(row):
                    if v and dst[j] < src[i]:
                        raise NotFiltrationPreserving(
                            f"d^{n} sends a level-{src[i]} vector to level {dst[j]}"
                        )
            if n + 1 in self.d and not (self.d[n + 1] @ M).is_zero():
                raise NotADifferential(f"d^{n + 1} d^{n} != 0")

    # -- submodules of K^n, as spanning columns -----------------------------

    def _first_at(self, n: int, p) -> int:
        lv = self.levels.get(n, ())
        lo = 0
        while lo < len(lv) and lv[lo] < p:
            lo += 1
        return lo

    def filtration_span(self, n: int, p) -> IntMatrix:
        """``F^p K^n`` as unit columns."""
        m = self.dim(n)
        start = self._first_at(n, p)
        return IntMatrix.from_columns([_unit(m, i) for i in range(start, m)], m)

    def boundary_span(self, n: int, s) -> IntMatrix:
        """``B^s K^n = d(F^s K^{n-1})``."""
        m = self.dim(n)
        if self.dim(n - 1) == 0:
            return IntMatrix.zeros(m, 0)
        start = self._first_at(n - 1, s)
        return self.d[n - 1].select_columns(range(start, self.dim(n - 1)))

    def cocycles(self, n: int, p=0) -> IntMatrix:
        """Basis of the cocycles in ``F^p K^n``."""
        return self._z(n, p, INF)

    def _z(self, n: int, p, r) -> IntMatrix:
        key = ("z", n, p, r)
        if key in self._cache:
            return self._cache[key]
        m = self.dim(n)
        start = self._first_at(n, p)
        cols = list(range(start, m))
        if not cols:
            res = IntMatrix.zeros(m, 0)
        else:
            rows_keep = [j for j in range(self.dim(n + 1)) if self.levels[n + 1][j] < p + r]
            sub = self.d[n].select_rows(rows_keep).select_columns(cols) if rows_keep else IntMatrix.zeros(0, len(cols))
            ker = kernel_basis(sub) if rows_keep else IntMatrix.identity(len(cols))
            res = IntMatrix([[0] * ker.ncols for _ in range(start)] + [list(r_) for r_ in ker.rows], ker.ncols) if ker.nrows else IntMatrix.zeros(m, 0)
        self._cache[key] = res
        return res

    def effective_r(self, r) -> int:
        if r == INF:
            return self.length
        r = int(r)
        if r < 1:
            raise ValueError("pages start at r = 1")
        return r


def _unit(m: int, i: int) -> tuple[int, ...]:
    return tuple(1 if j == i else 0 for j in range(m))


# ---------------------------------------------------------------------------
# Pages


@dataclass
class Page:
    """``E_r^{p,q}`` with representatives.

    ``representatives`` has one column per generator of ``group``; each is a
    vector of ``Z_r^{p,q}`` inside ``K^{p+q}``.
    """

    p: int
    q: int
    r: object
    group: FGAbGroup
    representatives: IntMatrix
    subquotient: Subquotient
    presentation: SubquotientPresentation
    z_span: IntMatrix

    @property
    def degree(self) -> int:
        return self.p + self.q

    def coordinates(self, v: Sequence[int]) -> tuple[int, ...]:
        return self.presentation.coordinates(v)

    def contains(self, v: Sequence[int]) -> bool:
        return self.presentation.contains(v)

    def is_zero(self, v: Sequence[int]) -> bool:
        return self.presentation.is_zero(v)


def z_r(K: FilteredCochainComplex, p: int, q: int, r) -> IntMatrix:
    """Basis of ``Z_r^{p,q}`` (columns in ``K^{p+q}``)."""
    return K._z(p + q, p, K.effective_r(r))


def page(K: FilteredCochainComplex, p: int, q: int, r=1) -> Page:
    """``E_r^{p,q}`` as a presented subquotient (``r`` may be ``INF``)."""
    r_eff = K.effective_r(r)
    key = ("page", p, q, r_eff)
    if key in K._cache:
        return K._cache[key]
    n = p + q
    m = K.dim(n)
    Z = K._z(n, p, r_eff)
    den = K.boundary_span(n, p - r_eff + 1).hstack(K.filtration_span(n, p + 1))
    num = Z.hstack(den)
    sq = Subquotient(m, num, den)
    pres = SubquotientPresentation(sq, check=False)
    # representatives: keep only the Z_r part of each generator's lift
    k = Z.ncols
    lifts = pres.lifts
    reps = Z @ lifts.select_rows(range(k)) if k else IntMatrix.zeros(m, lifts.ncols)
    pg = Page(p, q, r, pres.group, reps, sq, pres, Z)
    K._cache[key] = pg
    return pg


def _shift(K: FilteredCochainComplex, r) -> int:
    return K.effective_r(r)


def differential(K: FilteredCochainComplex, p: int, q: int, r) -> IntMatrix:
    """Matrix of ``d_r : E_r^{p,q} -> E_r^{p+r, q-r+1}`` on page generators."""
    r_eff = K.effective_r(r)
    s = _shift(K, r)
    key = ("diff", p, q, s)
    if key in K._cache:
        return K._cache[key]
    src = page(K, p, q, r_eff)
    dst = page(K, p + s, q - s + 1, r_eff)
    n = p + q
    f = K.d.get(n, IntMatrix.zeros(K.dim(n + 1), K.dim(n)))
    M = induced_hom(f, src.presentation, dst.presentation)
    K._cache[key] = M
    return M


def apply_d(K: FilteredCochainComplex, n: int, v: Sequence[int]) -> tuple[int, ...]:
    return K.d[n].apply(v)


# ---------------------------------------------------------------------------
# Page homology


@dataclass
class IsoWitness:
    """Certificate that ``E_{r+1}^{p,q} = Ker d_r / Im d_r``.

    ``matrix`` is the map from ``Ker/Im`` (presented inside ``K^{p+q}``) to
    ``E_{r+1}`` induced by the identity.  ``page_level_group`` recomputes
    ``Ker/Im`` from the page differential matrices alone.
    """

    p: int
    q: int
    r: int
    kernel_mod_image: FGAbGroup
    next_page: FGAbGroup
    page_level_group: FGAbGroup
    matrix: IntMatrix


def _in_span(S: Span, M: IntMatrix) -> bool:
    return all(S.contains(c) for c in M.columns())


def page_homology_iso(K: FilteredCochainComplex, p: int, q: int, r) -> IsoWitness:
    """Certify ``E_{r+1}^{p,q} = Ker d_r / Im d_r`` through the identity of ``K^{p+q}``.

    Checks ``Ker <= N_{r+1}``, ``Im <= D_{r+1}``, ``N_{r+1} <= Ker + D_{r+1}``
    and ``Ker & D_{r+1} <= Im``, where ``Ker`` and ``Im`` are the ambient
    preimages of the page kernel and image.  The quotient ``Ker / Im`` is also
    rebuilt from the page differentials alone and compared as a group.
    """
    s = _shift(K, r)
    r = K.effective_r(r)
    n = p + q
    m = K.dim(n)
    cur = page(K, p, q, r)
    nxt = page(K, p, q, r + 1)
    N_r = cur.subquotient.numerator_gens
    D_r = cur.subquotient.denominator_gens
    tgt = page(K, p + s, q - s + 1, r)
    f = K.d.get(n, IntMatrix.zeros(K.dim(n + 1), K.dim(n)))
    ker = preimage(f, tgt.subquotient.denominator_gens, N_r) if N_r.ncols else IntMatrix.zeros(m, 0)
    srcp = page(K, p - s, q + s - 1, r)
    f_in = K.d.get(n - 1, IntMatrix.zeros(m, K.dim(n - 1)))
    im = (f_in @ srcp.subquotient.numerator_gens).hstack(D_r) if srcp.subquotient.numerator_gens.ncols else D_r
    N1 = nxt.subquotient.numerator_gens
    D1 = nxt.subquotient.denominator_gens

    if not _in_span(Span(N1), ker):
        raise IsoFailure(f"({p},{q},{r}): kernel not inside the next numerator")
    if not _in_span(Span(D1), im):
        raise IsoFailure(f"({p},{q},{r}): image not inside the next denominator")
    if not _in_span(Span(ker.hstack(D1)), N1):
        raise IsoFailure(f"({p},{q},{r}): not surjective")
    inter = _intersect(ker, D1)
    if not _in_span(Span(im), inter):
        raise IsoFailure(f"({p},{q},{r}): not injective")

    kim = SubquotientPresentation(Subquotient(m, ker.hstack(im), im), check=False)
    M = induced_hom(IntMatrix.identity(m), kim, nxt.presentation)
    if kim.group != nxt.group:
        raise IsoFailure(f"({p},{q},{r}): {kim.group} vs {nxt.group}")

    d_out = differential(K, p, q, s)
    d_in = differential(K, p - s, q + s - 1, s)
    hom = hom_homology(srcp.group, cur.group, tgt.group, d_in, d_out)
    if hom.group != nxt.group:
        raise IsoFailure(f"({p},{q},{r}): page-level homology {hom.group} vs {nxt.group}")
    return IsoWitness(p, q, s, kim.group, nxt.group, hom.group, M)


def _intersect(A: IntMatrix, B: IntMatrix) -> IntMatrix:
    if A.ncols == 0 or B.ncols == 0:
        return IntMatrix.zeros(A.nrows, 0)
    rel = Span(A.hstack(-B)).relations
    return A @ rel.select_rows(range(A.ncols))


# ---------------------------------------------------------------------------
# Survivors and the filtration on cohomology


class Survivors:
    """The surviving subgroup ``A^{p,q}`` of ``E_1^{p,q}`` and its map to ``E_inf``.

    ``A`` is the image of the cocycles of ``F^p K^{p+q}`` in ``E_1``.
    ``spanning`` lists E_1 coordinate vectors spanning ``A``.
    """

    def __init__(self, K: FilteredCochainComplex, p: int, q: int):
        self.K = K
        self.p, self.q = p, q
        n = p + q
        self.e1 = page(K, p, q, 1)
        self.einf = page(K, p, q, INF)
        self.cocycles = K._z(n, p, INF) if 0 <= p < K.length else IntMatrix.zeros(K.dim(n), 0)
        dF = K.d.get(n, IntMatrix.zeros(K.dim(n + 1), K.dim(n))) @ K.filtration_span(n, p + 1)
        self._dF = Span(dF)
        self._Fp1 = K.filtration_span(n, p + 1)
        self._d = K.d.get(n, IntMatrix.zeros(K.dim(n + 1), K.dim(n)))

    @cached_property
    def spanning(self) -> list[tuple[int, ...]]:
        return [self.e1.coordinates(z) for z in self.cocycles.columns()]

    @cached_property
    def images(self) -> list[tuple[int, ...]]:
        return [self.einf.coordinates(z) for z in self.cocycles.columns()]

    def lift_to_cocycle(self, v: Sequence[int]) -> Optional[tuple[int, ...]]:
        """A cocycle ``v - f`` with ``f`` in ``F^{p+1}``, or ``None`` if ``v`` does not survive."""
        dv = self._d.apply(v)
        c = self._dF.solve(dv)
        if c is None:
            return None
        f = self._Fp1.apply(c)
        return tuple(a - b for a, b in zip(v, f))

    def representative(self, coords: Sequence[int]) -> tuple[int, ...]:
        return self.e1.presentation.element(coords)

    def contains(self, coords: Sequence[int]) -> bool:
        """Membership via the lifting criterion ``d x in d(F^{p+1})``."""
        return self.lift_to_cocycle(self.representative(coords)) is not None

    def contains_by_span(self, coords: Sequence[int]) -> bool:
        """Membership via the span of the images of the cocycles of ``F^p``."""
        G = self.e1.group
        rel = [[d if i == j else 0 for i in range(G.ngens)] for j, d in enumerate(G.orders) if d]
        cols = [list(c) for c in self.spanning] + rel
        if not cols:
            return not any(G.reduce(coords))
        return Span(IntMatrix.from_columns(cols, G.ngens)).contains(coords)

    def to_infinity(self, coords: Sequence[int]) -> Optional[tuple[int, ...]]:
        """Image in ``E_inf`` of a surviving E_1 class, or ``None``."""
        z = self.lift_to_cocycle(self.representative(coords))
        if z is None:
            return None
        return self.einf.coordinates(z)


def survivors(K: FilteredCochainComplex, p: int, q: int) -> Survivors:
    return Survivors(K, p, q)


@dataclass
class FiltrationOnH:
    """``H^n = F^0 H >= F^1 H >= ... >= F^l H = 0`` with graded pieces."""

    n: int
    cohomology: SubquotientPresentation
    steps: list[IntMatrix]
    graded: list[FGAbGroup]


def filtration_on_H(K: FilteredCochainComplex, n: int) -> FiltrationOnH:
    """The filtration induced on ``H^n(K)`` and its graded pieces."""
    m = K.dim(n)
    B = K.boundary_span(n, 0)
    Z = K._z(n, 0, INF)
    H = SubquotientPresentation(Subquotient(m, Z.hstack(B), B), check=False)
    steps = []
    graded = []
    for p in range(K.length + 1):
        Zp = K._z(n, p, INF) if p < K.length else IntMatrix.zeros(m, 0)
        steps.append(Zp)
    for p in range(K.length):
        num = steps[p].hstack(B)
        den = steps[p + 1].hstack(B)
        graded.append(SubquotientPresentation(Subquotient(m, num, den), check=False).group)
    return FiltrationOnH(n, H, steps, graded)


# ---------------------------------------------------------------------------
# Relative cohomology


@dataclass
class RelativeCohomology:
    """``H^n(p, t) = H^n(F^p K / F^t K)`` with representatives in ``F^p K^n``."""

    n: int
    p: int
    t: int
    group: FGAbGroup
    representatives: IntMatrix
    presentation: SubquotientPresentation


def relative_cohomology(K: FilteredCochainComplex, n: int, p: int, t: int) -> RelativeCohomology:
    """``Z_{t-p}^{p, n-p} / (B^p K^n + F^t K^n)``."""
    if t < p:
        raise ValueError("need p <= t")
    m = K.dim(n)
    p_c = max(p, 0)
    Z = K._z(n, p_c, t - p_c) if t > p_c else K.filtration_span(n, p_c)
    den = K.boundary_span(n, p_c).hstack(K.filtration_span(n, t))
    pres = SubquotientPresentation(Subquotient(m, Z.hstack(den), den), check=False)
    k = Z.ncols
    reps = Z @ pres.lifts.select_rows(range(k)) if k else IntMatrix.zeros(m, pres.lifts.ncols)
    return RelativeCohomology(n, p, t, pres.group, reps, pres)


def quotient_complex_cohomology(K: FilteredCochainComplex, n: int, p: int, t: int) -> FGAbGroup:
    """``H^n(F^p / F^t)`` straight from the quotient complex (invariant factors)."""

    def coords(k):
        lv = K.levels.get(k, ())
        return [i for i, x in enumerate(lv) if max(p, 0) <= x < t] if lv else []

    def cols(k):
        src, dst = coords(k), coords(k + 1)
        if not src or not dst:
            return [{} for _ in src], len(dst)
        pos = {j: a for a, j in enumerate(dst)}
        M = K.d[k]
        out = []
        for i in src:
            col = {}
            for j in dst:
                v = M.rows[j][i]
                if v:
                    col[pos[j]] = v
            out.append(col)
        return out, len(dst)

    c_out, rows_out = cols(n)
    c_in, rows_in = cols(n - 1)
    r_out, _ = sparse_rank_and_torsion(c_out, rows_out) if c_out else (0, [])
    r_in, t_in = sparse_rank_and_torsion(c_in, rows_in) if c_in else (0, [])
    return FGAbGroup(len(coords(n)) - r_out - r_in, tuple(sorted(t_in)))


def cohomology_of(K: FilteredCochainComplex, n: int) -> FGAbGroup:
    return quotient_complex_cohomology(K, n, 0, K.length)


# ---------------------------------------------------------------------------
# Construction helpers


def adapt_filtration(
    d: dict[int, IntMatrix], filtrations: dict[int, Sequence[IntMatrix]]
) -> tuple[FilteredCochainComplex, dict[int, IntMatrix]]:
    """Change bases so that each filtration becomes a coordinate suffix.

    ``filtrations[n]`` lists spanning matrices of ``F^0 K^n, F^1 K^n, ...``
    (decreasing; ``F^0`` should be everything).  Each ``F^{p+1}`` must be a
    direct summand of ``F^p``.  Returns the adapted complex and, per degree,
    the matrix whose columns are the new basis in old coordinates.
    """
    bases: dict[int, IntMatrix] = {}
    levels: dict[int, list[int]] = {}
    length = max(len(f) for f in filtrations.values())
    for n, chain in filtrations.items():
        m = chain[0].nrows
        cols: list[tuple[int, ...]] = []
        lv: list[int] = []
        inner = IntMatrix.zeros(m, 0)
        for p in range(len(chain) - 1, -1, -1):
            outer = Span(chain[p]).echelon_basis
            inner_basis = Span(inner).echelon_basis if inner.ncols else inner
            if not all(Span(outer).contains(c) for c in inner_basis.columns()):
                raise NotFiltrationPreserving(f"F^{p + 1} K^{n} is not inside F^{p} K^{n}")
            coords = IntMatrix.from_columns(
                [Span(outer).echelon_coords(c) for c in inner_basis.columns()], outer.ncols
            )
            snf = smith_normal_form(coords)
            if any(x not in (0, 1) for x in snf.diagonal):
                raise ValueError(f"F^{p + 1} K^{n} is not a direct summand of F^{p} K^{n}")
            new = outer @ snf.Uinv
            rk = snf.rank
            complement = new.columns()[rk:]
            cols = list(complement) + cols
            lv = [p] * len(complement) + lv
            inner = IntMatrix.from_columns(list(complement) + list(inner_basis.columns()), m) if (complement or inner_basis.ncols) else inner
        if len(cols) != m:
            raise ValueError(f"F^0 K^{n} must be all of K^{n}")
        bases[n] = IntMatrix.from_columns(cols, m)
        levels[n] = lv
    inverses = {n: _unimodular_inverse(P) for n, P in bases.items()}
    nd = {}
    for n, M in d.items():
        if n in bases and n + 1 in bases:
            nd[n] = inverses[n + 1] @ M @ bases[n]
    return FilteredCochainComplex(levels, nd, length=length), bases


def _unimodular_inverse(P: IntMatrix) -> IntMatrix:
    S = Span(P)
    m = P.nrows
    cols = []
    for i in range(m):
        x = S.solve(_unit(m, i))
        if x is None:
            raise ValueError("basis change is not unimodular")
        cols.append(x)
    return IntMatrix.from_columns(cols, P.ncols)


def random_filtered_complex(
    rng: random.Random, max_basis: int = 20, max_length: int = 4, degrees: int = 4
) -> FilteredCochainComplex:
    """A random filtered complex with ``d o d = 0`` built from elementary pieces.

    Pieces are isolated generators and pairs ``x -> k y`` with
    ``level(y) >= level(x)``; the result is conjugated by random unimodular
    filtration-preserving basis changes so the differential is no longer
    block diagonal.
    """
    length = rng.randint(1, max_length)
    total = rng.randint(1, max_basis)
    gens: dict[int, list[int]] = {n: [] for n in range(degrees)}
    arrows: list[tuple[int, int, int, int]] = []  # degree, src slot, dst slot, k
    used = 0
    while used < total:
        n = rng.randrange(degrees)
        if used + 2 <= total and n + 1 < degrees and rng.random() < 0.6:
            a = rng.randrange(length)
            b = rng.randrange(a, length)
            k = rng.choice([1, 1, 2, 3, 4, 6])
            gens[n].append(a)
            gens[n + 1].append(b)
            arrows.append((n, len(gens[n]) - 1, len(gens[n + 1]) - 1, k))
            used += 2
        else:
            gens[n].append(rng.randrange(length))
            used += 1
    order = {n: sorted(range(len(g)), key=lambda i: (g[i], i)) for n, g in gens.items()}
    pos = {n: {old: new for new, old in enumerate(o)} for n, o in order.items()}
    levels = {n: [gens[n][i] for i in order[n]] for n in gens}
    dense = {n: [[0] * len(levels[n]) for _ in range(len(levels.get(n + 1, [])))] for n in range(degrees - 1)}
    for n, i, j, k in arrows:
        dense[n][pos[n + 1][j]][pos[n][i]] = k
    d = {n: IntMatrix(rows, len(levels[n])) for n, rows in dense.items()}
    T = {n: _random_filtered_unimodular(rng, levels[n]) for n in levels}
    nd = {}
    for n, M in d.items():
        Tn, Tn_inv = T[n]
        Tm, _ = T[n + 1]
        nd[n] = Tm @ M @ Tn_inv
    return FilteredCochainComplex(levels, nd, length=length)


def _random_filtered_unimodular(rng: random.Random, levels: Sequence[int]) -> tuple[IntMatrix, IntMatrix]:
    m = len(levels)
    T = [[int(i == j) for j in range(m)] for i in range(m)]
    Tinv = [[int(i == j) for j in range(m)] for i in range(m)]
    for _ in range(2 * m):
        if m < 2:
            break
        i, j = rng.sample(range(m), 2)
        if levels[j] < levels[i]:
            i, j = j, i
        # column op: e_i -> e_i + c e_j keeps F^p stable when level(j) >= level(i)
        c = rng.choice([-2, -1, 1, 2])
        for row in T:
            row[i] += c * row[j]
        # inverse: row op on Tinv, row j -= c row i
        Tinv[j] = [a - c * b for a, b in zip(Tinv[j], Tinv[i])]
    return IntMatrix(T, m), IntMatrix(Tinv, m)
