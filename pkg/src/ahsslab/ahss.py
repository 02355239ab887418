"""The Atiyah-Hirzebruch spectral sequence of a finite cell complex.

The E_1 and E_2 pages come from an honest filtered cochain complex: for each
cyclic summand ``Z/g`` (``g = 0`` for ``Z``) of a coefficient group we build a
free complex with the skeletal filtration whose cohomology is
``H^*(X; Z/g)``:

* ``g = 0``: ``K^n = C^n(X)`` at filtration level ``n`` with ``d = δ``;
* ``g >= 2``: the cone of multiplication by ``g``,
  ``K^n = C^n ⊗ v (level n) ⊕ C^{n+1} ⊗ u (level n+1)`` with
  ``d(b v) = δb v`` and ``d(a u) = δa u + (-1)^{|a|} g a v``.

Its spectral sequence has ``E_1^{p,0} = C^p(X; Z/g)`` and ``d_1 = δ``; the
identification ``Φ`` sends a cochain to its ``v``-coordinates.

Theories with several rows (complex K-theory) reuse the ordinary ``Z``
complex for each row; their higher differentials are page-level rules (for
K-theory ``d_3 = Sq³_ℤ``), and differentials that are not modelled are
reported as honesty flags rather than silently assumed.
"""

from __future__ import annotations

import os
import random
from math import gcd
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

from .abgroup import (
    FGAbGroup,
    IntMatrix,
    NotWellDefined,
    SubquotientPresentation,
    _is_prime,
    hom_homology,
    reduce_matrix,
    sparse_rank_and_torsion,
)
from .complexes import CellComplex, Cochain, SimplicialComplex, _cell_count
from .specseq import INF, FilteredCochainComplex, Page, differential, page

Z = FGAbGroup(1)

#: total cell count up to which the exact presentation engine is used by default
PRESENTATION_LIMIT = 4000


class UnverifiedDifferential(RuntimeError):
    """A result depends on a differential the theory does not model."""


# ---------------------------------------------------------------------------
# Coefficient theories


@dataclass(frozen=True)
class CoefficientTheory:
    """Coefficient groups ``h^q(pt)`` on a window of rows plus a differential rule.

    ``rule`` is ``None`` (ordinary cohomology: one row, no higher
    differentials) or ``"sq3z"`` (complex K-theory: ``Z`` in even rows,
    ``d_3 = Sq³_ℤ``, ``d_r`` for ``r >= 5`` unmodelled).
    """

    name: str
    qmin: int
    qmax: int
    rule: Optional[str] = None
    base: FGAbGroup = Z

    def coefficient(self, q: int) -> FGAbGroup:
        if self.rule == "sq3z":
            return Z if q % 2 == 0 else FGAbGroup()
        return self.base if q == 0 else FGAbGroup()

    @property
    def rows(self) -> list[int]:
        return [q for q in range(self.qmin, self.qmax + 1) if not self.coefficient(q).is_trivial()]

    @property
    def unit(self) -> tuple[int, ...]:
        """Coordinates of ``1`` in ``h^0``."""
        G = self.coefficient(0)
        if G.ngens == 0:
            return ()
        return tuple(1 for _ in G.orders)

    @classmethod
    def ordinary(cls, G: Union[str, FGAbGroup] = "Z") -> "CoefficientTheory":
        G = FGAbGroup.parse(G) if isinstance(G, str) else G
        return cls(f"ordinary:{G}".replace(" ", ""), 0, 0, None, G)

    @classmethod
    def ktheory(cls, dim: int, qmin: Optional[int] = None, qmax: Optional[int] = None) -> "CoefficientTheory":
        lo = -2 * dim if qmin is None else qmin
        hi = 2 if qmax is None else qmax
        if lo > hi:
            raise ValueError("empty q-window")
        return cls("ktheory", lo, hi, "sq3z", Z)

    @classmethod
    def parse(cls, spec: str, dim: int = 0, qmin: Optional[int] = None, qmax: Optional[int] = None) -> "CoefficientTheory":
        """``ordinary:SPEC`` (coefficient grammar of ``FGAbGroup.parse``) or ``ktheory``."""
        spec = spec.strip()
        if spec == "ktheory":
            return cls.ktheory(dim, qmin, qmax)
        if spec.startswith("ordinary:"):
            return cls.ordinary(spec.split(":", 1)[1])
        raise ValueError(f"unknown theory {spec!r}")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "q_window": [self.qmin, self.qmax],
            "rows": {str(q): str(self.coefficient(q)) for q in self.rows},
            "higher_differentials": "d3 = Sq3_Z; d_r (r >= 5) unmodelled" if self.rule == "sq3z" else "none",
        }


# ---------------------------------------------------------------------------
# The filtered complex


def _dense(cols: list[dict[int, int]], nrows: int) -> list[list[int]]:
    rows = [[0] * len(cols) for _ in range(nrows)]
    for j, c in enumerate(cols):
        for i, v in c.items():
            rows[i][j] = v
    return rows


def _cobd_cols(X: CellComplex, n: int) -> list[dict[int, int]]:
    if 0 <= n < X.dim:
        return X.coboundary_columns(n)
    return [{} for _ in range(_cell_count(X, n))]


def filtered_complex(X: CellComplex, order: int = 0) -> FilteredCochainComplex:
    """The skeletally filtered complex computing ``H^*(X; Z/order)`` (``order = 0``: ``Z``)."""
    N = X.dim
    c = lambda n: _cell_count(X, n)  # noqa: E731
    levels: dict[int, tuple[int, ...]] = {}
    d: dict[int, IntMatrix] = {}
    if order == 0:
        for n in range(N + 1):
            levels[n] = (n,) * c(n)
        for n in range(N):
            d[n] = IntMatrix(_dense(_cobd_cols(X, n), c(n + 1)), c(n))
        return FilteredCochainComplex(levels, d, length=N + 1, validate=False)
    for n in range(-1, N + 1):
        levels[n] = (n + 1,) * c(n + 1) if n < 0 else (n,) * c(n) + (n + 1,) * c(n + 1)
    levels = {n: tuple(max(x, 0) for x in lv) for n, lv in levels.items()}
    for n in range(-1, N):
        for_cols = _cone_columns(X, n, order)
        d[n] = IntMatrix(_dense(for_cols, c(n + 1) + c(n + 2)), c(n) + c(n + 1))
    return FilteredCochainComplex(levels, d, length=N + 1, validate=False)


def _cone_columns(X: CellComplex, n: int, order: int) -> list[dict[int, int]]:
    """Sparse columns of the cone differential ``K^n -> K^{n+1}``."""
    c = lambda k: _cell_count(X, k)  # noqa: E731
    cols: list[dict[int, int]] = []
    for col in _cobd_cols(X, n):
        cols.append(dict(col))
    sign = -1 if (n + 1) % 2 else 1
    off = c(n + 1)
    for i, col in enumerate(_cobd_cols(X, n + 1)):
        out = {off + j: v for j, v in col.items()}
        out[i] = sign * order
        cols.append(out)
    return cols


def _cohomology_invariants(X: CellComplex, order: int, p: int) -> FGAbGroup:
    """``H^p(X; Z/order)`` from sparse invariants of the cochain complex itself."""
    if p < 0 or p > X.dim:
        return FGAbGroup()
    if order == 0 or _is_prime(order):
        n = X.ncells(p)
        rk_out, _ = sparse_rank_and_torsion(_cobd_cols(X, p), _cell_count(X, p + 1), order)
        rk_in, tors = sparse_rank_and_torsion(_cobd_cols(X, p - 1), n, order) if p > 0 else (0, ())
        dim = n - rk_out - rk_in
        if order:
            return FGAbGroup(0, (order,) * dim)
        return FGAbGroup(dim, tuple(tors))
    # composite order: H^p(C) ⊗ Z/k ⊕ Tor(H^{p+1}(C), Z/k) from the integral coboundaries
    here, nxt = _cohomology_invariants(X, 0, p), _cohomology_invariants(X, 0, p + 1)
    orders = [order] * here.rank + [gcd(d, order) for d in here.torsion] + [gcd(d, order) for d in nxt.torsion]
    return FGAbGroup.from_orders([o for o in orders if o > 1])


# ---------------------------------------------------------------------------
# Pages of the instance


@dataclass
class E1Data:
    """``E_1^{p,q}`` with the identification ``Φ`` to ``C^p(X; h^q)``."""

    group: FGAbGroup
    orders: tuple[int, ...]
    phi: Callable[[Cochain], tuple[int, ...]]
    phi_inverse: Callable[[Sequence[int]], Cochain]


@dataclass
class Honesty:
    p: int
    q: int
    r: int
    source: str
    target: str
    reason: str

    def to_dict(self) -> dict:
        return {"p": self.p, "q": self.q, "r": self.r, "source": self.source, "target": self.target, "reason": self.reason}


@dataclass
class SurvivalReport:
    """Fate of an E_1 cochain: where it dies, or its E_inf class."""

    p: int
    q: int
    survives: bool
    died_at: Optional[int]
    group: Optional[FGAbGroup]
    coordinates: Optional[tuple[int, ...]]
    representative: Optional[Cochain]
    trace: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "survives": self.survives,
            "died_at": self.died_at,
            "group": None if self.group is None else str(self.group),
            "coordinates": None if self.coordinates is None else list(self.coordinates),
            "trace": self.trace,
        }


@dataclass
class AhssResult:
    """All pages to stabilisation, differentials, E_inf and honesty flags."""

    theory: CoefficientTheory
    pages: dict[tuple[int, int, object], FGAbGroup]
    differentials: dict[tuple[int, int, int], IntMatrix]
    einf: dict[tuple[int, int], FGAbGroup]
    flags: list[Honesty]
    notes: list[str]
    method: str

    def graded(self, n: int) -> list[tuple[int, FGAbGroup]]:
        """``E_inf^{p, n-p}`` for each ``p``: the associated graded of ``h^n``."""
        return [(p, g) for (p, q), g in sorted(self.einf.items()) if p + q == n]

    def graded_order(self, n: int, reduced: bool = False) -> Optional[int]:
        """Product of the orders of the graded pieces (``None`` if infinite)."""
        out = 1
        for p, g in self.graded(n):
            if reduced and p == 0:
                continue
            if g.order is None:
                return None
            out *= g.order
        return out

    def total_degrees(self) -> list[int]:
        return sorted({p + q for p, q in self.einf})


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("AHSSLAB_THREADS", "1")))
    except ValueError:
        return 1


class AhssInstance:
    """The spectral sequence of ``X`` for ``theory``.

    ``method`` is ``"presentation"`` (exact subquotient engine, with
    representatives), ``"invariants"`` (groups only, from sparse invariant
    factors) or ``"auto"`` (presentation when the complex has at most
    ``PRESENTATION_LIMIT`` cells).
    """

    def __init__(self, X: CellComplex, theory: CoefficientTheory, method: str = "auto"):
        self.X = X
        self.theory = theory
        total = sum(_cell_count(X, k) for k in range(X.dim + 1))
        if method == "auto":
            method = "presentation" if total <= PRESENTATION_LIMIT else "invariants"
        if method not in ("presentation", "invariants"):
            raise ValueError(f"unknown method {method!r}")
        self.method = method
        self._complexes: dict[int, FilteredCochainComplex] = {}
        self._d3: dict[int, IntMatrix] = {}
        #: per source column p, the generators on which Sq3_Z was evaluated
        self.d3_evaluations: dict[int, list[dict]] = {}

    # -- filtered complexes -------------------------------------------------

    def complex_for(self, order: int) -> FilteredCochainComplex:
        K = self._complexes.get(order)
        if K is None:
            K = filtered_complex(self.X, order)
            # idempotent insertion; a concurrent duplicate build is harmless
            self._complexes.setdefault(order, K)
            K = self._complexes[order]
        return K

    def _orders(self, q: int) -> tuple[int, ...]:
        return self.theory.coefficient(q).orders

    def _summand_pages(self, p: int, q: int, r) -> list[tuple[int, Page]]:
        rr = r if r == 1 else 2 if self.theory.rule == "sq3z" and r in (2, 3) else r
        return [(g, page(self.complex_for(g), p, 0, rr)) for g in self._orders(q)]

    # -- E_1 -----------------------------------------------------------------

    def e1(self, p: int, q: int) -> E1Data:
        """``E_1^{p,q}`` and ``Φ: C^p(X; h^q) -> E_1^{p,q}``."""
        G = self.theory.coefficient(q)
        n = _cell_count(self.X, p)
        if G.is_trivial() or n == 0:
            zero = FGAbGroup()
            return E1Data(zero, (), lambda c: (), lambda y: Cochain.zero(self.X, p, G))
        if self.method == "invariants":
            orders = tuple(g for _ in range(n) for g in G.orders)
            return E1Data(
                FGAbGroup.from_orders(orders), orders,
                lambda c: tuple(a for v in c.values for a in v),
                lambda y: Cochain(self.X, p, G, tuple(tuple(y[i * G.ngens:(i + 1) * G.ngens]) for i in range(n))),
            )
        parts = self._summand_pages(p, q, 1)
        orders = tuple(o for _, pg in parts for o in pg.group.orders)
        X = self.X

        def phi(c: Cochain) -> tuple[int, ...]:
            if c.complex is not X or c.degree != p or c.coefficients != G:
                raise ValueError("cochain outside C^p(X; h^q)")
            out: tuple[int, ...] = ()
            for j, (g, pg) in enumerate(parts):
                comp = c.component(j)
                m = pg.subquotient.ambient_rank
                vec = tuple(comp) + (0,) * (m - len(comp))
                out += pg.coordinates(vec)
            return out

        def phi_inverse(y: Sequence[int]) -> Cochain:
            vals = [[0] * G.ngens for _ in range(n)]
            pos = 0
            for j, (g, pg) in enumerate(parts):
                k = pg.group.ngens
                vec = pg.presentation.element(tuple(y[pos:pos + k]))
                pos += k
                for i in range(n):
                    vals[i][j] = vec[i]
            return Cochain(X, p, G, tuple(map(tuple, vals)))

        return E1Data(FGAbGroup.from_orders(orders), orders, phi, phi_inverse)

    def d1(self, p: int, q: int) -> list[IntMatrix]:
        """``d_1`` in cochain coordinates, one matrix per cyclic summand of ``h^q``.

        Entries are reduced into ``[0, g)`` for a ``Z/g`` summand.
        """
        G = self.theory.coefficient(q)
        src, dst = _cell_count(self.X, p), _cell_count(self.X, p + 1)
        if G.is_trivial():
            return []
        if self.method == "invariants":
            cols = _cobd_cols(self.X, p)
            return [_reduce_entries(IntMatrix(_dense(cols, dst), src), g) for g in G.orders]
        E_src, E_dst = self.e1(p, q), self.e1(p + 1, q)
        out = []
        for j, g in enumerate(G.orders):
            K = self.complex_for(g)
            D = differential(K, p, 0, 1) if src and dst else None
            cols = []
            for i in range(src):
                unit = [[0] * G.ngens for _ in range(src)]
                unit[i][j] = 1
                y = E_src.phi(Cochain(self.X, p, G, tuple(map(tuple, unit))))
                if D is None:
                    cols.append([0] * dst)
                    continue
                z = _block_apply(D, y, self._offsets(p, q), self._offsets(p + 1, q), j)
                full = [0] * len(E_dst.orders)
                lo = self._offsets(p + 1, q)[j]
                full[lo:lo + len(z)] = z
                c = E_dst.phi_inverse(full)
                cols.append(list(c.component(j)))
            out.append(_reduce_entries(IntMatrix.from_columns(cols, dst), g))
        return out

    def _offsets(self, p: int, q: int) -> list[int]:
        offs, acc = [], 0
        for _, pg in self._summand_pages(p, q, 1):
            offs.append(acc)
            acc += pg.group.ngens
        return offs

    # -- E_2 and beyond ----------------------------------------------------------

    def e2(self, p: int, q: int) -> FGAbGroup:
        """``E_2^{p,q} = H^p(X; h^q)``."""
        G = self.theory.coefficient(q)
        if G.is_trivial() or p < 0 or p > self.X.dim:
            return FGAbGroup()
        if self.method == "invariants":
            orders: list[int] = []
            for g in G.orders:
                orders += _cohomology_invariants(self.X, g, p).orders
            return FGAbGroup.from_orders(orders)
        return FGAbGroup.from_orders([o for _, pg in self._summand_pages(p, q, 2) for o in pg.group.orders])

    def e2_page(self, p: int, q: int) -> Optional[Page]:
        """The engine page of a single-summand row (``None`` if not available)."""
        if self.method != "presentation" or len(self._orders(q)) != 1:
            return None
        return self._summand_pages(p, q, 2)[0][1]

    def d3(self, p: int) -> IntMatrix:
        """K-theory ``d_3 = Sq³_ℤ : E_3^{p,q} -> E_3^{p+3,q-2}`` on E_2 generators (same for every even q)."""
        if p in self._d3:
            return self._d3[p]
        from .steenrod import sq3z

        src = self.e2_page(p, 0)
        dst = self.e2_page(p + 3, 0) if p + 3 <= self.X.dim else None
        ns = 0 if src is None else src.group.ngens
        nt = 0 if dst is None else dst.group.ngens
        if ns == 0:
            M = IntMatrix.zeros(nt, ns)
            self._d3[p] = M
            return M
        if not isinstance(self.X, SimplicialComplex):
            if nt == 0:
                M = IntMatrix.zeros(0, ns)
                self._d3[p] = M
                return M
            raise NotImplementedError("d3 needs an ordered simplicial complex")
        X = self.X
        cols = []
        rng = random.Random(p)
        evals = []
        for k, (z, order) in enumerate(zip(src.representatives.columns(), src.group.orders)):
            # the composite is evaluated on every generator, even into a zero group
            out = sq3z(Cochain.from_integers(X, p, z)).cochain
            evals.append({"generator": k, "cochain_zero": out.is_zero()})
            if dst is None or nt == 0:
                cols.append(())
                continue
            img = dst.coordinates(_vec(out))
            # well-definedness on classes: a coboundary perturbation and the torsion relation
            e = Cochain.from_integers(X, p - 1, [rng.randint(-2, 2) for _ in range(X.ncells(p - 1))]) if p > 0 else None
            if e is not None:
                z2 = tuple(a + b for a, b in zip(z, _vec(e.coboundary())))
                alt = dst.coordinates(_vec(sq3z(Cochain.from_integers(X, p, z2)).cochain))
                if dst.group.reduce(alt) != dst.group.reduce(img):
                    raise NotWellDefined(f"Sq3_Z changes under a coboundary at p={p}")
            if order:
                tz = tuple(order * a for a in z)
                rel = dst.coordinates(_vec(sq3z(Cochain.from_integers(X, p, tz)).cochain))
                if any(dst.group.reduce(rel)):
                    raise NotWellDefined(f"Sq3_Z does not respect the order of generator {k} at p={p}")
            cols.append(dst.group.reduce(img))
        self.d3_evaluations[p] = evals
        M = IntMatrix.from_columns(cols, nt)
        self._d3[p] = M
        return M

    def e4_presentation(self, p: int) -> SubquotientPresentation:
        """``E_4^{p,q} = ker d_3 / im d_3`` in E_2 generator coordinates (any even q)."""
        mid = self.e2(p, 0)
        src = self.e2(p - 3, 0)
        dst = self.e2(p + 3, 0)
        d_in = self.d3(p - 3) if p - 3 >= 0 else IntMatrix.zeros(mid.ngens, 0)
        d_out = self.d3(p)
        return hom_homology(src, mid, dst, d_in, d_out)

    # -- survivors --------------------------------------------------------------

    def survivor_class(self, p: int, q: int, c: Cochain, flags: Optional[list[Honesty]] = None) -> SurvivalReport:
        """Follow an E_1 cochain through every implemented differential.

        Returns where it dies, or its E_inf class with a representative.
        Raises ``UnverifiedDifferential`` if the answer depends on a flagged
        differential.
        """
        if self.method != "presentation":
            raise ValueError("survivor classes need the presentation method")
        G = self.theory.coefficient(q)
        trace: list[dict] = []
        if G.is_trivial():
            return SurvivalReport(p, q, True, None, FGAbGroup(), (), c, [{"r": 1, "status": "zero group"}])
        E1 = self.e1(p, q)
        y = E1.phi(c)
        parts = self._summand_pages(p, q, 1)
        offs = self._offsets(p, q)
        # walk the engine pages of every summand complex
        coords: tuple[int, ...] = ()
        reps = []
        for j, (g, pg1) in enumerate(parts):
            K = self.complex_for(g)
            v = pg1.presentation.element(tuple(y[offs[j]:offs[j] + pg1.group.ngens]))
            for r in range(1, K.length + 1):
                pg = page(K, p, 0, r)
                tgt = page(K, p + r, 1 - r, r)
                if not tgt.group.ngens:
                    continue
                img = differential(K, p, 0, r).apply(pg.coordinates(v))
                if any(tgt.group.reduce(img)):
                    trace.append({"r": r, "summand": g, "status": "d_r nonzero"})
                    return SurvivalReport(p, q, False, r, None, None, None, trace)
            fin = page(K, p, 0, INF)
            from .specseq import survivors

            sv = survivors(K, p, 0)
            z = sv.lift_to_cocycle(v)
            if z is None:
                raise AssertionError("engine survivor lost its cocycle lift")
            coords += fin.coordinates(z)
            reps.append(z)
            trace.append({"r": "1..%d" % K.length, "summand": g, "status": "all engine differentials vanish"})
        rep = Cochain(self.X, p, G, tuple(tuple(z[i] for z in reps) for i in range(_cell_count(self.X, p))))
        if self.theory.rule != "sq3z":
            return SurvivalReport(p, q, True, None, self.e2(p, q), coords, rep, trace)
        # K-theory: d_3 rule, then honesty flags for d_{r >= 5}
        d3 = self.d3(p)
        dst = self.e2(p + 3, 0)
        if dst.ngens and any(dst.reduce(d3.apply(coords))):
            trace.append({"r": 3, "status": "Sq3_Z nonzero"})
            return SurvivalReport(p, q, False, 3, None, None, None, trace)
        trace.append({"r": 3, "status": "Sq3_Z vanishes"})
        E4 = self.e4_presentation(p)
        c4 = E4.coordinates(coords)
        flags = self.honesty_flags() if flags is None else flags
        if any(c4):
            for f in flags:
                if (f.p, f.q) == (p, q) or (f.p + f.r, f.q - f.r + 1) == (p, q):
                    raise UnverifiedDifferential(
                        f"class at ({p},{q}) depends on unmodelled d_{f.r} at ({f.p},{f.q})"
                    )
        trace.append({"r": ">=5", "status": "no unmodelled differential touches this cell"})
        return SurvivalReport(p, q, True, None, E4.group, c4, rep, trace)

    # -- run ----------------------------------------------------------------------

    def honesty_flags(self) -> list[Honesty]:
        if self.theory.rule != "sq3z":
            return []
        out = []
        n = self.X.dim
        e4 = {p: self._e4_group(p) for p in range(n + 1)}
        for p in range(n + 1):
            for q in self.theory.rows:
                for r in range(5, n + 2, 2):
                    t = p + r
                    if t > n:
                        continue
                    if not e4[p].is_trivial() and not e4[t].is_trivial():
                        out.append(Honesty(p, q, r, str(e4[p]), str(e4[t]), "unmodelled differential; results valid only if it vanishes"))
        if not isinstance(self.X, SimplicialComplex):
            for p in range(n + 1):
                if p + 3 <= n and not self.e2(p, 0).is_trivial() and not self.e2(p + 3, 0).is_trivial():
                    for q in self.theory.rows:
                        out.append(Honesty(p, q, 3, str(self.e2(p, 0)), str(self.e2(p + 3, 0)), "d3 rule needs a simplicial complex"))
        return out

    def _e4_group(self, p: int) -> FGAbGroup:
        if self.method != "presentation":
            return self.e2(p, 0)
        try:
            return self.e4_presentation(p).group
        except NotImplementedError:
            return self.e2(p, 0)

    def run(self) -> AhssResult:
        X, T = self.X, self.theory
        n = X.dim
        pages: dict = {}
        diffs: dict = {}
        notes: list[str] = []
        rows = T.rows
        cells = [(p, q) for q in rows for p in range(n + 1)]

        def e12(cell):
            p, q = cell
            return cell, self.e1(p, q).group, self.e2(p, q)

        workers = _threads()
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(e12, cells))
        else:
            results = [e12(c) for c in cells]
        for (p, q), g1, g2 in results:
            pages[(p, q, 1)] = g1
            pages[(p, q, 2)] = g2
        einf: dict = {}
        flags: list[Honesty] = []
        if T.rule is None:
            notes.append("single nonzero row: d_r = 0 for r >= 2 by degree, E_2 = E_inf")
            for p in range(n + 1):
                g = pages[(p, 0, 2)]
                if self.method == "presentation":
                    # the engine's own E_inf must agree with the structural collapse
                    orders = [o for gg in T.base.orders for o in page(self.complex_for(gg), p, 0, INF).group.orders]
                    if FGAbGroup.from_orders(orders) != g:
                        raise AssertionError(f"engine E_inf differs from E_2 at p={p}")
                einf[(p, 0)] = g
        else:
            notes.append("K-theory: d_r = 0 for even r by parity; E_3 = E_2")
            for (p, q), g1, g2 in results:
                pages[(p, q, 3)] = g2
            for p in range(n + 1):
                if self.method == "presentation":
                    try:
                        M = self.d3(p)
                    except NotImplementedError:
                        M = None
                    if M is not None and M.ncols:
                        for q in rows:
                            diffs[(p, q, 3)] = M
            if self.method != "presentation":
                notes.append("d3 not evaluated with the invariants method")
                for p in range(n + 1):
                    if p + 3 <= n and not self.e2(p, 0).is_trivial() and not self.e2(p + 3, 0).is_trivial():
                        for q in rows:
                            flags.append(Honesty(p, q, 3, str(self.e2(p, 0)), str(self.e2(p + 3, 0)), "d3 not evaluated (invariants method)"))
            e4 = {p: self._e4_group(p) for p in range(n + 1)}
            for (p, q), _, _ in results:
                pages[(p, q, 4)] = e4[p]
                einf[(p, q)] = e4[p]
            flags += self.honesty_flags()
            notes.append("d_r for r >= 5 assumed zero; see flags")
        for (p, q), g in einf.items():
            pages[(p, q, "inf")] = g
        return AhssResult(T, pages, diffs, einf, flags, notes, self.method)


def _vec(c: Cochain) -> tuple[int, ...]:
    return c.component(0)


def _reduce_entries(M: IntMatrix, g: int) -> IntMatrix:
    if not g:
        return M
    return IntMatrix([[v % g for v in row] for row in M.rows], M.ncols)


def _block_apply(D: IntMatrix, y: Sequence[int], src_offs: list[int], dst_offs: list[int], j: int) -> list[int]:
    # the summand complexes are independent, so d_1 is block diagonal
    lo = src_offs[j]
    hi = src_offs[j + 1] if j + 1 < len(src_offs) else len(y)
    return list(D.apply(tuple(y[lo:hi])))


def run(instance: AhssInstance) -> AhssResult:
    return instance.run()


def survivor_class(instance: AhssInstance, p: int, q: int, c: Cochain) -> SurvivalReport:
    return instance.survivor_class(p, q, c)
