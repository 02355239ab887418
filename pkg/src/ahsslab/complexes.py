"""Simplicial complexes, cochains and the dual block decomposition.

Cell complexes here are described by sparse boundary columns: for each
dimension ``k`` a list of ``{face_index: incidence}`` dicts, one per k-cell.
``SimplicialComplex`` and ``DualComplex`` both expose that interface, so the
cohomology routines and the spectral sequence code treat them alike.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Optional, Sequence, Union

from .abgroup import (
    FGAbGroup,
    IntMatrix,
    Subquotient,
    SubquotientPresentation,
    kernel_basis,
    preimage,
    sparse_rank_and_torsion,
)
from math import gcd


class NotAManifold(ValueError):
    """The complex fails a closed-manifold check."""


class NotPseudoManifold(NotAManifold):
    """Some codimension-one simplex does not have exactly two cofaces."""


Simplex = tuple[int, ...]


# ---------------------------------------------------------------------------
# Generic cell complexes


class CellComplex:
    """Base class: subclasses provide ``dim``, ``ncells`` and ``boundary_columns``."""

    dim: int

    def ncells(self, k: int) -> int:
        raise NotImplementedError

    def boundary_columns(self, k: int) -> list[dict[int, int]]:
        """Column ``j`` lists the (k-1)-cells in the boundary of k-cell ``j``."""
        raise NotImplementedError

    @property
    def cell_counts(self) -> tuple[int, ...]:
        return tuple(self.ncells(k) for k in range(self.dim + 1))

    def coboundary_columns(self, k: int) -> list[dict[int, int]]:
        """Sparse columns of ``delta^k : C^k -> C^{k+1}``."""
        cols: list[dict[int, int]] = [{} for _ in range(self.ncells(k))]
        if 0 <= k < self.dim:
            for j, col in enumerate(self.boundary_columns(k + 1)):
                for i, v in col.items():
                    cols[i][j] = v
        return cols

    def boundary_matrix(self, k: int) -> IntMatrix:
        rows = self.ncells(k - 1)
        cols = self.boundary_columns(k) if 0 <= k <= self.dim else []
        out = [[0] * len(cols) for _ in range(rows)]
        for j, c in enumerate(cols):
            for i, v in c.items():
                out[i][j] = v
        return IntMatrix(out, len(cols))

    def coboundary_matrix(self, k: int) -> IntMatrix:
        """Dense ``delta^k``, the transpose of ``boundary_matrix(k + 1)``."""
        return self.boundary_matrix(k + 1).T if self.ncells(k + 1) else IntMatrix.zeros(0, self.ncells(k))

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * self.ncells(k) for k in range(self.dim + 1))

    def _boundary_invariants(self, k: int) -> tuple[int, tuple[int, ...]]:
        cache = self.__dict__.setdefault("_binv_cache", {})
        if k not in cache:
            if k <= 0 or k > self.dim:
                cache[k] = (0, ())
            else:
                r, t = sparse_rank_and_torsion(self.boundary_columns(k), self.ncells(k - 1))
                cache[k] = (r, tuple(sorted(t)))
        return cache[k]


def _cell_count(X: CellComplex, k: int) -> int:
    return X.ncells(k) if 0 <= k <= X.dim else 0


# ---------------------------------------------------------------------------
# Simplicial complexes


class SimplicialComplex(CellComplex):
    """An ordered simplicial complex.

    Vertices are numbered ``0..nv-1`` following the global vertex order; a
    simplex is the increasing tuple of its vertex numbers and is oriented by
    that order.  Simplices of each dimension are sorted lexicographically,
    and a simplex's position in that list is its cell index.
    """

    def __init__(self, labels: Sequence[str], simplices: Iterable[Simplex], closed: bool = False):
        self.labels = tuple(str(v) for v in labels)
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("vertex labels must be unique")
        nv = len(self.labels)
        by_dim: dict[int, set] = {}
        for s in simplices:
            s = tuple(sorted(int(v) for v in s))
            if len(set(s)) != len(s) or not s:
                raise ValueError(f"degenerate simplex {s}")
            if s[0] < 0 or s[-1] >= nv:
                raise ValueError(f"simplex {s} references an unknown vertex")
            by_dim.setdefault(len(s) - 1, set()).add(s)
        if not closed:
            top = max(by_dim, default=-1)
            for k in range(top, 0, -1):
                faces = by_dim.setdefault(k - 1, set())
                for s in by_dim.get(k, ()):
                    for i in range(len(s)):
                        faces.add(s[:i] + s[i + 1 :])
        by_dim.setdefault(0, set()).update((v,) for v in range(nv))
        self.dim = max((k for k, v in by_dim.items() if v), default=-1) if nv else -1
        self._simplices = [tuple(sorted(by_dim.get(k, ()))) for k in range(self.dim + 1)]
        self._index: list[Optional[dict[Simplex, int]]] = [None] * (self.dim + 1)
        self._bcols: dict[int, list[dict[int, int]]] = {}

    @classmethod
    def from_facets(
        cls,
        facets: Iterable[Sequence],
        vertices: Optional[Sequence] = None,
        order: Optional[Sequence] = None,
    ) -> "SimplicialComplex":
        """Build from top simplices given by vertex labels.

        The global vertex order is lexicographic on the string labels unless
        ``order`` lists the labels explicitly.

        >>> X = SimplicialComplex.from_facets([["a", "b", "c"]])
        >>> X.cell_counts
        (3, 3, 1)
        """
        facets = [[str(v) for v in f] for f in facets]
        labels = set(str(v) for v in vertices) if vertices is not None else set()
        for f in facets:
            labels.update(f)
        if vertices is not None:
            extra = labels - set(str(v) for v in vertices)
            if extra:
                raise ValueError(f"simplices reference undeclared vertices {sorted(extra)}")
        if order is not None:
            ordered = [str(v) for v in order]
            if set(ordered) != labels or len(ordered) != len(labels):
                raise ValueError("explicit vertex order must list every vertex exactly once")
        else:
            ordered = sorted(labels)
        pos = {v: i for i, v in enumerate(ordered)}
        return cls(ordered, [tuple(pos[v] for v in f) for f in facets])

    @property
    def nvertices(self) -> int:
        return len(self.labels)

    def ncells(self, k: int) -> int:
        return len(self._simplices[k]) if 0 <= k <= self.dim else 0

    def simplices(self, k: int) -> tuple[Simplex, ...]:
        return self._simplices[k] if 0 <= k <= self.dim else ()

    def index(self, s: Simplex, k: Optional[int] = None) -> int:
        k = len(s) - 1 if k is None else k
        if self._index[k] is None:
            self._index[k] = {t: i for i, t in enumerate(self._simplices[k])}
        return self._index[k][s]

    def __contains__(self, s) -> bool:
        s = tuple(s)
        k = len(s) - 1
        if not 0 <= k <= self.dim:
            return False
        try:
            self.index(s, k)
            return True
        except KeyError:
            return False

    def simplex_labels(self, s: Simplex) -> tuple[str, ...]:
        return tuple(self.labels[v] for v in s)

    def facets(self) -> list[Simplex]:
        """Simplices that are not a face of another simplex."""
        out = []
        for k in range(self.dim + 1):
            covered = set()
            for s in self.simplices(k + 1):
                for i in range(len(s)):
                    covered.add(s[:i] + s[i + 1 :])
            out += [s for s in self.simplices(k) if s not in covered]
        return out

    def is_pure(self) -> bool:
        return all(len(f) == self.dim + 1 for f in self.facets())

    def boundary_columns(self, k: int) -> list[dict[int, int]]:
        if k <= 0 or k > self.dim:
            return [{} for _ in range(self.ncells(k))]
        if k not in self._bcols:
            idx = self.index
            cols = []
            for s in self._simplices[k]:
                col = {}
                for i in range(k + 1):
                    col[idx(s[:i] + s[i + 1 :], k - 1)] = -1 if i % 2 else 1
                cols.append(col)
            self._bcols[k] = cols
        return self._bcols[k]

    def cofaces(self, k: int) -> list[list[int]]:
        """For each k-simplex, indices of the (k+1)-simplices containing it."""
        out: list[list[int]] = [[] for _ in range(self.ncells(k))]
        for j, col in enumerate(self.boundary_columns(k + 1)):
            for i in col:
                out[i].append(j)
        return out

    def link(self, s: Simplex) -> "SimplicialComplex":
        """Link of ``s``, with the same vertex labels (isolated vertices dropped)."""
        s = tuple(s)
        ss = set(s)
        k = len(s)
        faces = []
        for m in range(k, self.dim + 1):
            for t in self.simplices(m):
                if ss.issubset(t):
                    rest = tuple(v for v in t if v not in ss)
                    if rest:
                        faces.append(rest)
        used = sorted({v for f in faces for v in f})
        pos = {v: i for i, v in enumerate(used)}
        return SimplicialComplex(
            [self.labels[v] for v in used], [tuple(pos[v] for v in f) for f in faces]
        )

    def skeleton(self, p: int) -> "SimplicialComplex":
        simp = [s for k in range(min(p, self.dim) + 1) for s in self.simplices(k)]
        return SimplicialComplex(self.labels, simp, closed=True)

    def subcomplex(self, simplices: Iterable[Sequence], by_label: bool = False) -> "Subcomplex":
        return Subcomplex(self, simplices, by_label=by_label)


class Subcomplex:
    """A subcomplex of ``parent`` given by some of its simplices.

    ``complex`` is the subcomplex as a ``SimplicialComplex`` on the vertices it
    uses, with the parent's relative vertex order, so orientations agree.
    ``embedding[k][i]`` is the parent index of the subcomplex's k-simplex ``i``.
    """

    def __init__(self, parent: SimplicialComplex, simplices: Iterable[Sequence], by_label: bool = False, close: bool = False):
        self.parent = parent
        pos = {v: i for i, v in enumerate(parent.labels)}
        raw = []
        for s in simplices:
            if by_label:
                try:
                    t = tuple(sorted(pos[str(v)] for v in s))
                except KeyError as exc:
                    raise NotRestrictedTriangulation(f"unknown vertex {exc.args[0]!r}") from None
            else:
                t = tuple(sorted(int(v) for v in s))
            if t not in parent:
                raise NotRestrictedTriangulation(
                    f"{parent.simplex_labels(t) if max(t) < parent.nvertices else t} is not a simplex of the parent"
                )
            raw.append(t)
        given = set(raw)
        closure = set()
        for t in given:
            for m in range(1, len(t) + 1):
                closure.update(combinations(t, m))
        if not close and closure != given:
            missing = sorted(closure - given)[0]
            raise NotRestrictedTriangulation(
                f"not closed under faces: missing {parent.simplex_labels(missing)}"
            )
        used = sorted({v for t in closure for v in t})
        local = {v: i for i, v in enumerate(used)}
        self.vertex_map = tuple(used)
        self.complex = SimplicialComplex(
            [parent.labels[v] for v in used], [tuple(local[v] for v in t) for t in closure], closed=True
        )
        self.embedding = tuple(
            tuple(parent.index(tuple(used[v] for v in s)) for s in self.complex.simplices(k))
            for k in range(self.complex.dim + 1)
        )

    @property
    def dim(self) -> int:
        return self.complex.dim

    def parent_simplices(self, k: int) -> list[Simplex]:
        return [tuple(self.vertex_map[v] for v in s) for s in self.complex.simplices(k)]

    def contains_parent_cell(self, k: int, i: int) -> bool:
        return 0 <= k <= self.dim and i in set(self.embedding[k])


class NotRestrictedTriangulation(ValueError):
    """A would-be subcomplex is not a union of simplices closed under faces."""


# ---------------------------------------------------------------------------
# Cochains


@dataclass(frozen=True)
class Cochain:
    """A G-valued cochain: one coordinate tuple (in G's generators) per cell."""

    complex: CellComplex
    degree: int
    coefficients: FGAbGroup
    values: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.values) != _cell_count(self.complex, self.degree):
            raise ValueError("one value per cell required")
        G = self.coefficients
        object.__setattr__(self, "values", tuple(G.reduce(tuple(v)) for v in self.values))

    @classmethod
    def zero(cls, X: CellComplex, degree: int, G: FGAbGroup) -> "Cochain":
        return cls(X, degree, G, ((0,) * G.ngens,) * _cell_count(X, degree))

    @classmethod
    def from_integers(cls, X: CellComplex, degree: int, values: Sequence[int], G: Optional[FGAbGroup] = None) -> "Cochain":
        """Cochain with coefficients in a cyclic group from one integer per cell."""
        G = FGAbGroup(1) if G is None else G
        if G.ngens != 1:
            raise ValueError("integer values need a cyclic coefficient group")
        return cls(X, degree, G, tuple((int(v),) for v in values))

    def component(self, j: int = 0) -> tuple[int, ...]:
        return tuple(v[j] for v in self.values)

    def is_zero(self) -> bool:
        return not any(any(v) for v in self.values)

    def support(self) -> list[int]:
        return [i for i, v in enumerate(self.values) if any(v)]

    def __add__(self, other: "Cochain") -> "Cochain":
        self._check(other)
        return Cochain(
            self.complex, self.degree, self.coefficients,
            tuple(tuple(a + b for a, b in zip(u, v)) for u, v in zip(self.values, other.values)),
        )

    def __neg__(self) -> "Cochain":
        return Cochain(self.complex, self.degree, self.coefficients, tuple(tuple(-a for a in u) for u in self.values))

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self + (-other)

    def scale(self, k: int) -> "Cochain":
        return Cochain(self.complex, self.degree, self.coefficients, tuple(tuple(k * a for a in u) for u in self.values))

    def _check(self, other: "Cochain") -> None:
        if other.complex is not self.complex or other.degree != self.degree or other.coefficients != self.coefficients:
            raise ValueError("cochains live in different groups")

    def coboundary(self) -> "Cochain":
        X = self.complex
        out = [[0] * self.coefficients.ngens for _ in range(_cell_count(X, self.degree + 1))]
        if 0 <= self.degree < X.dim:
            for j, col in enumerate(X.boundary_columns(self.degree + 1)):
                acc = out[j]
                for i, s in col.items():
                    for t, a in enumerate(self.values[i]):
                        if a:
                            acc[t] += s * a
        return Cochain(X, self.degree + 1, self.coefficients, tuple(map(tuple, out)))

    def is_cocycle(self) -> bool:
        return self.coboundary().is_zero()

    def evaluate(self, chain: Sequence[int]) -> tuple[int, ...]:
        """Pairing with an integral chain given by one coefficient per cell."""
        acc = [0] * self.coefficients.ngens
        for c, v in zip(chain, self.values):
            if c:
                for t, a in enumerate(v):
                    acc[t] += c * a
        return self.coefficients.reduce(acc)


def restrict_cochain(c: Cochain, target: Union[int, "Subcomplex", Iterable[int]]) -> Cochain:
    """Restrict a cochain to a skeleton, a subcomplex, or a set of cells.

    An ``int`` target means the skeleton of that dimension; a cochain of
    higher degree restricts into the zero group.  A ``Subcomplex`` yields a
    cochain on ``target.complex``.  A collection of cell indices keeps the
    values on those cells and zeroes the rest.
    """
    G = c.coefficients
    if isinstance(target, int):
        if c.degree > target:
            return Cochain(_EmptyDegree(c.complex, c.degree), c.degree, G, ())
        return c
    if isinstance(target, Subcomplex):
        if target.parent is not c.complex:
            raise ValueError("subcomplex of a different complex")
        k = c.degree
        if k > target.dim:
            return Cochain(_EmptyDegree(target.complex, k), k, G, ())
        return Cochain(target.complex, k, G, tuple(c.values[i] for i in target.embedding[k]))
    keep = set(target)
    zero = (0,) * G.ngens
    return Cochain(c.complex, c.degree, G, tuple(v if i in keep else zero for i, v in enumerate(c.values)))


class _EmptyDegree(CellComplex):
    # stands in for a skeleton that has no cells in the requested degree
    def __init__(self, base: CellComplex, degree: int):
        self.base = base
        self.dim = base.dim
        self._degree = degree

    def ncells(self, k: int) -> int:
        return 0 if k == self._degree else self.base.ncells(k)

    def boundary_columns(self, k: int):
        return [{} for _ in range(self.ncells(k))]


# ---------------------------------------------------------------------------
# Cohomology: invariant-factor route


def homology(X: CellComplex, p: int) -> FGAbGroup:
    """Integral homology from the invariant factors of the boundary maps."""
    if p < 0 or p > X.dim:
        return FGAbGroup()
    rk_p, _ = X._boundary_invariants(p)
    rk_next, tors_next = X._boundary_invariants(p + 1)
    return FGAbGroup(X.ncells(p) - rk_p - rk_next, tuple(tors_next))


def _hom_ext(H: FGAbGroup, Hprev: FGAbGroup, G: FGAbGroup) -> FGAbGroup:
    orders: list[int] = []
    for g in G.orders:
        # Hom(H, Z/g or Z)
        orders += [g] * H.rank
        if g:
            orders += [gcd(d, g) for d in H.torsion]
        # Ext(Hprev, Z/g or Z)
        orders += [gcd(d, g) if g else d for d in Hprev.torsion]
    return FGAbGroup.from_orders([o for o in orders if o != 1])


def cohomology(X: CellComplex, G: FGAbGroup, p: int) -> FGAbGroup:
    """``H^p(X; G)`` via invariant factors and universal coefficients.

    >>> from ahsslab.data import load_complex
    >>> str(cohomology(load_complex("rp2"), FGAbGroup(1), 2))
    'Z/2'
    """
    if p < 0 or p > X.dim:
        return FGAbGroup()
    return _hom_ext(homology(X, p), homology(X, p - 1), G)


def homology_with(X: CellComplex, G: FGAbGroup, p: int) -> FGAbGroup:
    """``H_p(X; G)`` via universal coefficients (tensor and Tor)."""
    if p < 0 or p > X.dim:
        return FGAbGroup()
    H, Hprev = homology(X, p), homology(X, p - 1)
    orders: list[int] = []
    for g in G.orders:
        orders += [g] * H.rank
        orders += [gcd(d, g) if g else d for d in H.torsion]
        if g:
            orders += [gcd(d, g) for d in Hprev.torsion]
    return FGAbGroup.from_orders([o for o in orders if o != 1])


def betti_numbers(X: CellComplex) -> tuple[int, ...]:
    return tuple(homology(X, p).rank for p in range(X.dim + 1))


# ---------------------------------------------------------------------------
# Cohomology with representatives


def _sparse_to_dense(cols: list[dict[int, int]], nrows: int) -> IntMatrix:
    out = [[0] * len(cols) for _ in range(nrows)]
    for j, c in enumerate(cols):
        for i, v in c.items():
            out[i][j] = v
    return IntMatrix(out, len(cols))


def _cyclic_subquotient(d_out: IntMatrix, d_in: IntMatrix, g: int) -> SubquotientPresentation:
    """``ker(d_out) / im(d_in)`` on ``Z/g``-valued (``Z`` if ``g == 0``) vectors."""
    m = d_out.ncols
    if g:
        rel_out = IntMatrix.identity(d_out.nrows).scale(g)
        num = preimage(d_out, rel_out)
        den = d_in.hstack(IntMatrix.identity(m).scale(g))
    else:
        num = kernel_basis(d_out) if d_out.nrows else IntMatrix.identity(m)
        den = d_in
    return SubquotientPresentation(Subquotient(m, num, den))


class ClassPresentation:
    """(Co)homology in one degree with coefficients in ``G``, with representatives.

    Each cyclic summand of ``G`` is handled by its own subquotient of
    ``Z^cells``; class coordinates are the concatenation over summands, with
    cyclic orders listed in ``orders``.
    """

    def __init__(self, X: CellComplex, G: FGAbGroup, degree: int, kind: str = "cohomology"):
        self.complex = X
        self.coefficients = G
        self.degree = degree
        self.kind = kind
        p = degree
        n = _cell_count(X, p)
        if kind == "cohomology":
            d_out = _sparse_to_dense(X.coboundary_columns(p), _cell_count(X, p + 1)) if 0 <= p <= X.dim else IntMatrix.zeros(0, 0)
            d_in = _sparse_to_dense(X.coboundary_columns(p - 1), n) if p - 1 >= 0 else IntMatrix.zeros(n, 0)
        elif kind == "homology":
            d_out = _sparse_to_dense(X.boundary_columns(p), _cell_count(X, p - 1)) if 0 < p <= X.dim else IntMatrix.zeros(0, n)
            d_in = _sparse_to_dense(X.boundary_columns(p + 1), n) if p + 1 <= X.dim else IntMatrix.zeros(n, 0)
        else:
            raise ValueError(kind)
        if d_out.ncols != n:
            d_out = IntMatrix.zeros(0, n)
        self.parts = [_cyclic_subquotient(d_out, d_in, g) for g in G.orders]
        self.orders = tuple(o for part in self.parts for o in part.group.orders)
        self.group = FGAbGroup.from_orders(self.orders)

    @property
    def ngens(self) -> int:
        return len(self.orders)

    def _split(self, c: Cochain) -> list[tuple[int, ...]]:
        if c.complex is not self.complex or c.degree != self.degree:
            raise ValueError("cochain from a different complex or degree")
        return [c.component(j) for j in range(self.coefficients.ngens)]

    def contains(self, c: Cochain) -> bool:
        """Cocycle (or cycle) test."""
        return all(part.contains(v) for part, v in zip(self.parts, self._split(c)))

    def coordinates(self, c: Cochain) -> tuple[int, ...]:
        out: tuple[int, ...] = ()
        for part, v in zip(self.parts, self._split(c)):
            out += part.coordinates(v)
        return out

    def is_zero(self, c: Cochain) -> bool:
        return not any(self.coordinates(c))

    def generators(self) -> list[Cochain]:
        G = self.coefficients
        out = []
        for j, part in enumerate(self.parts):
            for col in part.basis.columns():
                vals = [[0] * G.ngens for _ in col]
                for i, a in enumerate(col):
                    vals[i][j] = a
                out.append(Cochain(self.complex, self.degree, G, tuple(map(tuple, vals))))
        return out

    def element(self, coords: Sequence[int]) -> Cochain:
        if len(coords) != self.ngens:
            raise ValueError("coordinate length mismatch")
        total = Cochain.zero(self.complex, self.degree, self.coefficients)
        for a, gen in zip(coords, self.generators()):
            if a:
                total = total + gen.scale(a)
        return total


def _cached_presentation(X: CellComplex, G: FGAbGroup, p: int, kind: str) -> ClassPresentation:
    # complexes are immutable, so presentations are memoised on the instance
    cache = X.__dict__.setdefault("_pres_cache", {})
    key = (G, p, kind)
    if key not in cache:
        cache[key] = ClassPresentation(X, G, p, kind)
    return cache[key]


def cohomology_presentation(X: CellComplex, G: FGAbGroup, p: int) -> ClassPresentation:
    """``H^p(X; G)`` as a subquotient of cochains, with representative cocycles."""
    return _cached_presentation(X, G, p, "cohomology")


def homology_presentation(X: CellComplex, G: FGAbGroup, p: int) -> ClassPresentation:
    """``H_p(X; G)`` with representative cycles (stored as ``Cochain`` values)."""
    return _cached_presentation(X, G, p, "homology")


# ---------------------------------------------------------------------------
# Barycentric subdivision


@dataclass(frozen=True)
class Subdivision:
    """Barycentric subdivision with its bookkeeping.

    ``vertex_simplex[v]`` is the ``(dim, index)`` of the simplex of the base
    complex whose barycenter is vertex ``v``.  ``carrier[k][i]`` is the
    ``(dim, index)`` of the largest simplex in the flag of k-simplex ``i``.
    """

    base: SimplicialComplex
    complex: SimplicialComplex
    vertex_simplex: tuple[tuple[int, int], ...]
    carrier: tuple[tuple[tuple[int, int], ...], ...]

    def vertex_of(self, k: int, i: int) -> int:
        return self._offsets[k] + i

    @cached_property
    def _offsets(self) -> tuple[int, ...]:
        offs, acc = [], 0
        for k in range(self.base.dim + 1):
            offs.append(acc)
            acc += self.base.ncells(k)
        return tuple(offs)

    def subdivide_chain(self, k: int, chain: Sequence[int]) -> dict[Simplex, int]:
        """Image of an integral k-chain under the subdivision chain map.

        The map sends a simplex to the signed sum of the top flags ending at
        it, with signs fixed by ``S(s) = (-1)^k S(boundary s) * b_s`` where
        ``* b_s`` appends the barycenter of ``s`` as the last vertex.
        """
        out: dict[Simplex, int] = {}
        for i, c in enumerate(chain):
            if c:
                for flag, sgn in self._flag_signs(k, i).items():
                    v = out.get(flag, 0) + c * sgn
                    if v:
                        out[flag] = v
                    else:
                        out.pop(flag, None)
        return out

    def _flag_signs(self, k: int, i: int) -> dict[Simplex, int]:
        cache = self.__dict__.setdefault("_fs_cache", {})
        key = (k, i)
        if key in cache:
            return cache[key]
        b = self.vertex_of(k, i)
        if k == 0:
            res = {(b,): 1}
        else:
            res = {}
            sgn_k = -1 if k % 2 else 1
            for face, s in self.base.boundary_columns(k)[i].items():
                for flag, t in self._flag_signs(k - 1, face).items():
                    res[flag + (b,)] = sgn_k * s * t
        cache[key] = res
        return res


def barycentric_subdivision(X: SimplicialComplex) -> Subdivision:
    """First barycentric subdivision.

    Vertices are the simplices of ``X``, ordered by dimension and then by
    index, so every flag ``s_0 < s_1 < ... < s_m`` is an increasing tuple.

    >>> sd = barycentric_subdivision(SimplicialComplex.from_facets([["a", "b", "c"]]))
    >>> sd.complex.cell_counts
    (7, 12, 6)
    """
    offs = []
    acc = 0
    vertex_simplex = []
    labels = []
    for k in range(X.dim + 1):
        offs.append(acc)
        for i, s in enumerate(X.simplices(k)):
            vertex_simplex.append((k, i))
            labels.append("{" + ",".join(X.simplex_labels(s)) + "}")
        acc += X.ncells(k)

    by_vertex: list[list[Simplex]] = []
    for k in range(X.dim + 1):
        for i, s in enumerate(X.simplices(k)):
            b = offs[k] + i
            fl = [(b,)]
            for m in range(1, k + 1):
                for t in combinations(s, m):
                    tb = offs[m - 1] + X.index(t, m - 1)
                    fl += [f + (b,) for f in by_vertex[tb]]
            by_vertex.append(fl)
    simplices = [f for b in range(acc) for f in by_vertex[b]]
    sdX = SimplicialComplex(labels, simplices, closed=True)
    carrier = tuple(
        tuple(vertex_simplex[s[-1]] for s in sdX.simplices(m)) for m in range(sdX.dim + 1)
    )
    return Subdivision(X, sdX, tuple(vertex_simplex), carrier)


# ---------------------------------------------------------------------------
# Products


def product_complex(X: SimplicialComplex, Y: SimplicialComplex, sep: str = "|") -> SimplicialComplex:
    """Staircase triangulation of ``X x Y`` for ordered complexes.

    Product vertices ``(x, y)`` are ordered lexicographically by the factor
    orders; each pair of facets contributes one simplex per monotone lattice
    path.
    """
    nx, ny = X.nvertices, Y.nvertices
    labels = [f"{X.labels[a]}{sep}{Y.labels[b]}" for a in range(nx) for b in range(ny)]
    out = []
    for s in X.facets():
        for t in Y.facets():
            p, q = len(s) - 1, len(t) - 1
            for ups in combinations(range(p + q), p):
                i = j = 0
                path = [s[0] * ny + t[0]]
                upset = set(ups)
                for step in range(p + q):
                    if step in upset:
                        i += 1
                    else:
                        j += 1
                    path.append(s[i] * ny + t[j])
                out.append(tuple(path))
    return SimplicialComplex(labels, out)


# ---------------------------------------------------------------------------
# Orientation


def fundamental_cycle(X: SimplicialComplex, modulus: int = 0) -> Optional[tuple[int, ...]]:
    """A fundamental n-cycle with coefficients ``+-1`` on every top simplex.

    With ``modulus == 2`` the all-ones cycle is returned whenever ``X`` is a
    pseudomanifold.  Over the integers ``None`` means non-orientable.
    """
    n = X.dim
    if n < 0:
        return ()
    if not X.is_pure():
        raise NotPseudoManifold("complex is not pure")
    if n == 0:
        return (1,) * X.ncells(0)
    cof = X.cofaces(n - 1)
    for i, c in enumerate(cof):
        if len(c) != 2:
            raise NotPseudoManifold(
                f"{X.simplex_labels(X.simplices(n - 1)[i])} has {len(c)} cofaces, expected 2"
            )
    if modulus == 2:
        return (1,) * X.ncells(n)
    if modulus:
        raise ValueError("only integral and mod-2 orientations are supported")
    bcols = X.boundary_columns(n)
    eps = [0] * X.ncells(n)
    for start in range(X.ncells(n)):
        if eps[start]:
            continue
        eps[start] = 1
        queue = deque([start])
        while queue:
            t = queue.popleft()
            for f, s in bcols[t].items():
                u = cof[f][0] if cof[f][1] == t else cof[f][1]
                want = -eps[t] * s * bcols[u][f]
                if eps[u] == 0:
                    eps[u] = want
                    queue.append(u)
                elif eps[u] != want:
                    return None
    return tuple(eps)


def is_sphere_homology(X: SimplicialComplex, m: int) -> bool:
    """Whether ``X`` has the integral homology of the m-sphere."""
    if m < 0:
        return X.dim < 0
    if X.dim != m:
        return False
    for k in range(m + 1):
        H = homology(X, k)
        want = FGAbGroup(1) if k in (0, m) else FGAbGroup()
        if m == 0 and k == 0:
            want = FGAbGroup(2)
        if H != want:
            return False
    return True


def check_links(X: SimplicialComplex) -> None:
    """Raise ``NotAManifold`` unless every simplex link is a homology sphere."""
    n = X.dim
    for k in range(n):
        for s in X.simplices(k):
            if not is_sphere_homology(X.link(s), n - k - 1):
                raise NotAManifold(
                    f"link of {X.simplex_labels(s)} is not a homology {n - k - 1}-sphere"
                )


# ---------------------------------------------------------------------------
# Dual blocks


class DualComplex(CellComplex):
    """Dual block decomposition of a closed triangulated n-manifold.

    The k-cells are the blocks ``D(s)`` for the (n-k)-simplices ``s`` of the
    source, in the source's order.  Incidences are

        boundary D(s) = sum over cofaces t of s of (-1)^(dim s + 1) [t : s] D(t),

    so the dual chain complex is the simplicial cochain complex up to sign.
    Each block is oriented so that the orientation of ``s`` followed by that
    of ``D(s)`` is the orientation of the source's fundamental cycle; the
    geometric chains ``block_chain`` realise this in the barycentric
    subdivision and satisfy ``boundary(block_chain(s)) = block_chain(boundary D(s))``.
    ``modulus == 2`` marks a source oriented only mod 2, where the block
    complex is valid for mod-2 coefficients only.
    """

    def __init__(self, source: SimplicialComplex, orientation: Sequence[int], modulus: int = 0):
        self.source = source
        self.dim = source.dim
        self.orientation = tuple(orientation)
        self.modulus = modulus
        self._bcols: dict[int, list[dict[int, int]]] = {}

    def ncells(self, k: int) -> int:
        return self.source.ncells(self.dim - k) if 0 <= k <= self.dim else 0

    def simplex_dim(self, k: int) -> int:
        """Dimension of the simplices dual to k-blocks."""
        return self.dim - k

    def boundary_columns(self, k: int) -> list[dict[int, int]]:
        if k <= 0 or k > self.dim:
            return [{} for _ in range(self.ncells(k))]
        if k not in self._bcols:
            m = self.dim - k
            sign = 1 if m % 2 else -1
            cols: list[dict[int, int]] = [{} for _ in range(self.ncells(k))]
            for t, col in enumerate(self.source.boundary_columns(m + 1)):
                for s, inc in col.items():
                    cols[s][t] = sign * inc
            self._bcols[k] = cols
        return self._bcols[k]

    @cached_property
    def subdivision(self) -> Subdivision:
        return barycentric_subdivision(self.source)

    @cached_property
    def _sd_fundamental(self) -> dict[Simplex, int]:
        return self.subdivision.subdivide_chain(self.dim, self.orientation)

    def block_chain(self, k: int, i: int) -> dict[Simplex, int]:
        """The block ``D(s)`` (k-block number ``i``) as a chain of the subdivision.

        The block is the union of flags ``s = s_0 < ... < s_k``; a flag's sign
        is the fundamental cycle's coefficient on any full flag through it,
        divided by the coefficient of its lower part in the subdivided ``s``.
        """
        sd = self.subdivision
        X = self.source
        n = self.dim
        m = n - k
        lower_flags = sd._flag_signs(m, i)
        lower, lower_sign = next(iter(lower_flags.items()))
        fund = self._sd_fundamental
        out: dict[Simplex, int] = {}
        for full, c in fund.items():
            if full[: m + 1] == lower:
                upper = full[m:]
                out[upper] = c * lower_sign
        return out


def dual_block_decomposition(
    X: SimplicialComplex, orientation: Optional[Sequence[int]] = None, modulus: int = 0, check_link: bool = True
) -> DualComplex:
    """Dual block complex of a closed manifold oriented by ``orientation``.

    ``orientation`` defaults to ``fundamental_cycle(X, modulus)``.  Raises
    ``NotAManifold`` if the complex is not a closed pseudomanifold, a link is
    not a homology sphere, the orientation is not a cycle, or the dual chain
    complex fails ``d d = 0`` or duality with simplicial cohomology.
    """
    try:
        fc = fundamental_cycle(X, modulus)
    except NotPseudoManifold as exc:
        raise NotAManifold(str(exc)) from None
    if orientation is None:
        if fc is None:
            raise NotAManifold("complex is not orientable over the integers; use modulus=2")
        orientation = fc
    orientation = tuple(int(v) for v in orientation)
    n = X.dim
    if len(orientation) != X.ncells(n):
        raise NotAManifold("orientation must give one coefficient per top simplex")
    acc: dict[int, int] = {}
    for j, col in enumerate(X.boundary_columns(n)):
        for i, v in col.items():
            acc[i] = acc.get(i, 0) + v * orientation[j]
    if any((v % modulus if modulus else v) for v in acc.values()):
        raise NotAManifold("orientation chain is not a cycle")
    if any((c % 2 == 0) if modulus == 2 else abs(c) != 1 for c in orientation):
        raise NotAManifold("orientation must have unit coefficients on every top simplex")
    if check_link:
        check_links(X)
    D = DualComplex(X, orientation, modulus)
    for k in range(2, n + 1):
        b1, b2 = D.boundary_columns(k - 1), D.boundary_columns(k)
        for col in b2:
            acc2: dict[int, int] = {}
            for i, v in col.items():
                for h, w in b1[i].items():
                    acc2[h] = acc2.get(h, 0) + v * w
            if any(acc2.values()):
                raise NotAManifold("dual boundary fails d d = 0")
    for p in range(n + 1):
        if homology(D, n - p) != cohomology(X, FGAbGroup(1), p):
            raise NotAManifold(f"dual homology in degree {n - p} disagrees with H^{p}")
    return D
