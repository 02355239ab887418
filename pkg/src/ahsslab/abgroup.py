"""Exact linear algebra over the integers.

Everything the spectral-sequence code needs reduces to a handful of lattice
questions in a free module ``Z^m``: Smith normal forms, kernels, membership
in a column span, and presentations of subquotients ``N / D``.  Matrices are
small immutable wrappers around tuples of Python ints, so entries never
overflow.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import gcd, prod
from itertools import groupby
import re
from typing import Iterable, Optional, Sequence

from . import _kernels


class DenominatorNotContained(ValueError):
    """The denominator of a subquotient is not inside its numerator."""


class NotWellDefined(ValueError):
    """A map does not carry numerator/denominator into numerator/denominator."""


class IntMatrix:
    """Dense integer matrix with row-major storage."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Sequence[int]] = (), ncols: Optional[int] = None):
        rows = tuple(tuple(map(int, r)) for r in rows)
        if ncols is None:
            if not rows:
                raise ValueError("ncols required for a matrix without rows")
            ncols = len(rows[0])
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged rows")
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = ncols

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "IntMatrix":
        return cls([[0] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, columns: Iterable[Sequence[int]], nrows: int) -> "IntMatrix":
        cols = [tuple(c) for c in columns]
        for c in cols:
            if len(c) != nrows:
                raise ValueError("column length mismatch")
        if not cols:
            return cls([() for _ in range(nrows)], 0)
        return cls(zip(*cols), len(cols))

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def T(self) -> "IntMatrix":
        if self.ncols == 0:
            return IntMatrix([], self.nrows) if self.nrows == 0 else IntMatrix([], self.nrows)
        if self.nrows == 0:
            return IntMatrix([() for _ in range(self.ncols)], 0)
        return IntMatrix(zip(*self.rows), self.nrows)

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[tuple[int, ...]]:
        if self.nrows == 0:
            return [() for _ in range(self.ncols)]
        return [tuple(c) for c in zip(*self.rows)]

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.shape, self.rows))

    def __repr__(self) -> str:
        return f"IntMatrix({[list(r) for r in self.rows]!r}, ncols={self.ncols})"

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def is_zero(self) -> bool:
        return all(v == 0 for r in self.rows for v in r)

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        if len(v) != self.ncols:
            raise ValueError("dimension mismatch")
        nz = [(j, x) for j, x in enumerate(v) if x]
        return tuple(sum(r[j] * x for j, x in nz) for r in self.rows)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if not isinstance(other, IntMatrix):
            return NotImplemented
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        orows = other.rows
        out = []
        for r in self.rows:
            acc = [0] * other.ncols
            for k, a in enumerate(r):
                if a:
                    ok = orows[k]
                    for j, b in enumerate(ok):
                        if b:
                            acc[j] += a * b
            out.append(acc)
        return IntMatrix(out, other.ncols)

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols
        )

    def __neg__(self) -> "IntMatrix":
        return IntMatrix([[-a for a in r] for r in self.rows], self.ncols)

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix([[k * a for a in r] for r in self.rows], self.ncols)

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.nrows != other.nrows:
            raise ValueError("row count mismatch")
        return IntMatrix([a + b for a, b in zip(self.rows, other.rows)], self.ncols + other.ncols)

    def vstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.ncols:
            raise ValueError("column count mismatch")
        return IntMatrix(self.rows + other.rows, self.ncols)

    def select_columns(self, idx: Sequence[int]) -> "IntMatrix":
        idx = list(idx)
        return IntMatrix([[r[j] for j in idx] for r in self.rows], len(idx))

    def select_rows(self, idx: Sequence[int]) -> "IntMatrix":
        return IntMatrix([self.rows[i] for i in idx], self.ncols)

    def sparse_columns(self) -> list[dict[int, int]]:
        cols: list[dict[int, int]] = [{} for _ in range(self.ncols)]
        for i, r in enumerate(self.rows):
            for j, v in enumerate(r):
                if v:
                    cols[j][i] = v
        return cols

    def determinant(self) -> int:
        if self.nrows != self.ncols:
            raise ValueError("square matrix required")
        diag, U, _, V = _kernels.smith(self.tolist(), self.nrows, self.ncols, True)
        det_s = prod(diag) if diag else 1
        if det_s == 0:
            return 0
        return det_s * _unimodular_sign(U) * _unimodular_sign(V)


def _unimodular_sign(rows) -> int:
    # determinant of a unimodular matrix via fraction-free elimination
    n = len(rows)
    if n == 0:
        return 1
    a = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if a[i][k]), None)
            if sw is None:
                return 0
            a[k], a[sw] = a[sw], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def as_matrix(m) -> IntMatrix:
    if isinstance(m, IntMatrix):
        return m
    return IntMatrix(m)


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ M @ V == S`` with ``U``, ``V`` unimodular and ``S`` diagonal."""

    U: IntMatrix
    S: IntMatrix
    V: IntMatrix
    Uinv: IntMatrix = field(repr=False, compare=False)

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.S[i, i] for i in range(min(self.S.shape)))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)


def smith_normal_form(M) -> SmithDecomposition:
    """Smith normal form with both transforms.

    >>> smith_normal_form([[2, 4], [6, 8]]).diagonal
    (2, 4)
    """
    M = as_matrix(M)
    m, n = M.shape
    diag, U, Uinv, V = _kernels.smith(M.tolist(), m, n, True)
    S = [[0] * n for _ in range(m)]
    for i, d in enumerate(diag):
        S[i][i] = d
    return SmithDecomposition(
        U=IntMatrix(U, m), S=IntMatrix(S, n), V=IntMatrix(V, n), Uinv=IntMatrix(Uinv, m)
    )


def invariant_factors(M) -> tuple[int, ...]:
    """Nonzero SNF diagonal entries, via sparse elimination (no transforms)."""
    M = as_matrix(M)
    rank, torsion = _kernels.sparse_invariants(M.sparse_columns(), M.nrows, 0)
    return (1,) * (rank - len(torsion)) + tuple(sorted(torsion))


def sparse_rank_and_torsion(columns: list[dict[int, int]], nrows: int, modulus: int = 0):
    return _kernels.sparse_invariants(columns, nrows, modulus)


def rank(M) -> int:
    return len(invariant_factors(M))


# ---------------------------------------------------------------------------
# Finitely generated abelian groups


def _normalize_cyclic(orders: Iterable[int]) -> tuple[int, tuple[int, ...]]:
    """Split a list of cyclic orders (0 = infinite) into rank and invariant factors."""
    free = 0
    finite = []
    for d in orders:
        d = abs(int(d))
        if d == 0:
            free += 1
        elif d > 1:
            finite.append(d)
    if len(finite) > 1:
        # regroup prime powers: the i-th largest power of every prime goes to
        # the i-th largest invariant factor
        powers: dict[int, list[int]] = {}
        for d in finite:
            for p, e in _factor(d).items():
                powers.setdefault(p, []).append(p ** e)
        k = max(len(v) for v in powers.values()) if powers else 0
        out = [1] * k
        for p, vals in powers.items():
            for i, v in enumerate(sorted(vals, reverse=True)):
                out[i] *= v
        finite = [d for d in out if d > 1]
    return free, tuple(sorted(finite))


def _factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class FGAbGroup:
    """``Z^rank + Z/d_1 + ... + Z/d_k`` with ``d_i | d_{i+1}`` and ``d_i >= 2``.

    Elements are coordinate vectors: torsion coordinates first (reduced mod
    ``d_i``), then the free coordinates.
    """

    rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        t = tuple(int(d) for d in self.torsion)
        if self.rank < 0:
            raise ValueError("negative rank")
        if any(d < 2 for d in t):
            raise ValueError(f"invariant factors must be >= 2, got {t}")
        if any(t[i + 1] % t[i] for i in range(len(t) - 1)):
            raise ValueError(f"invariant factors must form a divisibility chain, got {t}")
        object.__setattr__(self, "torsion", t)

    @classmethod
    def from_orders(cls, orders: Iterable[int]) -> "FGAbGroup":
        """Group from arbitrary cyclic orders; 0 means a copy of Z."""
        r, t = _normalize_cyclic(orders)
        return cls(r, t)

    @classmethod
    def cyclic(cls, d: int) -> "FGAbGroup":
        return cls.from_orders([d])

    @classmethod
    def parse(cls, spec: str) -> "FGAbGroup":
        """Parse ``Z``, ``Z/k``, ``Z^r+Z/k1+...`` (also ``0`` and ``(Z/k)^m``).

        >>> str(FGAbGroup.parse("Z^2+Z/2+(Z/2)^2"))
        'Z^2 + (Z/2)^3'
        """
        s = spec.replace(" ", "")
        if s in ("0", ""):
            return cls()
        orders: list[int] = []
        for part in s.split("+"):
            m = re.fullmatch(r"Z(?:\^(\d+))?", part)
            if m:
                orders += [0] * int(m.group(1) or 1)
                continue
            m = re.fullmatch(r"Z/(\d+)(?:\^(\d+))?", part) or re.fullmatch(r"\(Z/(\d+)\)\^(\d+)", part)
            if m:
                k = int(m.group(1))
                if k == 0:
                    raise ValueError(f"bad coefficient spec {spec!r}")
                orders += [k] * int(m.group(2) or 1)
                continue
            raise ValueError(f"bad coefficient spec {spec!r}")
        return cls.from_orders(orders)

    @property
    def ngens(self) -> int:
        return len(self.torsion) + self.rank

    @property
    def orders(self) -> tuple[int, ...]:
        """Cyclic order of each generator (0 for free generators)."""
        return self.torsion + (0,) * self.rank

    @property
    def order(self) -> Optional[int]:
        """Group order, or ``None`` when infinite."""
        return None if self.rank else prod(self.torsion)

    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    def direct_sum(self, other: "FGAbGroup") -> "FGAbGroup":
        return FGAbGroup.from_orders(self.orders + other.orders)

    def reduce(self, coords: Sequence[int]) -> tuple[int, ...]:
        if len(coords) != self.ngens:
            raise ValueError("coordinate length mismatch")
        t = len(self.torsion)
        return tuple(c % d for c, d in zip(coords[:t], self.torsion)) + tuple(coords[t:])

    def is_zero_element(self, coords: Sequence[int]) -> bool:
        return not any(self.reduce(coords))

    def is_field_like(self) -> bool:
        """True when every cyclic summand is Z/p for one prime p (a vector space)."""
        if self.rank or not self.torsion:
            return False
        p = self.torsion[0]
        return all(d == p for d in self.torsion) and _is_prime(p)

    def to_dict(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion)}

    def __str__(self) -> str:
        if self.is_trivial():
            return "0"
        parts = []
        if self.rank:
            parts.append("Z" if self.rank == 1 else f"Z^{self.rank}")
        for d, grp in groupby(self.torsion):
            m = len(list(grp))
            parts.append(f"Z/{d}" if m == 1 else f"(Z/{d})^{m}")
        return " + ".join(parts)


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def cokernel(M) -> FGAbGroup:
    """``Z^rows / colspan(M)`` in invariant-factor form."""
    M = as_matrix(M)
    rank_, torsion = _kernels.sparse_invariants(M.sparse_columns(), M.nrows, 0)
    return FGAbGroup(M.nrows - rank_, tuple(sorted(torsion)))


# ---------------------------------------------------------------------------
# Lattices given by spanning columns


class Span:
    """The sublattice of ``Z^m`` spanned by the columns of a matrix.

    Echelon form of the spanning vectors gives a basis, integer solving and
    the relation module among the spanning vectors.
    """

    def __init__(self, gens: IntMatrix):
        self.gens = gens
        self.ambient = gens.nrows
        cols = gens.columns()
        E, T, pivots = _kernels.echelon([list(c) for c in cols], len(cols), self.ambient)
        r = len(pivots)
        self.rank = r
        self._E = E[:r]
        self._T = T
        self._pivots = pivots

    @cached_property
    def echelon_basis(self) -> IntMatrix:
        """Basis vectors (as columns) in echelon form."""
        return IntMatrix.from_columns(self._E, self.ambient)

    @cached_property
    def echelon_lifts(self) -> IntMatrix:
        """Coefficients of the echelon basis in terms of the spanning columns."""
        return IntMatrix.from_columns(self._T[: self.rank], self.gens.ncols)

    @cached_property
    def relations(self) -> IntMatrix:
        """Basis of the integer relations among the spanning columns."""
        return IntMatrix.from_columns(self._T[self.rank :], self.gens.ncols)

    @property
    def independent(self) -> bool:
        return self.rank == self.gens.ncols

    def echelon_coords(self, v: Sequence[int]) -> Optional[list[int]]:
        """Coordinates of ``v`` in the echelon basis, or ``None`` if ``v`` is outside."""
        if len(v) != self.ambient:
            raise ValueError("dimension mismatch")
        res = list(v)
        w = []
        for row, c in zip(self._E, self._pivots):
            # entries left of the pivot column are already zero in res
            a = row[c]
            x = res[c]
            if x % a:
                return None
            q = x // a
            w.append(q)
            if q:
                for j in range(c, self.ambient):
                    if row[j]:
                        res[j] -= q * row[j]
        if any(res):
            return None
        return w

    def solve(self, v: Sequence[int]) -> Optional[tuple[int, ...]]:
        """Some integer ``c`` with ``gens @ c == v``, or ``None``."""
        w = self.echelon_coords(v)
        if w is None:
            return None
        n = self.gens.ncols
        c = [0] * n
        for wi, trow in zip(w, self._T):
            if wi:
                for k in range(n):
                    if trow[k]:
                        c[k] += wi * trow[k]
        return tuple(c)

    def contains(self, v: Sequence[int]) -> bool:
        return self.echelon_coords(v) is not None

    def contains_span(self, M: IntMatrix) -> bool:
        return all(self.contains(c) for c in M.columns())


def membership(v: Sequence[int], span) -> Optional[tuple[int, ...]]:
    """Coefficients expressing ``v`` in the column span of ``span``, or ``None``.

    >>> membership((3, 3), [[1, 1], [0, 3]])
    (2, 1)
    """
    S = span if isinstance(span, Span) else Span(as_matrix(span))
    return S.solve(v)


def kernel_basis(M) -> IntMatrix:
    """Columns form a basis of ``{x : M x = 0}`` (a saturated lattice)."""
    M = as_matrix(M)
    return Span(M).relations


def image_basis(M) -> IntMatrix:
    M = as_matrix(M)
    return Span(M).echelon_basis


def intersect(A: IntMatrix, B: IntMatrix) -> IntMatrix:
    """Spanning columns of ``colspan(A) & colspan(B)``."""
    if A.nrows != B.nrows:
        raise ValueError("ambient mismatch")
    rel = Span(A.hstack(-B)).relations
    coeff = rel.select_rows(range(A.ncols))
    return A @ coeff


def preimage(f: IntMatrix, target: IntMatrix, domain: Optional[IntMatrix] = None) -> IntMatrix:
    """Spanning columns of ``{x in colspan(domain) : f x in colspan(target)}``.

    ``domain`` defaults to the whole source module.
    """
    if domain is None:
        domain = IntMatrix.identity(f.ncols)
    img = f @ domain
    rel = Span(img.hstack(-target)).relations
    return domain @ rel.select_rows(range(domain.ncols))


# ---------------------------------------------------------------------------
# Subquotients


@dataclass(frozen=True)
class Subquotient:
    """``N / D`` inside ``Z^ambient_rank``; ``N`` and ``D`` given by spanning columns."""

    ambient_rank: int
    numerator_gens: IntMatrix
    denominator_gens: IntMatrix

    def __post_init__(self):
        if self.numerator_gens.nrows != self.ambient_rank:
            raise ValueError("numerator lives in the wrong ambient module")
        if self.denominator_gens.nrows != self.ambient_rank:
            raise ValueError("denominator lives in the wrong ambient module")

    @classmethod
    def of(cls, m: int, numerator=None, denominator=None) -> "Subquotient":
        N = IntMatrix.identity(m) if numerator is None else _cols(numerator, m)
        D = IntMatrix.zeros(m, 0) if denominator is None else _cols(denominator, m)
        return cls(m, N, D)


def _cols(x, m) -> IntMatrix:
    if isinstance(x, IntMatrix):
        return x
    x = list(x)
    return IntMatrix.from_columns(x, m)


class SubquotientPresentation:
    """Invariant-factor presentation of a subquotient ``N / D``.

    Generators come in SNF order: torsion generators by increasing invariant
    factor, then free generators.  ``basis`` holds ambient vectors mapping to
    the generators; ``lifts`` expresses each of them through the spanning
    columns of ``N``.
    """

    def __init__(self, sq: Subquotient, check: bool = True):
        self.subquotient = sq
        m = sq.ambient_rank
        N, D = sq.numerator_gens, sq.denominator_gens
        self.num_span = Span(N)
        if check:
            for c in D.columns():
                if not self.num_span.contains(c):
                    raise DenominatorNotContained(
                        "denominator generator outside the numerator span"
                    )
        if self.num_span.independent:
            self._basis_N = N
            self._combo = IntMatrix.identity(N.ncols)
            self._coords_in_basis = self.num_span.solve
        else:
            self._basis_N = self.num_span.echelon_basis
            self._combo = self.num_span.echelon_lifts
            self._coords_in_basis = self.num_span.echelon_coords
        k = self._basis_N.ncols
        R_cols = []
        for c in D.columns():
            x = self._coords_in_basis(c)
            if x is None:
                raise DenominatorNotContained("denominator generator outside the numerator span")
            R_cols.append(x)
        R = IntMatrix.from_columns(R_cols, k)
        diag, U, Uinv, _ = _kernels.smith(R.tolist(), k, R.ncols, True)
        s = list(diag[:k]) + [0] * max(0, k - len(diag))
        keep = [i for i in range(k) if s[i] != 1]
        self._keep = keep
        self._U_rows = [[(j, u) for j, u in enumerate(U[i]) if u] for i in keep]
        self._s = [s[i] for i in keep]
        gens_in_basis = IntMatrix([[Uinv[r][i] for i in keep] for r in range(k)], len(keep))
        self.basis = self._basis_N @ gens_in_basis
        self.lifts = self._combo @ gens_in_basis
        torsion = tuple(d for d in self._s if d)
        self.group = FGAbGroup(len(self._s) - len(torsion), torsion)
        self._den_span = None

    @property
    def ambient_rank(self) -> int:
        return self.subquotient.ambient_rank

    def contains(self, v: Sequence[int]) -> bool:
        return self.num_span.contains(v)

    def coordinates(self, v: Sequence[int]) -> tuple[int, ...]:
        """Generator coordinates of the class of ``v`` (which must lie in ``N``)."""
        c = self._coords_in_basis(v)
        if c is None:
            raise NotWellDefined("vector outside the numerator")
        out = []
        for row, d in zip(self._U_rows, self._s):
            y = sum(u * c[j] for j, u in row)
            out.append(y % d if d else y)
        return tuple(out)

    def is_zero(self, v: Sequence[int]) -> bool:
        return not any(self.coordinates(v))

    def element(self, coords: Sequence[int]) -> tuple[int, ...]:
        """An ambient representative of the element with the given coordinates."""
        if len(coords) != self.group.ngens:
            raise ValueError("coordinate length mismatch")
        return self.basis.apply(coords)

    def denominator_span(self) -> Span:
        if self._den_span is None:
            self._den_span = Span(self.subquotient.denominator_gens)
        return self._den_span


def present(sq: Subquotient) -> SubquotientPresentation:
    return SubquotientPresentation(sq)


def subquotient_group(sq: Subquotient) -> tuple[FGAbGroup, IntMatrix]:
    """``N / D`` in invariant-factor form plus representative ambient vectors.

    >>> sq = Subquotient.of(2, denominator=[(0, 2)])
    >>> str(subquotient_group(sq)[0])
    'Z + Z/2'
    """
    p = SubquotientPresentation(sq)
    return p.group, p.basis


def _as_presentation(x) -> SubquotientPresentation:
    if isinstance(x, SubquotientPresentation):
        return x
    return SubquotientPresentation(x)


def induced_hom(f, src, dst) -> IntMatrix:
    """Matrix of the map ``src -> dst`` induced by the ambient matrix ``f``.

    Raises ``NotWellDefined`` unless ``f`` carries numerator into numerator
    and denominator into denominator.
    """
    f = as_matrix(f)
    S, T = _as_presentation(src), _as_presentation(dst)
    if f.ncols != S.ambient_rank or f.nrows != T.ambient_rank:
        raise ValueError("ambient dimensions do not match the map")
    for c in S.subquotient.numerator_gens.columns():
        if not T.contains(f.apply(c)):
            raise NotWellDefined("image of the numerator leaves the target numerator")
    for c in S.subquotient.denominator_gens.columns():
        if not T.is_zero(f.apply(c)):
            raise NotWellDefined("image of the denominator is not zero in the target")
    cols = [T.coordinates(f.apply(b)) for b in S.basis.columns()]
    return IntMatrix.from_columns(cols, T.group.ngens)


def reduce_matrix(M: IntMatrix, group: FGAbGroup) -> IntMatrix:
    """Reduce each column of a hom matrix modulo the target's relations."""
    return IntMatrix.from_columns([group.reduce(c) for c in M.columns()], group.ngens)


def hom_homology(
    src_group: FGAbGroup, mid_group: FGAbGroup, dst_group: FGAbGroup, d_in: IntMatrix, d_out: IntMatrix
) -> SubquotientPresentation:
    """``ker(d_out) / im(d_in)`` for homs between presented groups.

    The result lives in the generator-coordinate module ``Z^ngens(mid)``.
    """
    k = mid_group.ngens
    rel_mid = IntMatrix.from_columns(
        [[d if i == j else 0 for i in range(k)] for j, d in enumerate(mid_group.orders) if d], k
    )
    kd = dst_group.ngens
    rel_dst = IntMatrix.from_columns(
        [[d if i == j else 0 for i in range(kd)] for j, d in enumerate(dst_group.orders) if d], kd
    )
    num = preimage(d_out, rel_dst)
    den = d_in.hstack(rel_mid)
    return SubquotientPresentation(Subquotient(k, num, den))
