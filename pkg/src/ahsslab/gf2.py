"""Linear algebra over GF(2) with Python ints as bit vectors."""

from __future__ import annotations

from typing import Iterable, Optional, Sequence


def to_bits(values: Iterable[int]) -> int:
    out = 0
    for i, v in enumerate(values):
        if v & 1:
            out |= 1 << i
    return out


def from_bits(x: int, n: int) -> tuple[int, ...]:
    return tuple((x >> i) & 1 for i in range(n))


def _low(x: int) -> int:
    return (x & -x).bit_length() - 1


class Gf2Echelon:
    """Incrementally reduced basis; each vector carries a tag (bit mask of inputs)."""

    def __init__(self):
        self.rows: dict[int, tuple[int, int]] = {}

    def reduce(self, x: int, tag: int = 0) -> tuple[int, int]:
        while x:
            lo = _low(x)
            hit = self.rows.get(lo)
            if hit is None:
                break
            x ^= hit[0]
            tag ^= hit[1]
        return x, tag

    def add(self, x: int, tag: int = 0) -> bool:
        x, tag = self.reduce(x, tag)
        if not x:
            return False
        self.rows[_low(x)] = (x, tag)
        return True

    @property
    def rank(self) -> int:
        return len(self.rows)


def kernel(columns: Sequence[int]) -> list[int]:
    """Kernel of the map whose i-th column is ``columns[i]`` (as input bit masks)."""
    ech = Gf2Echelon()
    out = []
    for i, c in enumerate(columns):
        x, tag = ech.reduce(c, 1 << i)
        if x:
            ech.rows[_low(x)] = (x, tag)
        else:
            out.append(tag)
    return out


def transpose(columns: Sequence[int], nrows: int) -> list[int]:
    rows = [0] * nrows
    for j, c in enumerate(columns):
        while c:
            lo = _low(c)
            rows[lo] |= 1 << j
            c &= c - 1
    return rows


class Gf2Cohomology:
    """Mod-2 cohomology in one degree from the coboundary bit columns.

    ``delta_in`` lists ``delta(e)`` for the (p-1)-cells as bit masks over
    p-cells; ``delta_out`` lists ``delta(e)`` for the p-cells.
    """

    def __init__(self, ncells: int, delta_in: Sequence[int], delta_out: Sequence[int]):
        self.ncells = ncells
        self.boundaries = Gf2Echelon()
        for c in delta_in:
            self.boundaries.add(c)
        cocycle_masks = kernel(delta_out)
        self._ech = Gf2Echelon()
        self._ech.rows = dict(self.boundaries.rows)
        self.generators: list[int] = []
        for z in cocycle_masks:
            x, _ = self._ech.reduce(z)
            if x:
                k = len(self.generators)
                self.generators.append(z)
                self._ech.add(z, 1 << k)
        self._delta_out_rows = None
        self._delta_out = list(delta_out)

    @property
    def dimension(self) -> int:
        return len(self.generators)

    def is_cocycle(self, x: int) -> bool:
        acc = 0
        i = 0
        y = x
        while y:
            lo = _low(y)
            acc ^= self._delta_out[lo]
            y &= y - 1
        return acc == 0

    def coordinates(self, x: int) -> Optional[tuple[int, ...]]:
        """Class coordinates of a cocycle, or ``None`` if ``x`` is not a cocycle."""
        if not self.is_cocycle(x):
            return None
        r, tag = self._ech.reduce(x)
        if r:
            raise AssertionError("cocycle outside the span of cocycle generators")
        return from_bits(tag, self.dimension)

    def is_coboundary(self, x: int) -> bool:
        r, _ = self.boundaries.reduce(x)
        return r == 0
