"""Contingency tables of committee votes on two premises.

A committee of odd size ``n = 2m + 1`` votes on premises P and Q.  The outcome
is summarised by four counts::

              Q     not Q
    P         x       y
    not P     z       t

The space of all such tables is ordered by four elementary moves, each of
which shifts one vote one step closer to accepting P and Q::

    y -> x,   z -> x,   t -> y,   t -> z
"""

from __future__ import annotations

from functools import lru_cache
from math import comb
from typing import Iterator, NamedTuple

import numpy as np

from .errors import DomainError


class ContingencyTable(NamedTuple):
    """Vote counts ``(x, y, z, t)`` for P∧Q, P∧¬Q, ¬P∧Q and ¬P∧¬Q."""

    x: int
    y: int
    z: int
    t: int

    @property
    def n(self) -> int:
        return self.x + self.y + self.z + self.t

    @property
    def m(self) -> int:
        return (self.n - 1) // 2

    def to_json(self) -> list[int]:
        return [self.x, self.y, self.z, self.t]

    @classmethod
    def from_json(cls, data, n: int | None = None) -> "ContingencyTable":
        if not isinstance(data, (list, tuple)) or len(data) != 4:
            raise DomainError(f"a table is a list of four counts, got {data!r}")
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in data):
            raise DomainError(f"table counts must be integers, got {data!r}")
        table = cls(*data)
        check_table(table, n)
        return table


def check_committee_size(n) -> int:
    """Validate an odd committee size ``n >= 3`` and return it."""
    if isinstance(n, bool) or not isinstance(n, int):
        raise DomainError(f"committee size must be an integer, got {n!r}")
    if n < 3 or n % 2 == 0:
        raise DomainError(f"committee size must be odd and at least 3, got {n}")
    return n


def check_table(a, n: int | None = None) -> ContingencyTable:
    """Validate ``a`` as a table (optionally of size ``n``) and return it."""
    a = ContingencyTable(*a)
    if min(a) < 0:
        raise DomainError(f"table counts must be non-negative, got {tuple(a)}")
    if n is not None and a.n != n:
        raise DomainError(f"table {tuple(a)} sums to {a.n}, expected n={n}")
    return a


class TableSpace:
    """All tables for committee size ``n``, in lexicographic order of (x, y, z, t).

    The position of a table in this order is its *index*; rule bitmasks are
    laid out over these indices.
    """

    def __init__(self, n: int):
        self.n = check_committee_size(n)
        self.m = (n - 1) // 2
        self.tables = tuple(_weak_compositions(n))
        self._index = {a: i for i, a in enumerate(self.tables)}

    def __len__(self) -> int:
        return len(self.tables)

    def __iter__(self) -> Iterator[ContingencyTable]:
        return iter(self.tables)

    def __getitem__(self, i: int) -> ContingencyTable:
        return self.tables[i]

    def __contains__(self, a) -> bool:
        return tuple(a) in self._index

    def __repr__(self) -> str:
        return f"TableSpace(n={self.n}, size={len(self)})"

    def index(self, a) -> int:
        try:
            return self._index[tuple(a)]
        except KeyError:
            raise DomainError(f"{tuple(a)} is not a table of size n={self.n}") from None

    def to_json(self) -> dict:
        return {"n": self.n, "tables": [a.to_json() for a in self.tables]}

    @classmethod
    def from_json(cls, data: dict) -> "TableSpace":
        space = cls(data["n"])
        given = [ContingencyTable.from_json(a, space.n) for a in data["tables"]]
        if given != list(space.tables):
            raise DomainError("serialized tables do not match the lexicographic enumeration")
        return space


def _weak_compositions(n: int) -> Iterator[ContingencyTable]:
    for x in range(n + 1):
        for y in range(n - x + 1):
            for z in range(n - x - y + 1):
                yield ContingencyTable(x, y, z, n - x - y - z)


@lru_cache(maxsize=64)
def enumerate_tables(n: int) -> TableSpace:
    """Return the :class:`TableSpace` for odd ``n >= 3``; it has C(n+3, 3) tables."""
    space = TableSpace(n)
    assert len(space) == comb(n + 3, 3)
    return space


@lru_cache(maxsize=64)
def table_arrays(n: int) -> np.ndarray:
    """Read-only ``(N, 4)`` integer array of the tables, in the same order as :class:`TableSpace`."""
    check_committee_size(n)
    x, y, z = np.indices((n + 1, n + 1, n + 1)).reshape(3, -1)
    keep = x + y + z <= n
    x, y, z = x[keep], y[keep], z[keep]
    out = np.stack([x, y, z, n - x - y - z], axis=1).astype(np.int64)
    out.flags.writeable = False
    return out


def transpose(a) -> ContingencyTable:
    """Swap the two mixed cells: ``(x, y, z, t) -> (x, z, y, t)``."""
    x, y, z, t = a
    return ContingencyTable(x, z, y, t)


def table_leq(a, b) -> bool:
    """Decide ``a <= b`` in the order generated by the four vote moves.

    Composing moves, ``b`` is reachable from ``a`` iff there are non-negative
    move counts with ``x' = x + p + q``, ``y' = y - p + r``, ``z' = z - q + s``,
    ``t' = t - r - s``.  Eliminating the counts leaves four linear conditions on
    the differences, checked here in constant time.
    """
    a = check_table(a)
    b = check_table(b)
    if a.n != b.n:
        raise DomainError(f"tables of different sizes: {tuple(a)} vs {tuple(b)}")
    dx, dy, dz, dt = (b.x - a.x, b.y - a.y, b.z - a.z, b.t - a.t)
    return dx >= 0 and dx + dy >= 0 and dx + dz >= 0 and dt <= 0


def successors(a) -> list[ContingencyTable]:
    """Tables one move above ``a``; these are exactly the tables covering ``a``."""
    x, y, z, t = a
    out = []
    if y:
        out.append(ContingencyTable(x + 1, y - 1, z, t))
    if z:
        out.append(ContingencyTable(x + 1, y, z - 1, t))
    if t:
        out.append(ContingencyTable(x, y + 1, z, t - 1))
        out.append(ContingencyTable(x, y, z + 1, t - 1))
    return out


def rank(a) -> int:
    """Height in the order: every move raises ``2x + y + z`` by exactly one."""
    return 2 * a[0] + a[1] + a[2]


def canonical(a) -> ContingencyTable:
    """Representative of the transposition class of ``a`` (the one with y <= z)."""
    x, y, z, t = a
    return ContingencyTable(x, min(y, z), max(y, z), t)


def transposition_classes(n: int) -> list[ContingencyTable]:
    """Canonical representatives of ``{a, transpose(a)}``, lexicographically sorted."""
    return sorted({canonical(a) for a in enumerate_tables(n)})


def hasse_edges(n: int) -> set[tuple[ContingencyTable, ContingencyTable]]:
    """Covering relation of the quotient order on transposition classes."""
    edges = set()
    for c in transposition_classes(n):
        for rep in {c, transpose(c)}:
            for b in successors(rep):
                edges.add((c, canonical(b)))
    return edges
