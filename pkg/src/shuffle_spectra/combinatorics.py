"""Partitions, standard Young tableaux and the counting utilities that
index the shuffle spectrum.

A tableau is carried as its row-insertion sequence: the list of row indices
a(0), ..., a(n-1) such that step i adds one box to row a(i) of the growing
diagram.  This makes the eigenvalue walk a plain fold over the sequence and
keeps enumeration lexicographic.  All counts use Python's unbounded ints.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterator, Optional

from .errors import DomainError


@dataclass(frozen=True)
class Partition:
    """A weakly decreasing tuple of positive integers."""

    parts: tuple[int, ...]

    def __post_init__(self):
        prev = None
        for p in self.parts:
            if not isinstance(p, int) or p < 1:
                raise DomainError(f"partition parts must be positive integers: {self.parts}")
            if prev is not None and p > prev:
                raise DomainError(f"partition parts must be weakly decreasing: {self.parts}")
            prev = p

    @property
    def n(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    @property
    def first_part(self) -> int:
        return self.parts[0] if self.parts else 0

    def part(self, i: int) -> int:
        """1-indexed part lookup; rows beyond the length have size 0."""
        if i < 1:
            raise DomainError(f"part index must be >= 1, got {i}")
        return self.parts[i - 1] if i <= len(self.parts) else 0

    def conjugate(self) -> "Partition":
        if not self.parts:
            return EMPTY_PARTITION
        cols = [sum(1 for p in self.parts if p > j) for j in range(self.parts[0])]
        return Partition(tuple(cols))

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)

    def __str__(self):
        return "-".join(str(p) for p in self.parts) if self.parts else "()"


EMPTY_PARTITION = Partition(())


@dataclass(frozen=True)
class GrowthSequence:
    """A standard Young tableau, encoded as its row-insertion sequence.

    ``rows[i]`` is the (1-indexed) row that receives value i + 1.  Every
    prefix of the implied diagram must remain a partition, which is exactly
    the condition that the induced filling increases along rows and columns.
    """

    rows: tuple[int, ...]
    _counts: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.rows:
            raise DomainError("growth sequence must have length >= 1")
        counts: list[int] = []
        for i, a in enumerate(self.rows):
            if not isinstance(a, int) or a < 1:
                raise DomainError(f"row indices must be integers >= 1: {self.rows}")
            if a > len(counts) + 1:
                raise DomainError(f"step {i} adds to row {a} but only {len(counts)} rows exist")
            if a == len(counts) + 1:
                counts.append(0)
            if a > 1 and counts[a - 1] >= counts[a - 2]:
                raise DomainError(f"step {i} would break weak decrease at row {a}: {self.rows}")
            counts[a - 1] += 1
        object.__setattr__(self, "_counts", tuple(counts))

    @property
    def n(self) -> int:
        return len(self.rows)

    def shape(self) -> Partition:
        return Partition(self._counts)

    def steps(self) -> Iterator[tuple[tuple[int, ...], int]]:
        """Yield (prefix partition parts, row index) for each insertion."""
        counts: list[int] = []
        for a in self.rows:
            yield tuple(counts), a
            if a == len(counts) + 1:
                counts.append(1)
            else:
                counts[a - 1] += 1

    def cells(self) -> Iterator[tuple[int, int, int]]:
        """Yield (row, column, value) for each box, in insertion order."""
        counts: list[int] = []
        for i, a in enumerate(self.rows):
            if a == len(counts) + 1:
                counts.append(0)
            counts[a - 1] += 1
            yield a, counts[a - 1], i + 1

    def cell_values(self) -> list[list[int]]:
        """The filling T(i, j) as a list of rows."""
        table: list[list[int]] = []
        for a, _j, value in self.cells():
            if a > len(table):
                table.append([])
            table[a - 1].append(value)
        return table

    def t21(self) -> Optional[int]:
        """T(2, 1): the first value placed outside row one, or None."""
        for i, a in enumerate(self.rows):
            if a == 2:
                return i + 1
        return None


def enumerate_partitions(n: int) -> list[Partition]:
    """All partitions of n in reverse-lexicographic order, (n) first."""
    if n < 1:
        raise DomainError(f"enumerate_partitions needs n >= 1, got {n}")
    return [Partition(parts) for parts in _partition_tuples(n, n)]


def _partition_tuples(n: int, max_part: int) -> Iterator[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in _partition_tuples(n - first, first):
            yield (first,) + rest


def partitions_with_first_part(n: int, first: int) -> list[Partition]:
    """Partitions of n whose first part equals ``first``."""
    if first < 1 or first > n:
        return []
    return [
        Partition((first,) + rest)
        for rest in _partition_tuples(n - first, first)
    ]


def dimension(shape: Partition) -> int:
    """Number of standard Young tableaux of the given shape.

    Hook-length formula, exact integer arithmetic throughout.
    """
    parts = shape.parts
    if not parts:
        return 1
    conj = shape.conjugate().parts
    hooks = 1
    for i, row_len in enumerate(parts):
        for j in range(row_len):
            hooks *= (row_len - j) + (conj[j] - i) - 1
    return factorial(shape.n) // hooks


def enumerate_growth_sequences(shape: Partition) -> Iterator[GrowthSequence]:
    """Every SYT of the given shape, lexicographic in the row sequence."""
    parts = shape.parts
    if not parts:
        return
    n = shape.n
    counts = [0] * len(parts)
    rows = [0] * n

    def rec(i: int) -> Iterator[GrowthSequence]:
        if i == n:
            yield GrowthSequence(tuple(rows))
            return
        for a in range(1, len(parts) + 1):
            if counts[a - 1] >= parts[a - 1]:
                continue
            if a > 1 and counts[a - 1] >= counts[a - 2]:
                continue
            counts[a - 1] += 1
            rows[i] = a
            yield from rec(i + 1)
            counts[a - 1] -= 1

    yield from rec(0)


@dataclass(frozen=True)
class DimSquareMass:
    """Sum of squared dimensions over shapes with a fixed first part,
    together with the comparison against n**(2m) / m!."""

    n: int
    m: int
    mass: int
    bound: Fraction
    within_bound: Optional[bool]  # None for m = 0 (no claim is made there)


def dim_square_mass(n: int, m: int) -> DimSquareMass:
    """Sum of d(shape)**2 over shapes of n with first part n - m."""
    if n < 1:
        raise DomainError(f"dim_square_mass needs n >= 1, got {n}")
    if not 0 <= m <= n - 1:
        raise DomainError(f"m must lie in [0, n-1], got m={m} for n={n}")
    mass = sum(dimension(shape) ** 2 for shape in partitions_with_first_part(n, n - m))
    bound = Fraction(n ** (2 * m), factorial(m))
    within = (mass < bound) if m >= 1 else None
    return DimSquareMass(n=n, m=m, mass=mass, bound=bound, within_bound=within)


def count_by_t21(shape: Partition, threshold: int) -> int:
    """Number of SYT of ``shape`` whose T(2, 1) exceeds ``threshold``.

    T(2, 1) = s forces values 1..s-1 into the first row, so the count for a
    fixed s is the number of saturated chains from the diagram (s-1, 1) up
    to ``shape`` in Young's lattice; those are summed over s > threshold.
    """
    if threshold < 1:
        raise DomainError(f"threshold must be >= 1, got {threshold}")
    if shape.length < 2:
        return 0
    total = 0
    for s in range(max(threshold + 1, 2), shape.first_part + 2):
        total += _chain_count(shape.parts, (s - 1, 1))
    return total


@lru_cache(maxsize=None)
def _chain_count(target: tuple[int, ...], start: tuple[int, ...]) -> int:
    """Saturated chains from ``start`` to ``target`` in Young's lattice."""
    if any(start[i] > (target[i] if i < len(target) else 0) for i in range(len(start))):
        return 0
    if sum(start) == sum(target):
        return 1 if start == target else 0
    total = 0
    for r in range(len(start) + 1):
        cur = start[r] if r < len(start) else 0
        above = start[r - 1] if r >= 1 else None
        if above is not None and cur >= above:
            continue
        if cur >= (target[r] if r < len(target) else 0):
            continue
        grown = list(start)
        if r == len(start):
            grown.append(1)
        else:
            grown[r] += 1
        total += _chain_count(target, tuple(grown))
    return total
