"""Eigenvalue machinery for the one-sided k-transposition shuffle.

Each standard Young tableau T of size n carries the eigenvalue

    eig(T) = (1/n) * sum_i nu(prefix_i, row_i)

where nu(pi, a) is the increment contributed by adding a box in row a to the
partition pi.  nu is a signed sum over weakly decreasing tuples; we evaluate
it by truncated power series instead of enumerating the tuples, which makes
a single evaluation O(a * k) big-int operations:

    sum over tuples of length l  ==  [x^l]  G_a(x) * prod_{i<a} H_i(x),
    G_a(x) = 1 / (1 - pi_a x),   H_i(x) = 1 - x / (1 - pi_i x),

then the l-th coefficients are contracted against C(k, l) / (|pi| + 1)**k.
A direct tuple-enumeration evaluator is kept as an independent reference.
All nu values are computed exactly; float mode converts afterwards, so
cached and uncached runs agree bit for bit.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb
from typing import Iterable, Optional

from .combinatorics import (
    GrowthSequence,
    Partition,
    dimension,
    enumerate_partitions,
)
from .errors import DomainError, ResourceLimitError

#: convention used throughout: 0**0 == 1 (Python's ** already honours it)


@dataclass(frozen=True)
class NuKey:
    """Argument triple of nu: partition, target row, transposition count."""

    pi: Partition
    a: int
    k: int

    def __post_init__(self):
        if not 1 <= self.a <= self.pi.length + 1:
            raise DomainError(f"row {self.a} out of range for partition of length {self.pi.length}")
        if self.k < 1:
            raise DomainError(f"k must be >= 1, got {self.k}")


def nu_exact(parts: tuple[int, ...], a: int, k: int) -> Fraction:
    """nu(pi, a) as an exact rational, via the series contraction."""
    if not 1 <= a <= len(parts) + 1:
        raise DomainError(f"row {a} out of range for partition {parts}")
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    coeffs = [0] * (k + 1)
    coeffs[0] = 1
    for i in range(1, a):
        p = parts[i - 1]
        # multiply by 1 / (1 - p x)
        for j in range(1, k + 1):
            coeffs[j] += p * coeffs[j - 1]
        # multiply by (1 - (p + 1) x)
        for j in range(k, 0, -1):
            coeffs[j] -= (p + 1) * coeffs[j - 1]
    p_a = parts[a - 1] if a <= len(parts) else 0
    if p_a:
        for j in range(1, k + 1):
            coeffs[j] += p_a * coeffs[j - 1]
    total = sum(comb(k, l) * coeffs[l] for l in range(k + 1))
    return Fraction(total, (sum(parts) + 1) ** k)


def nu(key: NuKey) -> Fraction:
    return nu_exact(key.pi.parts, key.a, key.k)


def nu_reference(parts: tuple[int, ...], a: int, k: int) -> Fraction:
    """Term-by-term enumeration of the defining sum; cross-check only.

    Enumerates every weakly decreasing tuple (a, x_1, ..., x_l), so it is
    exponentially slower than the series route and guarded accordingly.
    """
    if not 1 <= a <= len(parts) + 1:
        raise DomainError(f"row {a} out of range for partition {parts}")
    work = sum(comb(l + a - 1, l) for l in range(k + 1))
    if work > 2_000_000:
        raise ResourceLimitError(
            f"nu_reference enumerates {work} tuples (> 2e6); use nu_exact instead"
        )

    def part_of(i: int) -> int:
        return parts[i - 1] if i <= len(parts) else 0

    total = Fraction(0)
    for l in range(k + 1):
        inner = 0
        for tail in combinations_with_replacement(range(1, a + 1), l):
            values = (a,) + tuple(sorted(tail, reverse=True))
            distinct_non_a = len({x for x in values if x != a})
            term = 1
            for i in range(1, a + 1):
                d = max(0, values.count(i) - 1)
                term *= part_of(i) ** d
            inner += (-1) ** distinct_non_a * term
        total += comb(k, l) * inner
    return total / (sum(parts) + 1) ** k


def nu_components_exact(parts: tuple[int, ...], a: int, k: int) -> tuple[Fraction, ...]:
    """The signed components nu(pi, a, u) for u = 0..k; their sum is nu.

    Same series walk with a marker counting distinct non-a values; the sign
    (-1)**u rides along with the marker.
    """
    if not 1 <= a <= len(parts) + 1:
        raise DomainError(f"row {a} out of range for partition {parts}")
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    max_u = min(a - 1, k)
    table = [[0] * (k + 1) for _ in range(max_u + 1)]
    table[0][0] = 1
    for i in range(1, a):
        p = parts[i - 1]
        # multiply every marker row by 1 / (1 - p x)
        for row in table:
            for j in range(1, k + 1):
                row[j] += p * row[j - 1]
        # multiply by (1 - p x - t x): t tracks a new distinct non-a value
        for u in range(max_u, -1, -1):
            row = table[u]
            below = table[u - 1] if u >= 1 else None
            for j in range(k, 0, -1):
                row[j] -= p * row[j - 1]
                if below is not None:
                    row[j] -= below[j - 1]
    p_a = parts[a - 1] if a <= len(parts) else 0
    if p_a:
        for row in table:
            for j in range(1, k + 1):
                row[j] += p_a * row[j - 1]
    denom = (sum(parts) + 1) ** k
    out = [Fraction(0)] * (k + 1)
    for u in range(max_u + 1):
        out[u] = Fraction(sum(comb(k, l) * table[u][l] for l in range(k + 1)), denom)
    return tuple(out)


def nu_component(key: NuKey, u: int) -> Fraction:
    """The u-th signed component; zero whenever u >= a or u > k."""
    if u < 0:
        raise DomainError(f"u must be >= 0, got {u}")
    if u >= key.a or u > key.k:
        return Fraction(0)
    return nu_components_exact(key.pi.parts, key.a, key.k)[u]


# -- closed forms ------------------------------------------------------------


def nu_closed_a1(pi: Partition, k: int) -> Fraction:
    """nu(pi, 1) = ((pi_1 + 1) / (|pi| + 1))**k."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    return Fraction((pi.part(1) + 1) ** k, (pi.n + 1) ** k)


def nu_closed_a2_flat(pi: Partition, k: int) -> Fraction:
    """nu(pi, 2) for single-row pi: (1 - (p+1)**(k-1)) / (p (p+1)**(k-1)).

    The proof of this identity ends with a sign slip; the statement form is
    the one consistent with direct enumeration, and is what we use.
    """
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if pi.part(2) != 0 or pi.length != 1:
        raise DomainError(f"closed form needs a single-row partition, got {pi.parts}")
    p = pi.n
    return Fraction(1 - (p + 1) ** (k - 1), p * (p + 1) ** (k - 1))


def nu_closed_u0(pi: Partition, a: int, k: int) -> Fraction:
    """nu(pi, a, 0) = ((pi_a + 1) / (|pi| + 1))**k."""
    if not 1 <= a <= pi.length + 1:
        raise DomainError(f"row {a} out of range for partition {pi.parts}")
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    return Fraction((pi.part(a) + 1) ** k, (pi.n + 1) ** k)


# -- memo cache ---------------------------------------------------------------


class NuCache:
    """Per-run memo table for nu values, keyed by (partition, row).

    Values are always derived from the exact rational, so cached and
    uncached evaluations are identical; the float view is memoized too.
    Plain dict writes are atomic under the GIL and every writer computes
    the same value, so concurrent insert-if-absent is safe.
    """

    def __init__(self, k: int, enabled: bool = True):
        self.k = k
        self.enabled = enabled
        self._exact: dict[tuple[tuple[int, ...], int], Fraction] = {}
        self._float: dict[tuple[tuple[int, ...], int], float] = {}

    def exact(self, parts: tuple[int, ...], a: int) -> Fraction:
        if not self.enabled:
            return nu_exact(parts, a, self.k)
        key = (parts, a)
        value = self._exact.get(key)
        if value is None:
            value = nu_exact(parts, a, self.k)
            self._exact[key] = value
        return value

    def float(self, parts: tuple[int, ...], a: int) -> float:
        if not self.enabled:
            return float(nu_exact(parts, a, self.k))
        key = (parts, a)
        value = self._float.get(key)
        if value is None:
            value = float(self.exact(parts, a))
            self._float[key] = value
        return value

    def __len__(self):
        return len(self._exact)


def default_exact(n: int, k) -> bool:
    """Exact rationals whenever n <= 10 and k <= 16 (oracle scale)."""
    return n <= 10 and isinstance(k, int) and k <= 16


# -- eigenvalues and their decomposition --------------------------------------


def eigenvalue(tableau: GrowthSequence, k: int, *, exact: Optional[bool] = None,
               cache: Optional[NuCache] = None):
    """eig(T) = (1/n) sum of nu over the insertion walk of T."""
    n = tableau.n
    if exact is None:
        exact = default_exact(n, k)
    if cache is None:
        cache = NuCache(k)
    if cache.k != k:
        raise DomainError(f"cache built for k={cache.k}, called with k={k}")
    if exact:
        total = Fraction(0)
        for parts, a in tableau.steps():
            total += cache.exact(parts, a)
        return total / n
    total_f = 0.0
    for parts, a in tableau.steps():
        total_f += cache.float(parts, a)
    return total_f / n


def f_decomposition(tableau: GrowthSequence, k: int, *, exact: Optional[bool] = None,
                    cache: Optional[NuCache] = None):
    """Split eig(T) into the main term F0 and the error term F+.

    F0(T) = (1/n) sum over boxes (i, j) of j**k / T(i, j)**k, and
    F+ = eig(T) - F0 (exact in rational mode).
    """
    n = tableau.n
    if exact is None:
        exact = default_exact(n, k)
    eig = eigenvalue(tableau, k, exact=exact, cache=cache)
    if exact:
        f0 = Fraction(0)
        for _row, col, value in tableau.cells():
            f0 += Fraction(col**k, value**k)
        f0 /= n
    else:
        f0 = math.fsum((col / value) ** k for _row, col, value in tableau.cells()) / n
    return f0, eig - f0


def first_row_hook_eig(i: int, n: int, k, *, exact: Optional[bool] = None):
    """Closed form for the eigenvalue of the (n-1, 1) tableau with T(2,1) = i.

    eig(T_i) = 1 - (1/n) [ (i**k - 1)/((i-1) i**(k-1))
                           + sum_{j=i}^{n-1} ((j+1)**k - j**k)/(j+1)**k ].

    Float mode accepts real k >= 1 so the k = n**gamma curves can be
    evaluated without rounding k.
    """
    if not 2 <= i <= n:
        raise DomainError(f"i must lie in [2, n], got i={i}, n={n}")
    if exact is None:
        exact = default_exact(n, k)
    if exact:
        if not isinstance(k, int):
            raise DomainError("exact mode requires integer k")
        head = Fraction(i**k - 1, (i - 1) * i ** (k - 1))
        tail = sum(
            (Fraction((j + 1) ** k - j**k, (j + 1) ** k) for j in range(i, n)),
            Fraction(0),
        )
        return 1 - Fraction(1, n) * (head + tail)
    head_f = (i**k - 1.0) / ((i - 1) * i ** (k - 1.0))
    tail_f = math.fsum(1.0 - (j / (j + 1.0)) ** k for j in range(i, n))
    return 1.0 - (head_f + tail_f) / n


def first_row_hook_eigs_float(n: int, k) -> "np.ndarray":
    """Vectorized eig(T_i) for i = 2..n; O(n) via a suffix sum."""
    import numpy as np

    if n < 2:
        raise DomainError(f"need n >= 2, got {n}")
    j = np.arange(2, n, dtype=float)
    gaps = 1.0 - (j / (j + 1.0)) ** k  # term for j = 2..n-1
    suffix = np.zeros(n + 1)
    if len(gaps):
        suffix[2:n] = np.cumsum(gaps[::-1])[::-1]
    i = np.arange(2, n + 1, dtype=float)
    head = (i**k - 1.0) / ((i - 1.0) * i ** (k - 1.0))
    return 1.0 - (head + suffix[2 : n + 1]) / n


def t_arrow(shape: Partition, s: int) -> GrowthSequence:
    """The left-to-right filled tableau of ``shape`` with T(2, 1) = s.

    Values 1..n are inserted in reading order except that s is reserved for
    box (2, 1); the result is always a valid SYT for 2 <= s <= shape_1 + 1.
    """
    if shape.length < 2:
        raise DomainError(f"t_arrow needs at least two rows, got {shape.parts}")
    if not 2 <= s <= shape.first_part + 1:
        raise DomainError(f"s must lie in [2, {shape.first_part + 1}], got {s}")
    n = shape.n
    row_of_value = [0] * (n + 1)
    row_of_value[s] = 2
    fill = 0
    for row_idx, row_len in enumerate(shape.parts, start=1):
        for col in range(1, row_len + 1):
            if (row_idx, col) == (2, 1):
                continue
            fill += 1
            while fill == s or row_of_value[fill]:
                fill += 1
            row_of_value[fill] = row_idx
    return GrowthSequence(tuple(row_of_value[1:]))


def raven_bound(n: int, m: int, c_constant: float = 0.0) -> float:
    """Per-stratum upper bound on |eig(T)| over shapes with first part n - m.

    ``c_constant`` stands in for the O(1/n^2) term of the m <= n/2 branch
    (the bound is asymptotic and fixes no constant; 0 gives the documented
    approximation).
    """
    if not 1 <= m <= n - 1:
        raise DomainError(f"m must lie in [1, n-1], got m={m}, n={n}")
    if c_constant < 0:
        raise DomainError(f"constant must be >= 0, got {c_constant}")
    if 2 * m <= n:
        body = math.fsum((j - 1) / (n - m + j) for j in range(1, m + 1))
        return (n - m) / n + body / n + c_constant / n**2
    body = math.fsum((j - 1) / (n - m + j) for j in range(2, n - m + 1))
    return (n - m) / n + body / n + (n - 2 * (n - m)) / (3.0 * n)


# -- whole-spectrum sweeps -----------------------------------------------------


@dataclass(frozen=True)
class TableauRecord:
    rows: tuple[int, ...]
    eigenvalue: object  # Fraction in exact mode, float otherwise
    f0: object

    @property
    def f_plus(self):
        return self.eigenvalue - self.f0


@dataclass(frozen=True)
class ShapeSpectrum:
    shape: Partition
    dim: int
    records: tuple[TableauRecord, ...]


def shape_spectrum(parts: tuple[int, ...], k: int, exact: bool,
                   cache: Optional[NuCache] = None) -> ShapeSpectrum:
    """All tableau records of one shape, lexicographic in the row sequence.

    A single DFS over the insertion tree computes eig and F0 together, so
    shared prefixes are folded once.
    """
    if cache is None:
        cache = NuCache(k)
    n = sum(parts)
    nrows = len(parts)
    counts = [0] * nrows
    rows_buf = [0] * n
    records: list[TableauRecord] = []
    lookup = cache.exact if exact else cache.float
    zero = Fraction(0) if exact else 0.0

    def rec(i: int, depth: int, nu_sum, f0_sum):
        if i == n:
            records.append(
                TableauRecord(tuple(rows_buf), nu_sum / n, f0_sum / n)
            )
            return
        value = i + 1
        for a in range(1, nrows + 1):
            filled = counts[a - 1]
            if filled >= parts[a - 1]:
                continue
            if a > 1 and filled >= counts[a - 2]:
                continue
            nu_val = lookup(tuple(counts[:depth]), a)
            col = filled + 1
            if exact:
                f0_term = Fraction(col**k, value**k)
            else:
                f0_term = (col / value) ** k
            counts[a - 1] += 1
            rows_buf[i] = a
            rec(i + 1, max(depth, a), nu_sum + nu_val, f0_sum + f0_term)
            counts[a - 1] -= 1

    rec(0, 0, zero, zero)
    return ShapeSpectrum(Partition(parts), dimension(Partition(parts)), tuple(records))


def _shape_spectrum_worker(args: tuple[tuple[int, ...], int, bool]) -> ShapeSpectrum:
    parts, k, exact = args
    cache = _worker_caches.get(k)
    if cache is None:
        cache = NuCache(k)
        _worker_caches[k] = cache
    return shape_spectrum(parts, k, exact, cache)


_worker_caches: dict[int, NuCache] = {}


def resolve_workers(explicit: Optional[int] = None) -> int:
    """Worker count: explicit arg, else SHUFFLE_SPECTRA_THREADS, else cores."""
    if explicit is not None:
        return max(1, explicit)
    env = os.environ.get("SHUFFLE_SPECTRA_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise DomainError(f"SHUFFLE_SPECTRA_THREADS must be an integer, got {env!r}") from exc
    return os.cpu_count() or 1


def spectrum_table(n: int, k: int, *, exact: Optional[bool] = None,
                   cache_enabled: bool = True,
                   workers: int = 1) -> list[ShapeSpectrum]:
    """The full spectrum, one ShapeSpectrum per partition in canonical order.

    Shapes may be fanned out to worker processes; results are reassembled in
    canonical order so float reductions stay bit-reproducible.
    """
    if n < 1:
        raise DomainError(f"spectrum_table needs n >= 1, got {n}")
    if exact is None:
        exact = default_exact(n, k)
    shapes = enumerate_partitions(n)
    if workers > 1 and len(shapes) > 1:
        jobs = [(shape.parts, k, exact) for shape in shapes]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_shape_spectrum_worker, jobs))
    cache = NuCache(k, enabled=cache_enabled)
    return [shape_spectrum(shape.parts, k, exact, cache) for shape in shapes]


def spectrum_multiset(table: Iterable[ShapeSpectrum]) -> list[float]:
    """Every eigenvalue repeated with its multiplicity d(shape), as floats."""
    values: list[float] = []
    for entry in table:
        for record in entry.records:
            values.extend([float(record.eigenvalue)] * entry.dim)
    return values


def involution_count(n: int) -> int:
    """Total number of SYT of size n (sum of dimensions)."""
    return sum(dimension(shape) for shape in enumerate_partitions(n))
