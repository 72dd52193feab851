"""Ground truth at small n: exact step distribution, transition matrix,
a Jacobi eigensolver oracle, exact TV / l2 distances, and the
formula-vs-oracle spectrum comparison.

Permutations are tuples of images on 0..n-1; ``compose(p, q)`` applies q
first.  States are indexed by lexicographic rank, which coincides with the
Lehmer-code rank.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Optional

import numpy as np

from .errors import DomainError, NumericError, ResourceLimitError
from .mixing import CurveRow, DistanceCurve
from .spectrum import default_exact, spectrum_multiset, spectrum_table

Permutation = tuple[int, ...]

ENUMERATION_GUARD = 10_000_000  # n * n**k for direct tuple enumeration
CONVOLUTION_GUARD = 200_000_000  # n! * n * k for per-j convolution


def identity(n: int) -> Permutation:
    return tuple(range(n))

def compose(p: Permutation, q: Permutation) -> Permutation:
    """(p o q)(x) = p[q[x]] -- apply q first."""
    return tuple(p[v] for v in q)

def inverse(p: Permutation) -> Permutation:
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)

def _swap_values(p: Permutation, u: int, v: int) -> Permutation:
    """Left-compose the transposition (u v): relabel images u <-> v."""
    if u == v:
        return p
    return tuple(v if x == u else u if x == v else x for x in p)


def lehmer_rank(p: Permutation) -> int:
    """Lexicographic rank of p among all permutations of its length."""
    n = len(p)
    rank = 0
    for i in range(n):
        smaller = sum(1 for j in range(i + 1, n) if p[j] < p[i])
        rank += smaller * factorial(n - 1 - i)
    return rank


@dataclass(frozen=True)
class StepDistribution:
    """Exact law of a single shuffle step, as group elements with masses."""

    n: int
    k: int
    probs: dict[Permutation, Fraction]

    def __post_init__(self):
        total = sum(self.probs.values())
        if total != 1:
            raise DomainError(f"step distribution masses sum to {total}, not 1")

    def support(self) -> list[Permutation]:
        return sorted(self.probs)


def step_distribution(n: int, k: int, method: str = "auto") -> StepDistribution:
    """Law of (j; i_1, ..., i_k): j uniform on [n], each i_s uniform on [j].

    ``enumerate`` walks every tuple; ``convolve`` builds, for each j, the
    k-fold convolution of the single star-transposition law on the copy of
    S_j.  Both produce identical exact dictionaries; ``auto`` picks whichever
    guard admits, preferring the cheaper convolution.
    """
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    if k < 1:
        raise DomainError(f"need k >= 1, got {k}")
    enum_ok = n <= 8 and n * n**k <= ENUMERATION_GUARD
    conv_ok = n <= 8 and factorial(n) * n * k <= CONVOLUTION_GUARD
    if method == "auto":
        method = "convolve" if conv_ok else ("enumerate" if enum_ok else "none")
    if method == "enumerate" and not enum_ok:
        raise ResourceLimitError(
            f"step_distribution(enumerate) requires n <= 8 and n * n**k <= {ENUMERATION_GUARD}; "
            f"got n={n}, k={k}"
        )
    if method == "convolve" and not conv_ok:
        raise ResourceLimitError(
            f"step_distribution(convolve) requires n <= 8 and n! * n * k <= {CONVOLUTION_GUARD}; "
            f"got n={n}, k={k}"
        )
    if method == "none":
        raise ResourceLimitError(
            f"step_distribution requires n <= 8 and (n * n**k <= {ENUMERATION_GUARD} or "
            f"n! * n * k <= {CONVOLUTION_GUARD}); got n={n}, k={k}"
        )

    probs: dict[Permutation, Fraction] = {}
    if method == "enumerate":
        for j in range(1, n + 1):
            mass = Fraction(1, n * j**k)
            for tup in itertools.product(range(j), repeat=k):
                g = identity(n)
                for i in tup:  # (j; i_1..i_k) = (j i_k) o ... o (j i_1)
                    g = _swap_values(g, j - 1, i)
                probs[g] = probs.get(g, Fraction(0)) + mass
    else:
        for j in range(1, n + 1):
            star = Fraction(1, j)
            dist = {identity(n): Fraction(1)}
            for _ in range(k):
                nxt: dict[Permutation, Fraction] = {}
                for g, pr in dist.items():
                    share = pr * star
                    for i in range(j):
                        h = _swap_values(g, j - 1, i)
                        nxt[h] = nxt.get(h, Fraction(0)) + share
                dist = nxt
            scale = Fraction(1, n)
            for g, pr in dist.items():
                probs[g] = probs.get(g, Fraction(0)) + pr * scale
    return StepDistribution(n=n, k=k, probs=probs)


MATRIX_STATE_GUARD = 7  # n! <= 5040 states


def _states(n: int) -> list[Permutation]:
    return list(itertools.permutations(range(n)))


@dataclass
class ChainMatrix:
    n: int
    k: int
    exact: bool
    states: list[Permutation]
    rational: Optional[list[list[Fraction]]]
    dense: Optional[np.ndarray]


def transition_matrix(n: int, k: int, *, exact: Optional[bool] = None,
                      convention: str = "right") -> ChainMatrix:
    """M[x][y] = P(x^-1 y): symmetric, doubly stochastic.

    ``convention`` selects whether the sampled generator multiplies the
    state on the right (default) or the left; the two matrices are equal
    for this step law because P(g) = P(g^-1).
    """
    if n > MATRIX_STATE_GUARD:
        raise ResourceLimitError(
            f"transition_matrix requires n <= {MATRIX_STATE_GUARD} (n! states); got n={n}"
        )
    if convention not in ("right", "left"):
        raise DomainError(f"convention must be 'right' or 'left', got {convention!r}")
    dist = step_distribution(n, k)
    states = _states(n)
    index = {s: i for i, s in enumerate(states)}
    if exact is None:
        exact = n <= 5
    size = len(states)
    rational = [[Fraction(0)] * size for _ in range(size)] if exact else None
    dense = None if exact else np.zeros((size, size))
    for g, mass in dist.probs.items():
        mf = float(mass)
        for xi, x in enumerate(states):
            y = compose(x, g) if convention == "right" else compose(g, x)
            yi = index[y]
            if exact:
                rational[xi][yi] += mass
            else:
                dense[xi, yi] += mf
    return ChainMatrix(n=n, k=k, exact=exact, states=states,
                       rational=rational, dense=dense)


# -- Jacobi oracle -------------------------------------------------------------

_JACOBI_CACHE = {}


def _jacobi_kernel():
    """Compile the cyclic Jacobi sweep lazily (numba)."""
    if "fn" in _JACOBI_CACHE:
        return _JACOBI_CACHE["fn"]
    from numba import njit

    @njit(cache=True)
    def sweep_until(a, tol, max_sweeps):  # pragma: no cover - compiled
        n = a.shape[0]
        skip = tol * 1e-3
        for sweep in range(max_sweeps):
            off = 0.0
            for i in range(n - 1):
                for j in range(i + 1, n):
                    v = abs(a[i, j])
                    if v > off:
                        off = v
            if off < tol:
                return sweep, True
            for i in range(n - 1):
                for j in range(i + 1, n):
                    apq = a[i, j]
                    if abs(apq) <= skip:
                        continue
                    theta = (a[j, j] - a[i, i]) / (2.0 * apq)
                    if theta >= 0.0:
                        t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
                    else:
                        t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                    c = 1.0 / np.sqrt(t * t + 1.0)
                    s = t * c
                    tau = s / (1.0 + c)
                    aii = a[i, i]
                    ajj = a[j, j]
                    a[i, i] = aii - t * apq
                    a[j, j] = ajj + t * apq
                    a[i, j] = 0.0
                    a[j, i] = 0.0
                    for r in range(n):
                        if r != i and r != j:
                            ari = a[r, i]
                            arj = a[r, j]
                            a[r, i] = ari - s * (arj + tau * ari)
                            a[r, j] = arj + s * (ari - tau * arj)
                            a[i, r] = a[r, i]
                            a[j, r] = a[r, j]
        off = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                v = abs(a[i, j])
                if v > off:
                    off = v
        return max_sweeps, off < tol

    _JACOBI_CACHE["fn"] = sweep_until
    return sweep_until


JACOBI_MAX_SWEEPS = 100


def jacobi_eigenvalues(matrix: np.ndarray, tol: float = 1e-12,
                       max_sweeps: int = JACOBI_MAX_SWEEPS) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.

    Iterates whole sweeps until every off-diagonal magnitude is below tol;
    raises NumericError if the sweep cap is hit first.  Returns the diagonal
    sorted descending.
    """
    a = np.array(matrix, dtype=float, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"need a square matrix, got shape {a.shape}")
    if a.shape[0] == 1:
        return a.diagonal().copy()
    if not np.allclose(a, a.T, atol=1e-12):
        raise DomainError("matrix is not symmetric")
    _sweeps, converged = _jacobi_kernel()(a, tol, max_sweeps)
    if not converged:
        raise NumericError(
            f"Jacobi did not reach off-diagonal < {tol} within {max_sweeps} sweeps"
        )
    return np.sort(np.diagonal(a))[::-1].copy()


def oracle_spectrum(n: int, k: int, tol: float = 1e-12) -> np.ndarray:
    """All n! eigenvalues of the transition matrix, sorted descending."""
    chain = transition_matrix(n, k, exact=False)
    values = jacobi_eigenvalues(chain.dense, tol=tol)
    if abs(values[0] - 1.0) > max(tol, 1e-9):
        raise NumericError(f"largest oracle eigenvalue {values[0]!r} is not 1")
    return values


# -- exact distances -----------------------------------------------------------


def exact_distances(n: int, k: int, t_max: int, *, exact: Optional[bool] = None,
                    convention: str = "right") -> DistanceCurve:
    """TV and squared l2 distance from uniform for t = 0..t_max.

    TV(t) = (1/2) sum |P^t(id, y) - 1/n!| and
    l2_sq(t) = n! * sum (P^t(id, y) - 1/n!)**2, by repeated row-times-matrix
    multiplication; exact rationals at small n.
    """
    if t_max < 0:
        raise DomainError(f"t_max must be >= 0, got {t_max}")
    if exact is None:
        exact = n <= 5
    chain = transition_matrix(n, k, exact=exact, convention=convention)
    size = len(chain.states)
    rows: list[CurveRow] = []
    if exact:
        uniform = Fraction(1, size)
        dist = [Fraction(0)] * size
        dist[lehmer_rank(identity(n))] = Fraction(1)
        for t in range(t_max + 1):
            tv = sum(abs(p - uniform) for p in dist) / 2
            l2 = size * sum((p - uniform) ** 2 for p in dist)
            rows.append(CurveRow(t, tv, "tv_exact"))
            rows.append(CurveRow(t, l2, "l2_exact"))
            if t < t_max:
                matrix = chain.rational
                dist = [
                    sum(dist[x] * matrix[x][y] for x in range(size))
                    for y in range(size)
                ]
    else:
        uniform = 1.0 / size
        dist = np.zeros(size)
        dist[lehmer_rank(identity(n))] = 1.0
        for t in range(t_max + 1):
            tv = 0.5 * float(np.abs(dist - uniform).sum())
            l2 = size * float(((dist - uniform) ** 2).sum())
            rows.append(CurveRow(t, tv, "tv_exact"))
            rows.append(CurveRow(t, l2, "l2_exact"))
            if t < t_max:
                dist = dist @ chain.dense
    meta = {"n": n, "k": k, "t_max": t_max, "exact": exact, "convention": convention}
    return DistanceCurve(rows=tuple(rows), meta=meta)


# -- formula vs oracle ---------------------------------------------------------

COMPARE_GUARD = 6


@dataclass(frozen=True)
class SpectrumComparison:
    """Greedy sorted matching of the formula multiset against the oracle."""

    n: int
    k: int
    tolerance: float
    formula: tuple[tuple[float, int], ...]  # (eigenvalue, multiplicity) per tableau
    oracle: tuple[float, ...]  # sorted descending
    matched: int
    mismatches: tuple[tuple[float, float, float], ...]  # (formula, oracle, gap)
    max_abs_eig_formula: float
    max_abs_eig_oracle: float


def compare_spectra(n: int, k: int, tol: float = 1e-8) -> SpectrumComparison:
    """Match the tableau-formula spectrum against the Jacobi oracle.

    Mismatch is data, not an error: residual pairs beyond tol are reported
    in the result.
    """
    if n > COMPARE_GUARD:
        raise ResourceLimitError(
            f"compare_spectra requires n <= {COMPARE_GUARD}; got n={n}"
        )
    table = spectrum_table(n, k, exact=default_exact(n, k))
    per_tableau = tuple(
        (float(record.eigenvalue), entry.dim)
        for entry in table
        for record in entry.records
    )
    formula_values = sorted(spectrum_multiset(table), reverse=True)
    if len(formula_values) != factorial(n):
        raise NumericError(
            f"formula multiset has {len(formula_values)} entries, expected {factorial(n)}"
        )
    oracle_values = [float(v) for v in oracle_spectrum(n, k)]
    mismatches = []
    for f, o in zip(formula_values, oracle_values):
        gap = abs(f - o)
        if gap > tol:
            mismatches.append((f, o, gap))
    return SpectrumComparison(
        n=n,
        k=k,
        tolerance=tol,
        formula=per_tableau,
        oracle=tuple(oracle_values),
        matched=len(formula_values) - len(mismatches),
        mismatches=tuple(mismatches),
        max_abs_eig_formula=max(abs(v) for v in formula_values),
        max_abs_eig_oracle=max(abs(v) for v in oracle_values),
    )
