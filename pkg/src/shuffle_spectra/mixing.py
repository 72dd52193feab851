"""Distance-bound curves and threshold arithmetic built from the formula
spectrum.

Times are real-valued here ("log" is always the natural logarithm); flooring
to integer step counts happens at the CLI layer.  Squared-l2 curves carry the
exponent 2t throughout -- the lower-bound display drops it, its proof does
not.  Powers are taken by repeated squaring on exponent-tracked floats so
curves stay meaningful at t ~ 1e4 where doubles would underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, ResourceLimitError
from .scalars import XFloat, as_float
from .spectrum import (
    default_exact,
    first_row_hook_eig,
    first_row_hook_eigs_float,
    raven_bound,
    spectrum_table,
)

CHANNELS = (
    "l2_upper_sq",
    "l2_upper_sq_bounded",
    "l2_lower_sq",
    "tv_exact",
    "l2_exact",
    "mc_lower",
)

#: largest n for which the full-tableau upper curve is enumerable
UPPER_CURVE_GUARD = 14

#: |eig| may exceed 1 only by numerical fuzz; curves record the check
EIG_MAGNITUDE_SLACK = 1e-9


@dataclass(frozen=True)
class CurveRow:
    t: int
    value: object  # Fraction, float or XFloat
    channel: str

    def __post_init__(self):
        if self.channel not in CHANNELS:
            raise DomainError(f"unknown curve channel {self.channel!r}")
        if self.t < 0:
            raise DomainError(f"t must be >= 0, got {self.t}")


@dataclass(frozen=True)
class DistanceCurve:
    rows: tuple[CurveRow, ...]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        last: dict[str, int] = {}
        for row in self.rows:
            if row.channel in last and row.t <= last[row.channel]:
                raise DomainError(f"t not strictly increasing in channel {row.channel}")
            last[row.channel] = row.t

    def channel(self, name: str) -> dict[int, object]:
        return {row.t: row.value for row in self.rows if row.channel == name}


def _validate_grid(t_grid: Sequence[int]) -> list[int]:
    grid = list(t_grid)
    if not grid:
        raise DomainError("t grid is empty")
    if any(t < 0 for t in grid):
        raise DomainError(f"t grid must be non-negative: {grid}")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError(f"t grid must be strictly increasing: {grid}")
    return grid


def _power_sum_rows(weights: list[int], eigs_exact, grid: list[int], channel: str):
    rows = []
    for t in grid:
        total = Fraction(0)
        for w, eig in zip(weights, eigs_exact):
            total += w * eig ** (2 * t)
        rows.append(CurveRow(t, total, channel))
    return rows


def _power_sum_rows_float(weights: np.ndarray, eigs: np.ndarray, grid: list[int],
                          channel: str):
    """Stable log-sum-exp evaluation of sum w * |eig|**(2t) as XFloats."""
    mags = np.abs(eigs)
    positive = mags > 0.0
    logs = np.full(mags.shape, -np.inf)
    logs[positive] = np.log(mags[positive])
    rows = []
    for t in grid:
        if t == 0:
            total = float(weights.sum())  # 0**0 == 1: every tableau counts
            rows.append(CurveRow(t, XFloat(total), channel))
            continue
        exponents = 2.0 * t * logs[positive]
        if exponents.size == 0:
            rows.append(CurveRow(t, XFloat(0.0), channel))
            continue
        top = exponents.max()
        body = float((weights[positive] * np.exp(exponents - top)).sum())
        if body == 0.0:
            rows.append(CurveRow(t, XFloat(0.0), channel))
        else:
            rows.append(CurveRow(t, XFloat.from_ln(top + math.log(body)), channel))
    return rows


def l2_upper_sq(n: int, k: int, t_grid: Sequence[int], *,
                exact: Optional[bool] = None, workers: int = 1) -> DistanceCurve:
    """sum over shapes != (n) of d * sum_T eig(T)**(2t): the central bound.

    Eigenvalues are computed once and powered per grid point, in canonical
    shape-then-tableau order.
    """
    grid = _validate_grid(t_grid)
    if n > UPPER_CURVE_GUARD:
        raise ResourceLimitError(
            f"l2_upper_sq enumerates all SYT and requires n <= {UPPER_CURVE_GUARD}; got n={n}"
        )
    if exact is None:
        exact = default_exact(n, k)
    table = spectrum_table(n, k, exact=exact, workers=workers)
    weights: list[int] = []
    eigs: list = []
    for entry in table:
        if entry.shape.parts == (n,):
            continue
        for record in entry.records:
            weights.append(entry.dim)
            eigs.append(record.eigenvalue)
    max_abs = max((abs(as_float(e)) for e in eigs), default=0.0)
    meta = {
        "n": n,
        "k": k,
        "exact": exact,
        "max_abs_eig": max_abs,
        "eig_magnitudes_ok": max_abs <= 1.0 + EIG_MAGNITUDE_SLACK,
    }
    if exact:
        rows = _power_sum_rows(weights, eigs, grid, "l2_upper_sq")
    else:
        rows = _power_sum_rows_float(
            np.array(weights, dtype=float), np.array(eigs, dtype=float),
            grid, "l2_upper_sq",
        )
    return DistanceCurve(rows=tuple(rows), meta=meta)


def l2_lower_sq(n: int, k, t_grid: Sequence[int], *,
                exact: Optional[bool] = None) -> DistanceCurve:
    """(n - 1) * sum_{i=2..n} eig(T_i)**(2t) over the (n-1, 1) stratum.

    O(n) per grid point; float mode accepts real k (the k = n**gamma
    regimes).  The 2t exponent follows the proof, not the display.
    """
    grid = _validate_grid(t_grid)
    if n < 2:
        raise DomainError(f"l2_lower_sq needs n >= 2, got {n}")
    if exact is None:
        exact = default_exact(n, k) and n <= 64
    if exact:
        eigs = [first_row_hook_eig(i, n, k, exact=True) for i in range(2, n + 1)]
        weights = [n - 1] * len(eigs)
        rows = _power_sum_rows(weights, eigs, grid, "l2_lower_sq")
        max_abs = max(abs(float(e)) for e in eigs)
    else:
        eig_arr = first_row_hook_eigs_float(n, k)
        weights = np.full(eig_arr.shape, float(n - 1))
        rows = _power_sum_rows_float(weights, eig_arr, grid, "l2_lower_sq")
        max_abs = float(np.abs(eig_arr).max())
    meta = {
        "n": n,
        "k": k,
        "exact": exact,
        "max_abs_eig": max_abs,
        "eig_magnitudes_ok": max_abs <= 1.0 + EIG_MAGNITUDE_SLACK,
    }
    return DistanceCurve(rows=tuple(rows), meta=meta)


def l2_upper_sq_bounded(n: int, k: int, t_grid: Sequence[int], trunc_m: int,
                        c_constant: float = 0.0) -> DistanceCurve:
    """Closed-form upper curve: stratum masses n**(2m)/m! times the
    per-stratum eigenvalue bound, plus the very-small-first-part tail
    n! * e**(-2t).

    Every stratum is reported in the metadata so the truncation is never
    silent; computable for n up to 1e4.
    """
    grid = _validate_grid(t_grid)
    if not 1 <= trunc_m <= n - 1:
        raise DomainError(f"trunc_m must lie in [1, n-1], got {trunc_m} for n={n}")
    strata = []
    for m in range(1, trunc_m + 1):
        weight = XFloat.from_fraction(Fraction(n ** (2 * m), factorial(m)))
        rate = raven_bound(n, m, c_constant)
        strata.append((m, weight, rate))
    tail_weight = XFloat.from_fraction(factorial(n))
    max_rate = max(rate for _m, _w, rate in strata)
    rows = []
    for t in grid:
        total = XFloat(0.0)
        for _m, weight, rate in strata:
            total = total + weight * XFloat.from_ln(2.0 * t * math.log(rate))
        total = total + tail_weight * XFloat.from_ln(-2.0 * t)
        rows.append(CurveRow(t, total, "l2_upper_sq_bounded"))
    meta = {
        "n": n,
        "k": k,
        "trunc_m": trunc_m,
        "c_constant": c_constant,
        "max_abs_eig": max_rate,
        "eig_magnitudes_ok": max_rate <= 1.0 + EIG_MAGNITUDE_SLACK,
        "strata": [
            {"m": m, "weight": w.decimal17(), "rate": f"{r:.17g}"}
            for m, w, r in strata
        ]
        + [{"m": "tail", "weight": tail_weight.decimal17(), "rate": f"{math.exp(-1.0):.17g}"}],
    }
    return DistanceCurve(rows=tuple(rows), meta=meta)


# -- theorem thresholds ---------------------------------------------------------


@dataclass(frozen=True)
class ThresholdSet:
    """The named mixing-time scales, as reals (caller floors to steps)."""

    general_upper: float      # n log n + c n
    gamma_upper: float        # (1 - gamma/2) n log n + c n
    l2_lower_general: float   # (1/2) n log n - c n
    l2_lower_gamma: float     # (1 - gamma/2) n log n - (1/2) n log log n - c n
    tv_lower: float           # n log(n/k) - n log log n - c n
    large_k_order: float      # 4 d n (coupling time scale for huge k)


def thresholds(n: int, k, gamma: float, c: float, d: float) -> ThresholdSet:
    if n < 3:
        raise DomainError(f"thresholds needs n >= 3 so log log n > 0; got n={n}")
    if not 0.0 < gamma <= 1.0:
        raise DomainError(f"gamma must lie in (0, 1], got {gamma}")
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    log_n = math.log(n)
    log_log_n = math.log(log_n)
    return ThresholdSet(
        general_upper=n * log_n + c * n,
        gamma_upper=(1.0 - gamma / 2.0) * n * log_n + c * n,
        l2_lower_general=0.5 * n * log_n - c * n,
        l2_lower_gamma=(1.0 - gamma / 2.0) * n * log_n - 0.5 * n * log_log_n - c * n,
        tv_lower=n * math.log(n / k) - n * log_log_n - c * n,
        large_k_order=4.0 * d * n,
    )


def tv_lower_asymptotic(c: float) -> float:
    """liminf of the TV distance at the coupon-collector time: 1 - pi^2 / (6 (c-4)^2)."""
    if c <= 4.0:
        raise DomainError(f"tv_lower_asymptotic needs c > 4, got {c}")
    return 1.0 - math.pi**2 / (6.0 * (c - 4.0) ** 2)
