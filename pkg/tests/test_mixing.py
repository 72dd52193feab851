import math
from fractions import Fraction
from math import factorial

import pytest

from shuffle_spectra.chain import exact_distances
from shuffle_spectra.errors import DomainError, ResourceLimitError
from shuffle_spectra.mixing import (
    CurveRow,
    DistanceCurve,
    l2_lower_sq,
    l2_upper_sq,
    l2_upper_sq_bounded,
    thresholds,
    tv_lower_asymptotic,
)
from shuffle_spectra.scalars import XFloat


class TestDistanceCurve:
    def test_channel_names_enforced(self):
        with pytest.raises(DomainError):
            CurveRow(0, 1.0, "bogus")

    def test_strictly_increasing_t_per_channel(self):
        rows = (CurveRow(0, 1.0, "tv_exact"), CurveRow(0, 0.5, "tv_exact"))
        with pytest.raises(DomainError):
            DistanceCurve(rows=rows)

    def test_interleaved_channels_allowed(self):
        rows = (
            CurveRow(0, 1.0, "tv_exact"),
            CurveRow(0, 2.0, "l2_exact"),
            CurveRow(1, 0.5, "tv_exact"),
        )
        curve = DistanceCurve(rows=rows)
        assert curve.channel("tv_exact") == {0: 1.0, 1: 0.5}


class TestL2UpperSq:
    def test_t0_counts_all_nontrivial_tableaux(self):
        for n, k in [(2, 1), (4, 2), (5, 1)]:
            curve = l2_upper_sq(n, k, [0])
            assert curve.channel("l2_upper_sq")[0] == factorial(n) - 1

    def test_two_cards(self):
        assert l2_upper_sq(2, 1, [1]).channel("l2_upper_sq")[1] == Fraction(1, 4)

    def test_three_cards_matches_exact_l2(self):
        assert l2_upper_sq(3, 1, [1]).channel("l2_upper_sq")[1] == Fraction(14, 9)

    @pytest.mark.parametrize("n", range(2, 7))
    def test_equals_chain_l2_at_k1(self, n):
        grid = list(range(0, 21))
        upper = l2_upper_sq(n, 1, grid).channel("l2_upper_sq")
        exact = exact_distances(n, 1, 20).channel("l2_exact")
        for t in grid:
            assert abs(float(upper[t]) - float(exact[t])) < 1e-9

    def test_meta_records_magnitude_check(self):
        curve = l2_upper_sq(4, 3, [0, 1])
        assert curve.meta["eig_magnitudes_ok"]
        assert 0.0 < curve.meta["max_abs_eig"] <= 1.0

    def test_float_mode_tracks_exact(self):
        grid = [0, 1, 5, 9]
        a = l2_upper_sq(5, 2, grid, exact=True).channel("l2_upper_sq")
        b = l2_upper_sq(5, 2, grid, exact=False).channel("l2_upper_sq")
        for t in grid:
            assert float(b[t]) == pytest.approx(float(a[t]), rel=1e-12)

    def test_non_increasing_in_t(self):
        grid = list(range(0, 30, 3))
        for n, k in [(5, 1), (7, 3)]:
            vals = l2_upper_sq(n, k, grid).channel("l2_upper_sq")
            seq = [vals[t] for t in grid]
            assert all(a >= b for a, b in zip(seq, seq[1:]))
            assert all(v >= 0 for v in seq)

    def test_guard(self):
        with pytest.raises(ResourceLimitError):
            l2_upper_sq(15, 1, [0])

    def test_bad_grid(self):
        with pytest.raises(DomainError):
            l2_upper_sq(3, 1, [])
        with pytest.raises(DomainError):
            l2_upper_sq(3, 1, [3, 1])


class TestL2LowerSq:
    def test_three_cards(self):
        assert l2_lower_sq(3, 1, [1]).channel("l2_lower_sq")[1] == Fraction(122, 81)

    def test_t0_is_squared_dimension(self):
        for n in (2, 5, 9):
            assert l2_lower_sq(n, 1, [0]).channel("l2_lower_sq")[0] == (n - 1) ** 2

    @pytest.mark.parametrize("n", range(2, 10))
    @pytest.mark.parametrize("k", [1, 2, 4])
    def test_dominated_by_upper_curve(self, n, k):
        grid = [0, 2, 10, 25, 50]
        lower = l2_lower_sq(n, k, grid, exact=False).channel("l2_lower_sq")
        upper = l2_upper_sq(n, k, grid, exact=False).channel("l2_upper_sq")
        for t in grid:
            assert float(lower[t]) <= float(upper[t]) * (1 + 1e-9)

    @pytest.mark.parametrize("n,k", [(10, 3), (12, 4)])
    def test_dominated_by_upper_curve_larger_n(self, n, k):
        grid = [0, 10, 50]
        lower = l2_lower_sq(n, k, grid, exact=False).channel("l2_lower_sq")
        upper = l2_upper_sq(n, k, grid, exact=False).channel("l2_upper_sq")
        for t in grid:
            assert float(lower[t]) <= float(upper[t]) * (1 + 1e-9)

    def test_large_n_at_half_mixing_time(self):
        n = 1000
        t = math.floor(0.5 * n * math.log(n) - n)
        value = l2_lower_sq(n, 1, [t]).channel("l2_lower_sq")[t]
        assert float(value) > math.exp(2)

    def test_real_k_supported_in_float_mode(self):
        value = l2_lower_sq(100, 10.5, [50], exact=False).channel("l2_lower_sq")[50]
        assert float(value) > 0

    def test_non_increasing_in_t(self):
        grid = list(range(0, 40, 4))
        vals = l2_lower_sq(30, 2, grid, exact=False).channel("l2_lower_sq")
        seq = [vals[t] for t in grid]
        assert all(a >= b for a, b in zip(seq, seq[1:]))


class TestL2UpperSqBounded:
    def test_t0_value(self):
        n, M = 6, 5
        curve = l2_upper_sq_bounded(n, 1, [0], M)
        expected = sum(Fraction(n ** (2 * m), factorial(m)) for m in range(1, M + 1))
        expected += factorial(n)
        got = curve.channel("l2_upper_sq_bounded")[0].to_float()
        assert got == pytest.approx(float(expected), rel=1e-12)

    def test_strata_table_reported(self):
        curve = l2_upper_sq_bounded(20, 1, [0, 10], 4)
        strata = curve.meta["strata"]
        assert [s["m"] for s in strata] == [1, 2, 3, 4, "tail"]
        assert curve.meta["eig_magnitudes_ok"]

    def test_monotone_non_increasing(self):
        n = 500
        grid = [0, 100, 1000, 3000, 5000, 8000]
        vals = l2_upper_sq_bounded(n, 1, grid, 30).channel("l2_upper_sq_bounded")
        seq = [vals[t] for t in grid]
        assert all(a >= b for a, b in zip(seq, seq[1:]))

    def test_huge_n_does_not_overflow(self):
        n = 10_000
        t = int(n * math.log(n))
        curve = l2_upper_sq_bounded(n, 1, [t], 10)
        value = curve.channel("l2_upper_sq_bounded")[t]
        assert isinstance(value, XFloat)
        assert math.isfinite(value.ln())

    def test_trunc_range(self):
        with pytest.raises(DomainError):
            l2_upper_sq_bounded(10, 1, [0], 0)
        with pytest.raises(DomainError):
            l2_upper_sq_bounded(10, 1, [0], 10)


class TestThresholds:
    def test_general_upper_example(self):
        ts = thresholds(100, 2, 1.0, 2.0, 1.0)
        assert ts.general_upper == pytest.approx(100 * math.log(100) + 200, rel=1e-12)

    def test_gamma_one_halves_the_log_term(self):
        ts = thresholds(50, 2, 1.0, 3.0, 1.0)
        assert ts.gamma_upper == pytest.approx(0.5 * 50 * math.log(50) + 150)

    def test_tv_lower_can_be_negative(self):
        ts = thresholds(100, 1, 1.0, 5.0, 1.0)
        expected = 100 * math.log(100) - 100 * math.log(math.log(100)) - 500
        assert ts.tv_lower == pytest.approx(expected)
        assert ts.tv_lower < 0

    def test_large_k_scale(self):
        assert thresholds(10, 1, 1.0, 0.0, 2.5).large_k_order == 100.0

    @pytest.mark.parametrize("gamma", [0.1, 0.5, 1.0])
    def test_gamma_upper_below_general_upper(self, gamma):
        for n in (3, 10, 1000):
            ts = thresholds(n, 2, gamma, 1.5, 1.0)
            assert ts.gamma_upper <= ts.general_upper

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            thresholds(2, 1, 1.0, 0.0, 0.0)
        with pytest.raises(DomainError):
            thresholds(10, 1, 1.5, 0.0, 0.0)
        with pytest.raises(DomainError):
            thresholds(10, 0, 1.0, 0.0, 0.0)


class TestTvLowerAsymptotic:
    def test_examples(self):
        assert tv_lower_asymptotic(8.0) == pytest.approx(1 - math.pi**2 / 96)
        assert tv_lower_asymptotic(4.0 + math.pi / math.sqrt(6)) == pytest.approx(0.0, abs=1e-12)
        assert tv_lower_asymptotic(1e9) == pytest.approx(1.0)

    def test_domain(self):
        with pytest.raises(DomainError):
            tv_lower_asymptotic(4.0)
        with pytest.raises(DomainError):
            tv_lower_asymptotic(2.0)
