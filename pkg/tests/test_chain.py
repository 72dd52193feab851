from fractions import Fraction
from math import factorial

import numpy as np
import pytest

from shuffle_spectra.chain import (
    compare_spectra,
    compose,
    exact_distances,
    identity,
    inverse,
    jacobi_eigenvalues,
    lehmer_rank,
    oracle_spectrum,
    step_distribution,
    transition_matrix,
)
from shuffle_spectra.errors import DomainError, NumericError, ResourceLimitError


class TestPermutations:
    def test_compose_and_inverse(self):
        p = (1, 2, 0)
        q = (0, 2, 1)
        assert compose(p, q) == (1, 0, 2)
        assert compose(p, inverse(p)) == identity(3)

    def test_lehmer_rank_is_lexicographic(self):
        import itertools

        perms = list(itertools.permutations(range(4)))
        assert [lehmer_rank(p) for p in perms] == list(range(24))


class TestStepDistribution:
    def test_two_cards_two_transpositions(self):
        d = step_distribution(2, 2)
        assert d.probs == {(0, 1): Fraction(3, 4), (1, 0): Fraction(1, 4)}

    def test_three_cards_one_transposition(self):
        d = step_distribution(3, 1)
        assert d.probs[(0, 1, 2)] == Fraction(11, 18)
        assert d.probs[(1, 0, 2)] == Fraction(1, 6)
        assert d.probs[(2, 1, 0)] == Fraction(1, 9)
        assert d.probs[(0, 2, 1)] == Fraction(1, 9)

    def test_single_card(self):
        assert step_distribution(1, 5).probs == {(0,): Fraction(1)}

    @pytest.mark.parametrize("n", range(1, 6))
    @pytest.mark.parametrize("k", range(1, 5))
    def test_mass_one_and_inversion_symmetry(self, n, k):
        d = step_distribution(n, k)
        assert sum(d.probs.values()) == 1
        for g, p in d.probs.items():
            assert d.probs[inverse(g)] == p

    def test_methods_agree(self):
        for n in (2, 3, 4):
            for k in (1, 2, 3):
                assert (
                    step_distribution(n, k, "enumerate").probs
                    == step_distribution(n, k, "convolve").probs
                )

    def test_big_k_uses_convolution(self):
        d = step_distribution(4, 64)
        assert sum(d.probs.values()) == 1

    def test_guards(self):
        with pytest.raises(ResourceLimitError):
            step_distribution(9, 1)
        with pytest.raises(ResourceLimitError):
            step_distribution(8, 8, "enumerate")  # 8 * 8**8 tuples
        with pytest.raises(ResourceLimitError):
            step_distribution(8, 5000)
        with pytest.raises(DomainError):
            step_distribution(0, 1)


class TestTransitionMatrix:
    def test_two_card_matrix(self):
        m = transition_matrix(2, 1)
        assert m.rational == [
            [Fraction(3, 4), Fraction(1, 4)],
            [Fraction(1, 4), Fraction(3, 4)],
        ]

    @pytest.mark.parametrize("n,k", [(2, 1), (3, 1), (3, 2), (4, 1)])
    def test_symmetric_doubly_stochastic_exact(self, n, k):
        m = transition_matrix(n, k, exact=True)
        size = len(m.states)
        for i in range(size):
            assert sum(m.rational[i]) == 1
            for j in range(i, size):
                assert m.rational[i][j] == m.rational[j][i]
        cols = [sum(m.rational[i][j] for i in range(size)) for j in range(size)]
        assert all(c == 1 for c in cols)

    def test_diagonal_is_identity_mass(self):
        m = transition_matrix(3, 1, exact=True)
        d = step_distribution(3, 1)
        for i in range(6):
            assert m.rational[i][i] == d.probs[(0, 1, 2)]

    def test_guard(self):
        with pytest.raises(ResourceLimitError):
            transition_matrix(8, 1)


class TestJacobi:
    def test_known_two_by_two(self):
        vals = jacobi_eigenvalues(np.array([[0.75, 0.25], [0.25, 0.75]]))
        assert vals == pytest.approx([1.0, 0.5])

    def test_against_numpy_on_random_symmetric(self):
        rng = np.random.default_rng(7)
        a = rng.normal(size=(40, 40))
        a = (a + a.T) / 2
        ours = jacobi_eigenvalues(a.copy())
        ref = np.sort(np.linalg.eigvalsh(a))[::-1]
        assert ours == pytest.approx(ref, abs=1e-10)

    def test_rejects_asymmetric(self):
        with pytest.raises(DomainError):
            jacobi_eigenvalues(np.array([[0.0, 1.0], [0.5, 0.0]]))

    def test_sweep_cap_raises(self):
        rng = np.random.default_rng(3)
        a = rng.normal(size=(12, 12))
        a = (a + a.T) / 2
        with pytest.raises(NumericError):
            jacobi_eigenvalues(a, max_sweeps=1)


class TestOracleSpectrum:
    def test_examples(self):
        assert oracle_spectrum(2, 2) == pytest.approx([1.0, 0.5])
        assert oracle_spectrum(1, 3) == pytest.approx([1.0])
        expected = [1, 2 / 3, 2 / 3, 5 / 9, 5 / 9, 2 / 9]
        assert oracle_spectrum(3, 1) == pytest.approx(expected, abs=1e-10)

    def test_trace_matches_identity_mass(self):
        for n, k in [(3, 2), (4, 1)]:
            spec = oracle_spectrum(n, k)
            d = step_distribution(n, k)
            assert spec.sum() == pytest.approx(
                factorial(n) * float(d.probs[identity(n)]), abs=1e-8
            )


class TestExactDistances:
    def test_point_mass_start(self):
        for n, k in [(2, 1), (3, 2), (4, 1)]:
            curve = exact_distances(n, k, 0)
            assert curve.channel("tv_exact")[0] == 1 - Fraction(1, factorial(n))

    def test_two_card_geometric_decay(self):
        curve = exact_distances(2, 1, 3)
        tv = curve.channel("tv_exact")
        assert [tv[t] for t in range(4)] == [
            Fraction(1, 2), Fraction(1, 4), Fraction(1, 8), Fraction(1, 16),
        ]

    def test_l2_example(self):
        curve = exact_distances(3, 1, 1)
        assert curve.channel("l2_exact")[1] == Fraction(14, 9)

    def test_tv_non_increasing(self):
        for n, k in [(3, 1), (4, 2), (5, 1)]:
            tv = exact_distances(n, k, 12).channel("tv_exact")
            values = [tv[t] for t in range(13)]
            assert all(a >= b for a, b in zip(values, values[1:]))

    def test_left_right_conventions_agree(self):
        for n, k in [(3, 1), (4, 2)]:
            right = exact_distances(n, k, 6, convention="right").channel("tv_exact")
            left = exact_distances(n, k, 6, convention="left").channel("tv_exact")
            assert right == left

    def test_float_mode_tracks_exact(self):
        a = exact_distances(4, 1, 8, exact=True)
        b = exact_distances(4, 1, 8, exact=False)
        for t in range(9):
            assert float(a.channel("tv_exact")[t]) == pytest.approx(
                b.channel("tv_exact")[t], abs=1e-12
            )

    def test_negative_horizon_rejected(self):
        with pytest.raises(DomainError):
            exact_distances(3, 1, -1)


class TestTraceIdentity:
    """Power sums of the eigenvalue multiset against exact return
    probabilities: sum d * eig**t == n! * P^t(id, id)."""

    @staticmethod
    def _return_probability(n, k, t):
        chain = transition_matrix(n, k, exact=True)
        size = len(chain.states)
        id_idx = lehmer_rank(identity(n))
        dist = [Fraction(0)] * size
        dist[id_idx] = Fraction(1)
        for _ in range(t):
            dist = [
                sum(dist[x] * chain.rational[x][y] for x in range(size))
                for y in range(size)
            ]
        return dist[id_idx]

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    @pytest.mark.parametrize("t", [1, 2, 3])
    def test_exact_at_k1(self, n, t):
        from shuffle_spectra.spectrum import spectrum_table

        table = spectrum_table(n, 1, exact=True)
        formula = sum(e.dim * r.eigenvalue**t for e in table for r in e.records)
        assert formula == factorial(n) * self._return_probability(n, 1, t)

    def test_divergence_at_k2_is_pinned(self):
        # the formula multiset is not the true spectrum for k >= 2; the
        # first power sum already differs and stays reported, not repaired
        from shuffle_spectra.spectrum import spectrum_table

        table = spectrum_table(2, 2, exact=True)
        formula = sum(e.dim * r.eigenvalue for e in table for r in e.records)
        assert formula == Fraction(5, 4)
        assert factorial(2) * self._return_probability(2, 2, 1) == Fraction(3, 2)


class TestCompareSpectra:
    def test_perfect_match_at_k1(self):
        assert compare_spectra(2, 1).mismatches == ()

    def test_known_mismatch_at_k2(self):
        cmp = compare_spectra(2, 2)
        assert len(cmp.mismatches) == 1
        f, o, gap = cmp.mismatches[0]
        assert (f, o, gap) == pytest.approx((0.25, 0.5, 0.25))

    def test_multiset_sizes(self):
        cmp = compare_spectra(4, 2)
        assert sum(mult for _v, mult in cmp.formula) == factorial(4)
        assert len(cmp.oracle) == factorial(4)

    def test_single_card(self):
        cmp = compare_spectra(1, 1)
        assert cmp.matched == 1
        assert cmp.mismatches == ()

    def test_guard(self):
        with pytest.raises(ResourceLimitError):
            compare_spectra(7, 1)
