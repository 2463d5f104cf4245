from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from branchprob.measures import (
    ContinuerSet,
    MeasureError,
    algorithmic_measure,
    applicable_measures,
    born_measure,
    copy_count_measure,
    flat_measure,
    measure,
    total_variation,
)
from branchprob.statevec import StateVector, decompose, random_completion

S = 1 / np.sqrt(2)

entropies = st.lists(st.floats(0, 5000, allow_nan=False), min_size=1, max_size=12)


def labels(n):
    return [f"m{i}" for i in range(n)]


class TestFlat:
    @pytest.mark.parametrize("n", [1, 2, 3, 7, 10])
    def test_one_over_n(self, n):
        r = flat_measure(ContinuerSet.bare(labels(n)))
        assert r.exact == (Fraction(1, n),) * n
        assert all(p == 1 / n for p in r.probabilities)

    def test_two_copies_half(self):
        assert flat_measure(ContinuerSet.bare(["live", "dead"])).probabilities == (0.5, 0.5)

    def test_empty_rejected(self):
        with pytest.raises(MeasureError):
            ContinuerSet.bare([])


class TestCopyCount:
    def test_two_live_one_dead(self):
        r = copy_count_measure(ContinuerSet.from_counts(["live", "dead"], [2, 1]))
        assert r.exact == (Fraction(2, 3), Fraction(1, 3))
        assert r["live"] == 2 / 3

    def test_equal_copies(self):
        assert copy_count_measure(ContinuerSet.from_counts(["a", "b"], [1, 1])).probabilities == (0.5, 0.5)

    def test_single_category(self):
        assert copy_count_measure(ContinuerSet.from_counts(["a"], [5])).probabilities == (1.0,)

    @pytest.mark.parametrize("bad", [0, -1, 1.5])
    def test_bad_counts(self, bad):
        with pytest.raises(MeasureError):
            copy_count_measure(ContinuerSet.from_counts(["a", "b"], [1, bad]))

    def test_needs_counts(self):
        with pytest.raises(MeasureError, match="counts"):
            copy_count_measure(ContinuerSet.bare(["a"]))


class TestBorn:
    def test_norm_squares(self):
        r = born_measure(ContinuerSet.from_amplitudes(["a", "b"], [0.6, 0.8]))
        np.testing.assert_allclose(r.probabilities, [0.36, 0.64], rtol=0, atol=1e-15)

    @pytest.mark.parametrize("theta", [0.0, 0.3, np.pi / 2, np.pi, 5.0])
    def test_phase_invariance(self, theta):
        r = born_measure(ContinuerSet.from_amplitudes(["a", "b"], [S, S * np.exp(1j * theta)]))
        np.testing.assert_allclose(r.probabilities, [0.5, 0.5], rtol=0, atol=1e-15)

    def test_cancelled_paths_get_zero(self):
        r = born_measure(ContinuerSet.from_amplitudes(["live", "dead"], [S + (-S), 1.0]))
        assert r.probabilities == (0.0, 1.0)
        assert r.log_weights[0] == -np.inf

    def test_all_zero_rejected(self):
        with pytest.raises(MeasureError, match="support"):
            born_measure(ContinuerSet.from_amplitudes(["a", "b"], [0, 0]))


class TestAlgorithmic:
    def test_one_and_two_bits(self):
        r = algorithmic_measure(ContinuerSet.from_entropies(["a", "b"], [1, 2]))
        assert r.probabilities[0] == pytest.approx(2 / 3, abs=1e-15)
        assert r.probabilities[1] == pytest.approx(1 / 3, abs=1e-15)

    @pytest.mark.parametrize("n, h", [(1, 0.0), (3, 17.0), (7, 4000.0), (10, 123.456)])
    def test_equal_entropies_flat(self, n, h):
        r = algorithmic_measure(ContinuerSet.from_entropies(labels(n), [h] * n))
        assert all(p == 1 / n for p in r.probabilities)

    def test_shorter_description_dominates(self):
        prev_a, prev_b = 0.5, 0.5
        for k in [1, 2, 5, 10, 50, 200, 2000]:
            pa, pb = algorithmic_measure(ContinuerSet.from_entropies(["a", "b"], [10, 10 + k])).probabilities
            assert pa >= prev_a and (pb < prev_b or pb == 0.0)
            prev_a, prev_b = pa, pb
        assert (prev_a, prev_b) == (1.0, 0.0)

    def test_large_bit_counts_do_not_underflow(self):
        r = algorithmic_measure(ContinuerSet.from_entropies(["a", "b"], [5000.0, 5001.0]))
        assert r.probabilities[0] == pytest.approx(2 / 3)

    @given(entropies, st.floats(-1e4, 1e4, allow_nan=False))
    def test_shift_invariance(self, h, c):
        a = algorithmic_measure(ContinuerSet.from_entropies(labels(len(h)), h)).probabilities
        b = algorithmic_measure(ContinuerSet.from_entropies(labels(len(h)), [x + c for x in h])).probabilities
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)

    def test_absolute_and_delta_agree(self):
        h_m = 1234.0
        h = [1250.0, 1260.0, 1300.0]
        absolute = algorithmic_measure(ContinuerSet.from_entropies(labels(3), h)).probabilities
        deltas = algorithmic_measure(ContinuerSet.from_entropies(labels(3), [x - h_m for x in h])).probabilities
        np.testing.assert_allclose(absolute, deltas, rtol=0, atol=1e-12)

    def test_reproduces_born_from_log_amplitudes(self):
        rng = np.random.default_rng(12)
        for _ in range(200):
            n = int(rng.integers(1, 20))
            a = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            h = -2 * np.log2(np.abs(a))
            alg = algorithmic_measure(ContinuerSet.from_entropies(labels(n), h)).probabilities
            born = born_measure(ContinuerSet.from_amplitudes(labels(n), a)).probabilities
            np.testing.assert_allclose(alg, born, rtol=0, atol=1e-12)


class TestInvariants:
    @given(st.lists(st.integers(1, 1000), min_size=1, max_size=10))
    def test_normalization_counts(self, counts):
        cs = ContinuerSet.from_counts(labels(len(counts)), counts)
        for name in applicable_measures(cs):
            r = measure(cs, name)
            assert abs(sum(r.probabilities) - 1) <= 1e-12
            assert min(r.probabilities) >= 0

    @given(entropies)
    def test_normalization_entropies(self, h):
        r = algorithmic_measure(ContinuerSet.from_entropies(labels(len(h)), h))
        assert abs(sum(r.probabilities) - 1) <= 1e-12

    def test_branch_dependence(self):
        rng = np.random.default_rng(99)
        for _ in range(100):
            n = int(rng.integers(2, 12))
            i = int(rng.integers(n))
            a = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            h = rng.uniform(0, 3000, n)
            a2, h2 = a.copy(), h.copy()
            others = [j for j in range(n) if j != i]
            a2[others] = rng.standard_normal(n - 1) * 5
            h2[others] = rng.uniform(0, 3000, n - 1)
            b1 = born_measure(ContinuerSet.from_amplitudes(labels(n), a)).log_weights[i]
            b2 = born_measure(ContinuerSet.from_amplitudes(labels(n), a2)).log_weights[i]
            g1 = algorithmic_measure(ContinuerSet.from_entropies(labels(n), h)).log_weights[i]
            g2 = algorithmic_measure(ContinuerSet.from_entropies(labels(n), h2)).log_weights[i]
            assert b1 == b2 and g1 == g2

    def test_noncontextuality_via_decompose(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            dim = int(rng.integers(2, 20))
            psi = StateVector(rng.standard_normal(dim) + 1j * rng.standard_normal(dim)).normalized()
            target = StateVector(rng.standard_normal(dim) + 1j * rng.standard_normal(dim)).normalized()
            probs = []
            for seed in range(6):
                basis = random_completion([target], dim, seed)
                d = decompose(psi, basis)
                probs.append(born_measure(ContinuerSet.from_amplitudes(labels(dim), d.coefficients)).probabilities[0])
            assert max(probs) - min(probs) <= 1e-12


def test_dead_branch_as_ordinary_continuer():
    d = decompose([0.48, 0.64, 0.6], [[1, 0, 0], [0, 1, 0]])
    r = born_measure(ContinuerSet.from_amplitudes(["m1", "m2", "dead"], d.all_coefficients()))
    np.testing.assert_allclose(r.probabilities, [0.2304, 0.4096, 0.36], atol=1e-12)
    live = born_measure(ContinuerSet.from_amplitudes(["m1", "m2"], d.coefficients))
    np.testing.assert_allclose(live.probabilities, [0.36, 0.64], atol=1e-12)


def test_total_variation():
    assert total_variation([0.5, 0.5], [2 / 3, 1 / 3]) == pytest.approx(1 / 6)
    assert total_variation([1, 0], [0, 1]) == 1.0
    with pytest.raises(MeasureError):
        total_variation([1], [0.5, 0.5])


def test_unknown_measure():
    with pytest.raises(MeasureError):
        measure(ContinuerSet.bare(["a"]), "nope")
