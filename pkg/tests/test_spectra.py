import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from topicbounds.errors import DataError, ParameterError
from topicbounds.spectra import (
    count_above_threshold,
    singular_values_symmetric,
    symmetric_eigenvalues,
    symmetrize,
    top_singular_value,
)


def random_symmetric(rng, n):
    a = rng.normal(size=(n, n))
    return (a + a.T) / 2


class TestEigenvalues:
    def test_diagonal(self):
        assert_array_equal(symmetric_eigenvalues(np.diag([3.0, -2.0, 0.0])), [3.0, 0.0, -2.0])

    def test_two_by_two(self):
        assert_allclose(symmetric_eigenvalues([[2.0, 1.0], [1.0, 2.0]]), [3.0, 1.0], rtol=1e-15)

    def test_trace(self):
        rng = np.random.default_rng(0)
        for _ in range(5):
            m = random_symmetric(rng, 50)
            w = symmetric_eigenvalues(m)
            assert abs(w.sum() - np.trace(m)) <= 1e-9 * max(1.0, np.abs(w).sum())

    def test_debug_reconstruction(self):
        m = random_symmetric(np.random.default_rng(1), 30)
        assert_allclose(symmetric_eigenvalues(m, debug=True), symmetric_eigenvalues(m), atol=1e-12)

    def test_empty(self):
        assert symmetric_eigenvalues(np.zeros((0, 0))).size == 0

    @pytest.mark.parametrize(
        "m", [np.zeros((2, 3)), np.array([[1.0, np.nan], [np.nan, 1.0]]), np.array([[1.0, 1.0], [0.0, 1.0]])]
    )
    def test_rejects(self, m):
        with pytest.raises(DataError):
            symmetric_eigenvalues(m)

    def test_tiny_asymmetry_is_symmetrized(self):
        m = np.array([[1.0, 0.5], [0.5 + 1e-9, 1.0]])
        assert_array_equal(symmetrize(m), symmetrize(m).T)


class TestSingularValues:
    def test_diagonal(self):
        assert_array_equal(singular_values_symmetric(np.diag([3.0, -2.0, 0.0])), [3.0, 2.0, 0.0])

    def test_identity(self):
        assert_array_equal(singular_values_symmetric(np.eye(4)), np.ones(4))

    def test_matches_svd(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            m = random_symmetric(rng, 6)
            want = np.linalg.svd(m, compute_uv=False)
            assert_allclose(singular_values_symmetric(m), want, rtol=1e-9, atol=1e-12)

    def test_psd_equals_eigenvalues(self):
        a = np.random.default_rng(3).normal(size=(8, 12))
        m = a @ a.T
        assert_array_equal(singular_values_symmetric(m), symmetric_eigenvalues(m))

    def test_top_singular_value(self):
        rng = np.random.default_rng(4)
        for _ in range(5):
            m = random_symmetric(rng, 20)
            assert top_singular_value(m) == pytest.approx(singular_values_symmetric(m)[0], rel=1e-12)
        assert top_singular_value(np.diag([1.0, -5.0])) == pytest.approx(5.0)
        assert top_singular_value(np.zeros((0, 0))) == 0.0

    def test_weyl_perturbation(self):
        # for PSD rank-K A and symmetric E: max_i |s_i(A + E) - s_i(A)| <= ||E||_F
        rng = np.random.default_rng(5)
        for _ in range(1000):
            k = rng.integers(1, 8)
            b = rng.normal(size=(20, k))
            a = b @ b.T
            e = random_symmetric(rng, 20) * 10.0 ** rng.uniform(-3, 1)
            gap = np.max(np.abs(singular_values_symmetric(a + e) - singular_values_symmetric(a)))
            assert gap <= np.linalg.norm(e) * (1 + 1e-12)


class TestCount:
    def test_examples(self):
        assert count_above_threshold([0.5, 0.3, 0.001], 0.01) == 2
        assert count_above_threshold([1.0, 1.0, 1.0], 1.0) == 0
        assert count_above_threshold([2.0, 1e-300, 0.0], 0.0) == 2

    def test_monotone(self):
        s = np.sort(np.random.default_rng(6).exponential(size=30))[::-1]
        counts = [count_above_threshold(s, t) for t in np.linspace(0, 5, 60)]
        assert all(b <= a for a, b in zip(counts, counts[1:]))

    @pytest.mark.parametrize("theta", [-1e-9, np.nan, np.inf])
    def test_bad_threshold(self, theta):
        with pytest.raises(ParameterError):
            count_above_threshold([1.0], theta)
