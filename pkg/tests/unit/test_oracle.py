"""Test cases for the finite-dimensional oracle."""

import numpy as np
import pytest

from am_operators.errors import NotAMError, OperatorModelError
from am_operators.operators import FiniteMatrix
from am_operators.oracle import (
    candidate_matrix,
    check_hyponormal_from_paranormal_am,
    check_kernel_lemmas,
    check_moore_penrose,
    check_spectral_equalities,
    hermitian_eigen,
    is_hyponormal_fd,
    is_paranormal_fd,
    numerical_rank,
    pseudoinverse_fd,
    random_unitary,
    svd,
    truncation_gap,
)

SHIFT_3 = FiniteMatrix(np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]], dtype=complex))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


class TestDecompositions:
    """Test cases for eigen and singular value decompositions."""

    def test_hermitian_eigen(self):
        """Test ascending eigenvalues of small Hermitian matrices."""
        assert np.allclose(hermitian_eigen(FiniteMatrix(np.eye(3))).values, [1, 1, 1])
        assert np.allclose(hermitian_eigen(FiniteMatrix(np.diag([3.0, 1.0, 2.0]))).values, [1, 2, 3])
        assert np.allclose(hermitian_eigen(FiniteMatrix(np.array([[2.0, 1.0], [1.0, 2.0]]))).values, [1, 3])

    def test_hermitian_eigen_vectors(self, rng):
        """Test that the eigenvectors diagonalize the matrix."""
        z = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        a = z + z.conj().T
        result = hermitian_eigen(FiniteMatrix(a))

        assert np.allclose(a @ result.vectors, result.vectors @ np.diag(result.values))

    def test_hermitian_eigen_rejects_non_hermitian(self):
        """Test the input checks."""
        with pytest.raises(OperatorModelError, match="not Hermitian"):
            hermitian_eigen(SHIFT_3)
        with pytest.raises(OperatorModelError, match="square"):
            hermitian_eigen(FiniteMatrix(np.ones((2, 3))))

    def test_svd(self, rng):
        """Test singular values of the zero matrix, the shift and a unitary."""
        assert np.allclose(svd(FiniteMatrix(np.zeros((3, 3)))).singular_values, 0)
        assert np.allclose(svd(SHIFT_3).singular_values, [0, 1, 1])
        assert np.allclose(svd(FiniteMatrix(random_unitary(rng, 4))).singular_values, 1)

    def test_svd_reconstructs(self, rng):
        """Test a = U diag(s) V^H."""
        a = rng.standard_normal((5, 3)) + 1j * rng.standard_normal((5, 3))
        result = svd(FiniteMatrix(a))

        assert np.allclose(result.left @ np.diag(result.singular_values) @ result.right.conj().T, a)
        assert result.smallest <= result.largest

    def test_numerical_rank(self):
        """Test the rank of the truncated shift."""
        assert numerical_rank(SHIFT_3) == 2


class TestPseudoinverse:
    """Test cases for pseudoinverse_fd and the Moore-Penrose identities."""

    def test_diagonal(self):
        """Test diag(2, 0)."""
        result = pseudoinverse_fd(FiniteMatrix(np.diag([2.0, 0.0])))

        assert np.allclose(result.array, np.diag([0.5, 0.0]))

    def test_invertible(self, rng):
        """Test that an invertible matrix gets its inverse."""
        a = rng.standard_normal((4, 4)) + 4 * np.eye(4)

        assert np.allclose(pseudoinverse_fd(FiniteMatrix(a)).array, np.linalg.inv(a), atol=1e-9)

    def test_explicit_rank_tolerance(self):
        """Test that rank_tol overrides the relative cutoff."""
        result = pseudoinverse_fd(FiniteMatrix(np.diag([1.0, 1e-3])), rank_tol=1e-2)

        assert np.allclose(result.array, np.diag([1.0, 0.0]))

    def test_identity(self):
        """Test that the identity satisfies every property."""
        assert check_moore_penrose(FiniteMatrix(np.eye(3))).all_hold

    def test_random_rectangular(self, rng):
        """Test a random complex 6x4 matrix."""
        a = rng.standard_normal((6, 4)) + 1j * rng.standard_normal((6, 4))
        report = check_moore_penrose(FiniteMatrix(a))

        assert report.all_hold, report.residuals

    def test_rank_deficient(self, rng):
        """Test a random 5x3 matrix of rank 2 and a singular square matrix."""
        a = rng.standard_normal((5, 2)) @ rng.standard_normal((2, 3))

        assert check_moore_penrose(FiniteMatrix(a)).all_hold
        assert check_moore_penrose(FiniteMatrix(np.diag([1.0, 2.0, 0.0]))).all_hold


class TestNormality:
    """Test cases for hyponormal and paranormal checks."""

    def test_normal_is_hyponormal(self, rng):
        """Test a unitarily rotated diagonal matrix."""
        u = random_unitary(rng, 4)
        a = u @ np.diag([1, 2j, -3, 0.5]) @ u.conj().T

        assert is_hyponormal_fd(FiniteMatrix(a))

    def test_shifts_are_not_hyponormal(self):
        """Test nilpotent shifts."""
        assert not is_hyponormal_fd(SHIFT_3)
        assert not is_hyponormal_fd(FiniteMatrix(np.array([[0.0, 1.0], [0.0, 0.0]])))

    def test_diagonal_is_paranormal(self):
        """Test that a diagonal matrix passes."""
        verdict = is_paranormal_fd(FiniteMatrix(np.diag([1.0, 2.0, 3.0])), lambda_grid_size=16, trials=50)

        assert verdict.holds
        assert verdict.witness_vector is None

    def test_shift_is_falsified(self):
        """Test that the middle basis vector falsifies the truncated shift."""
        verdict = is_paranormal_fd(SHIFT_3, lambda_grid_size=16, trials=50)

        assert not verdict.holds
        assert verdict.source == "candidate"
        assert np.allclose(np.abs(verdict.witness_vector), [0, 1, 0])

    def test_non_square(self):
        """Test that paranormality needs a square matrix."""
        with pytest.raises(OperatorModelError):
            is_paranormal_fd(FiniteMatrix(np.ones((2, 3))))


class TestSpectralEqualities:
    """Test cases for check_spectral_equalities."""

    def test_square(self):
        """Test that A*A and AA* agree for the square shift."""
        report = check_spectral_equalities(SHIFT_3)

        assert report.nonzero_match
        assert report.full_match
        assert report.kernel_dimensions_equal

    def test_rectangular(self, rng):
        """Test that only the nonzero parts agree for a 3x2 matrix."""
        report = check_spectral_equalities(FiniteMatrix(rng.standard_normal((3, 2))))

        assert report.nonzero_match
        assert not report.full_match
        assert not report.kernel_dimensions_equal
        assert report.max_deviation < 1e-9


class TestKernelLemmas:
    """Test cases for check_kernel_lemmas."""

    def test_singular_diagonal(self):
        """Test diag(1, 2, 0)."""
        report = check_kernel_lemmas(FiniteMatrix(np.diag([1.0, 2.0, 0.0])), lambda_grid_size=16, trials=50)

        assert report.paranormal
        assert report.kernel_powers_equal
        assert report.kernels_symmetric
        assert report.pinv_paranormal_from_kernels
        assert report.holds

    def test_non_paranormal(self):
        """Test that the hypotheses are reported as not applicable."""
        report = check_kernel_lemmas(SHIFT_3, lambda_grid_size=16, trials=50)

        assert not report.paranormal
        assert report.kernel_powers_equal is None
        assert report.holds


class TestHyponormalSearch:
    """Test cases for the randomized hyponormality search."""

    def test_candidate_matrix_kinds(self, rng):
        """Test that normal candidates are normal."""
        a = candidate_matrix([1, 2, 3], "normal", rng).array

        assert np.allclose(a @ a.conj().T, a.conj().T @ a)
        assert candidate_matrix([1, 2, 3], "non-normal", rng).rows == 3

    def test_search_on_increasing_tail(self, below_one):
        """Test truncations and the sampled candidates of the AM model diag(1 - 1/n)."""
        report = check_hyponormal_from_paranormal_am(below_one, trials=30, sizes=(8, 16), vector_trials=50)

        assert report.truncations_hyponormal == {8: True, 16: True}
        assert report.samples == 30
        assert report.paranormal_kernel_symmetric >= 20

    def test_search_refuses_non_am_model(self, above_one):
        """Test that diag(1 + 1/n), which is not AM, is rejected before sampling."""
        with pytest.raises(NotAMError, match="InfinitelyManyEigenvaluesAboveMe"):
            check_hyponormal_from_paranormal_am(above_one, trials=5, sizes=(8,))


class TestTruncationGap:
    """Test cases for truncation_gap."""

    def test_decreasing_tail(self, above_one):
        """Test that sigma_min of diag(1 + 1/n) stays within the tail deviation."""
        gap = truncation_gap(above_one, 4)

        assert gap.sigma_min == pytest.approx(1.25)
        assert gap.min_modulus == 1.0
        assert gap.bound == pytest.approx(0.25)
        assert gap.within_bound

    def test_large_truncation(self, above_one):
        """Test the n = 512 cross-check."""
        gap = truncation_gap(above_one, 512)

        assert abs(gap.sigma_min - gap.min_modulus) < 2e-3
        assert gap.within_bound
