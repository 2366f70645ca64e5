"""Test cases for exact spectra."""

import pytest
import sympy as sp
from pydantic import ValidationError

from am_operators.errors import FiniteDimensionalError, InvertibilityError, RangeNotClosedError
from am_operators.operators import NormalDiagonalModel, PhasedTail, PositiveDiagonalModel
from am_operators.spectra import (
    COINCIDENCE_DEPTH,
    SpectrumReport,
    essential_min_modulus,
    essential_spectrum,
    full_spectrum_values,
    map_spectrum_inverse,
    map_spectrum_pseudoinverse,
    min_modulus_from_spectrum,
    same_spectrum,
    spectrum_of_diagonal,
    spectrum_of_direct_sum,
)
from am_operators.utils.exact import contains

from ..conftest import cell, tail


def values_of(eigenvalues):
    return [(e.value, e.multiplicity.to_document()) for e in eigenvalues]


class TestSpectrumOfDiagonal:
    """Test cases for spectrum_of_diagonal."""

    def test_cell_and_tail(self):
        """Test a finite cell next to a tail increasing to 1."""
        model = PositiveDiagonalModel(cells=(cell(2),), tails=(tail(1, "below", start_index=2),))
        report = spectrum_of_diagonal(model)

        assert report.essential == (1,)
        assert report.continuous == (1,)
        assert values_of(report.discrete) == [(2, 1)]
        assert report.discrete_tails[0].values(2) == [sp.Rational(1, 2), sp.Rational(2, 3)]

    def test_zero_operator(self):
        """Test the zero operator on an infinite-dimensional space."""
        report = spectrum_of_diagonal(PositiveDiagonalModel(cells=(cell(0, "inf"),)))

        assert report.essential == (0,)
        assert report.continuous == ()
        assert report.discrete == ()

    def test_compact_tail_limit(self):
        """Test that the limit of a compact tail is essential and continuous."""
        report = spectrum_of_diagonal(PositiveDiagonalModel(cells=(cell(1),), tails=(tail(0, "above", start_index=2),)))

        assert report.essential == (0,)
        assert report.continuous == (0,)

    def test_zero_head_becomes_eigenvalue(self, below_one):
        """Test that the zero head of 1 - 1/n is a point eigenvalue."""
        report = spectrum_of_diagonal(below_one)

        assert values_of(report.point) == [(0, 1)]
        assert report.point_tails[0].rule.start_index == 2

    def test_coinciding_terms_are_folded(self):
        """Test that a tail term equal to a cell adds to its multiplicity."""
        model = PositiveDiagonalModel(cells=(cell(sp.Rational(1, 2)),), tails=(tail(1, "below", start_index=2),))
        report = spectrum_of_diagonal(model)

        assert values_of(report.point) == [(sp.Rational(1, 2), 2)]
        assert report.point_tails[0].excluded == (2,)
        assert report.point_tails[0].values(2) == [sp.Rational(2, 3), sp.Rational(3, 4)]

    def test_terms_shared_by_two_tails(self):
        """Test that 1 - 1/n and 1 - 2/n count their common terms once, with multiplicity 2."""
        model = PositiveDiagonalModel(tails=(tail(1, "below", start_index=2), tail(1, "below", coefficient=2, start_index=4)))
        report = spectrum_of_diagonal(model)

        assert values_of(report.discrete)[:2] == [(sp.Rational(1, 2), 2), (sp.Rational(2, 3), 2)]
        assert len(report.discrete) == COINCIDENCE_DEPTH
        assert report.point_tails[0].excluded == tuple(range(2, 2 + COINCIDENCE_DEPTH))
        assert report.point_tails[1].excluded[:3] == (4, 6, 8)
        assert report.point_tails[1].values(2) == [sp.Rational(3, 5), sp.Rational(5, 7)]

    def test_tails_with_distinct_limits_share_a_term(self):
        """Test that 1 - 1/n and 1/n, both from n = 2, meet only at 1/2."""
        model = PositiveDiagonalModel(tails=(tail(1, "below", start_index=2), tail(0, "above", start_index=2)))
        report = spectrum_of_diagonal(model)

        assert report.essential == (0, 1)
        assert values_of(report.discrete) == [(sp.Rational(1, 2), 2)]
        assert [family.excluded for family in report.point_tails] == [(2,), (2,)]

    def test_tails_on_different_rays_share_nothing(self):
        """Test that the phases 1 and i keep equal moduli apart."""
        rule = tail(1, "below", start_index=2)
        model = NormalDiagonalModel(tails=(PhasedTail(rule=rule), PhasedTail(rule=rule, phase=sp.I)))
        report = spectrum_of_diagonal(model)

        assert report.discrete == ()
        assert all(family.excluded == () for family in report.point_tails)

    def test_cells_merge(self):
        """Test that equal cells merge."""
        report = spectrum_of_diagonal(PositiveDiagonalModel(cells=(cell(3), cell(1), cell(3, 2))))

        assert values_of(report.point) == [(3, 3), (1, 1)]
        assert report.essential == ()

    def test_infinite_multiplicity_is_essential(self):
        """Test that an eigenvalue of infinite multiplicity is essential but not continuous."""
        report = spectrum_of_diagonal(PositiveDiagonalModel(cells=(cell(3, "inf"),), tails=(tail(1, "above"),)))

        assert report.essential == (1, 3)
        assert report.continuous == (1,)
        assert report.discrete == ()

    def test_phased_tail(self):
        """Test a normal model with phase -1."""
        model = NormalDiagonalModel(tails=(PhasedTail(rule=tail(1, "above"), phase=-1),))
        report = spectrum_of_diagonal(model)

        assert report.essential == (-1,)
        assert report.point_tails[0].term(1) == -2

    def test_essential_spectrum_alone(self):
        """Test that essential_spectrum agrees with the full report."""
        model = PositiveDiagonalModel(
            cells=(cell(3, "inf"), cell(2)),
            tails=(tail(1, "above"), tail(1, "below", start_index=2)),
        )

        assert essential_spectrum(model) == spectrum_of_diagonal(model).essential == (1, 3)

    def test_partition_is_validated(self):
        """Test that a continuous value outside the essential spectrum is rejected."""
        with pytest.raises(ValidationError, match="not essential"):
            SpectrumReport(continuous=(1,))


class TestDirectSum:
    """Test cases for spectrum_of_direct_sum."""

    def test_disjoint_summands(self):
        """Test scalar blocks with disjoint spectra."""
        left = spectrum_of_diagonal(PositiveDiagonalModel(cells=(cell(0),)))
        right = spectrum_of_diagonal(PositiveDiagonalModel(cells=(cell(1),)))
        report = spectrum_of_direct_sum(left, right)

        assert values_of(report.point) == [(0, 1), (1, 1)]
        assert not report.continuous_recomputed

    def test_shared_eigenvalue(self):
        """Test that a shared eigenvalue adds multiplicities."""
        one = spectrum_of_diagonal(PositiveDiagonalModel(cells=(cell(1),)))
        report = spectrum_of_direct_sum(one, one)

        assert values_of(report.point) == [(1, 2)]
        assert report.continuous_recomputed

    def test_shared_essential_point(self, below_one):
        """Test the sum of two tails with the same limit."""
        single = spectrum_of_diagonal(below_one)
        report = spectrum_of_direct_sum(single, single)

        assert report.essential == (1,)
        assert values_of(report.point)[:2] == [(0, 2), (sp.Rational(1, 2), 2)]
        assert len(report.point) == 1 + COINCIDENCE_DEPTH
        assert len(report.point_tails) == 2
        assert report.point_tails[1].excluded == tuple(range(2, 2 + COINCIDENCE_DEPTH))

    def test_tail_limit_hit_by_eigenvalue(self, above_one):
        """Test that a limit stops being continuous once the other summand has it as an eigenvalue."""
        left = spectrum_of_diagonal(above_one)
        right = spectrum_of_diagonal(PositiveDiagonalModel(cells=(cell(1),)))
        report = spectrum_of_direct_sum(left, right)

        assert report.essential == (1,)
        assert report.continuous == ()
        assert report.continuous_recomputed


class TestSpectralMaps:
    """Test cases for the inverse and pseudoinverse maps."""

    def test_inverse_of_scalar(self):
        """Test 2*I."""
        report = map_spectrum_inverse(spectrum_of_diagonal(PositiveDiagonalModel(cells=(cell(2, "inf"),))))

        assert report.essential == (sp.Rational(1, 2),)

    def test_inverse_keeps_multiplicity(self):
        """Test that multiplicities carry over."""
        report = map_spectrum_inverse(spectrum_of_diagonal(PositiveDiagonalModel(cells=(cell(3, 2),))))

        assert values_of(report.discrete) == [(sp.Rational(1, 3), 2)]

    def test_inverse_of_tail(self, above_one):
        """Test that 1 + 1/n maps to its reciprocals with the same limit."""
        report = map_spectrum_inverse(spectrum_of_diagonal(above_one))

        assert report.essential == (1,)
        assert report.point_tails[0].term(1) == sp.Rational(1, 2)

    def test_inverse_with_zero(self, below_one):
        """Test that 0 in the spectrum blocks inversion."""
        with pytest.raises(InvertibilityError):
            map_spectrum_inverse(spectrum_of_diagonal(below_one))

    def test_pseudoinverse(self, below_one):
        """Test diag(0, 1/2, 2/3, ...) maps to diag(0, 2, 3/2, ...)."""
        report = map_spectrum_pseudoinverse(spectrum_of_diagonal(below_one))

        assert values_of(report.point) == [(0, 1)]
        assert report.point_tails[0].values(2) == [2, sp.Rational(3, 2)]
        assert report.essential == (1,)

    def test_pseudoinverse_of_finite_rank(self):
        """Test that 0 stays essential for a finite-rank operator."""
        model = PositiveDiagonalModel(cells=(cell(0, "inf"), cell(4)))
        report = map_spectrum_pseudoinverse(spectrum_of_diagonal(model))

        assert report.essential == (0,)
        assert values_of(report.discrete) == [(sp.Rational(1, 4), 1)]

    def test_pseudoinverse_range_not_closed(self, reciprocals):
        """Test that 0 accumulating is an error."""
        with pytest.raises(RangeNotClosedError):
            map_spectrum_pseudoinverse(spectrum_of_diagonal(reciprocals))


class TestMinimumModuli:
    """Test cases for minimum moduli read off spectra."""

    def test_min_modulus(self, above_one, below_one):
        """Test minimum moduli of tails."""
        assert min_modulus_from_spectrum(spectrum_of_diagonal(below_one)) == 0
        assert min_modulus_from_spectrum(spectrum_of_diagonal(above_one)) == 1
        assert min_modulus_from_spectrum(spectrum_of_diagonal(PositiveDiagonalModel(cells=(cell(3, "inf"),)))) == 3

    def test_essential_min_modulus(self, above_one):
        """Test m_e over essential sets {1}, {0} and {1, 3}."""
        assert essential_min_modulus(spectrum_of_diagonal(above_one)) == 1
        assert essential_min_modulus(spectrum_of_diagonal(PositiveDiagonalModel(cells=(cell(0, "inf"),)))) == 0
        two_points = PositiveDiagonalModel(tails=(tail(1, "above"), tail(3, "above")))
        assert essential_min_modulus(spectrum_of_diagonal(two_points)) == 1

    def test_finite_dimensional(self):
        """Test that a finite model has no essential minimum modulus."""
        with pytest.raises(FiniteDimensionalError):
            essential_min_modulus(spectrum_of_diagonal(PositiveDiagonalModel(cells=(cell(2),))))


class TestComparisons:
    """Test cases for spectrum equality and listings."""

    def test_same_spectrum_ignores_order(self):
        """Test order-insensitive comparison."""
        first = spectrum_of_diagonal(PositiveDiagonalModel(cells=(cell(1), cell(2)), tails=(tail(1, "above"),)))
        second = spectrum_of_diagonal(PositiveDiagonalModel(cells=(cell(2), cell(1)), tails=(tail(1, "above"),)))

        assert same_spectrum(first, second)

    def test_different_spectra(self, above_one, below_one):
        """Test that different tails give different spectra."""
        assert not same_spectrum(spectrum_of_diagonal(above_one), spectrum_of_diagonal(below_one))

    def test_full_spectrum_values(self):
        """Test the explicit listing of point values, tail terms and essential points."""
        report = spectrum_of_diagonal(PositiveDiagonalModel(cells=(cell(5),), tails=(tail(0, "above"),)))
        values = full_spectrum_values(report, 3)

        assert values == [5, 1, sp.Rational(1, 2), sp.Rational(1, 3), 0]
        assert contains(values, sp.Integer(0))
