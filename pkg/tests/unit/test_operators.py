"""Test cases for operator functionals and transforms."""

import numpy as np
import pytest
import sympy as sp

from am_operators.errors import OperatorModelError, RangeNotClosedError
from am_operators.operators import (
    NormalDiagonalModel,
    PhasedTail,
    PositiveDiagonalModel,
    ShiftedDiagonalModel,
    ShiftForm,
    adjoint,
    compose_direct_sum,
    entries,
    gram_pair,
    has_zero_entry,
    is_min_attaining,
    is_norm_attaining,
    min_modulus,
    modulus,
    operator_norm,
    pseudoinverse,
    range_is_closed,
    truncate,
    truncation_deviation,
)
from am_operators.utils.exact import exact_equal

from ..conftest import cell, tail


@pytest.fixture
def identity():
    """The identity on an infinite-dimensional space."""
    return PositiveDiagonalModel(cells=(cell(1, "inf"),))


class TestTruncate:
    """Test cases for finite compressions."""

    def test_diagonal(self):
        """Test truncation of a finite diagonal model."""
        matrix = truncate(PositiveDiagonalModel(cells=(cell(1), cell(2))), 2)

        assert np.allclose(matrix.array, np.diag([1, 2]))

    def test_shift(self, identity):
        """Test truncation of the unilateral shift."""
        matrix = truncate(ShiftedDiagonalModel(shift_order=1, diag=identity), 3)

        assert np.allclose(matrix.array, [[0, 0, 0], [1, 0, 0], [0, 1, 0]])

    def test_co_shift_is_transpose(self, identity):
        """Test that the co-shift truncates to the transposed block."""
        model = ShiftedDiagonalModel(shift_order=1, diag=identity)

        assert np.allclose(truncate(adjoint(model), 3).array, truncate(model, 3).array.T)

    def test_phased_tail(self):
        """Test truncation of a normal model with phase i."""
        model = NormalDiagonalModel(tails=(PhasedTail(rule=tail(1, "below", start_index=2), phase=sp.I),))

        assert np.allclose(truncate(model, 2).array, np.diag([0.5j, 2j / 3]))

    def test_entries_rejects_shifted(self, identity):
        """Test that shifted models have no diagonal entries."""
        with pytest.raises(TypeError):
            entries(ShiftedDiagonalModel(shift_order=1, diag=identity), 2)

    def test_shift_needs_infinite_diagonal(self):
        """Test that a nonzero shift order needs infinitely many basis vectors."""
        with pytest.raises(ValueError):
            ShiftedDiagonalModel(shift_order=1, diag=PositiveDiagonalModel(cells=(cell(1),)))


class TestNormAndMinimumModulus:
    """Test cases for operator_norm and min_modulus."""

    def test_norm(self, below_one):
        """Test norms of diagonal and shifted models."""
        assert operator_norm(below_one) == 1
        assert operator_norm(PositiveDiagonalModel(cells=(cell(2),), tails=below_one.tails)) == 2
        shifted = ShiftedDiagonalModel(shift_order=1, diag=PositiveDiagonalModel(cells=(cell(3),), tails=below_one.tails))
        assert operator_norm(shifted) == 3

    def test_norm_of_empty_model(self):
        """Test that the empty model has norm 0."""
        assert operator_norm(PositiveDiagonalModel()) == 0

    def test_min_modulus(self, above_one, below_one):
        """Test minimum moduli of diagonal models."""
        assert min_modulus(above_one) == 1
        assert min_modulus(below_one) == 0

    def test_min_modulus_of_shifts(self, identity):
        """Test that shifts keep m(D) and co-shifts have m = 0."""
        assert min_modulus(ShiftedDiagonalModel(shift_order=2, diag=identity)) == 1
        assert min_modulus(ShiftedDiagonalModel(shift_order=1, diag=identity, form=ShiftForm.CO_SHIFT)) == 0

    def test_min_modulus_of_empty_model(self):
        """Test that the empty model has no minimum modulus."""
        with pytest.raises(OperatorModelError):
            min_modulus(PositiveDiagonalModel())


class TestAttainment:
    """Test cases for attainment checks."""

    def test_min_attained_at_zero_head(self, below_one):
        """Test that 1 - 1/n attains its minimum 0 at the first vector."""
        result = is_min_attaining(below_one)

        assert result.attained
        assert result.value == 0
        assert result.witness == 0

    def test_min_not_attained(self, above_one, reciprocals):
        """Test infima approached from above."""
        assert not is_min_attaining(above_one).attained
        assert not is_min_attaining(reciprocals).attained

    def test_norm_attainment(self, above_one, below_one):
        """Test suprema attained at the head or only approached."""
        result = is_norm_attaining(above_one)

        assert result.attained
        assert result.value == 2
        assert result.witness == 0
        assert not is_norm_attaining(below_one).attained

    def test_witness_is_first_canonical_index(self):
        """Test that the smallest minimizing index is reported."""
        model = PositiveDiagonalModel(cells=(cell(3), cell(1, "inf")), tails=(tail(1, "above"),))

        assert is_min_attaining(model).witness == 1

    def test_empty_model_not_norm_attaining(self):
        """Test the empty model."""
        result = is_norm_attaining(PositiveDiagonalModel())

        assert not result.attained
        assert result.value == 0


class TestPseudoinverse:
    """Test cases for pseudoinverse and adjoint."""

    def test_diagonal(self, below_one):
        """Test the pseudoinverse of diag(0, 1/2, 2/3, ...)."""
        inverse = pseudoinverse(below_one)

        assert inverse.entries(3) == [0, 2, sp.Rational(3, 2)]

    def test_normal_cell(self):
        """Test the pseudo-reciprocal of a complex entry."""
        inverse = pseudoinverse(NormalDiagonalModel(cells=(cell(2 * sp.I),)))

        assert exact_equal(inverse.cells[0].value, -sp.I / 2)

    def test_range_not_closed(self, reciprocals):
        """Test that 1/n has no bounded pseudoinverse."""
        with pytest.raises(RangeNotClosedError):
            pseudoinverse(reciprocals)

    def test_shifted_flips_form(self, identity):
        """Test the pseudoinverse of a shift is a co-shift."""
        inverse = pseudoinverse(ShiftedDiagonalModel(shift_order=1, diag=identity))

        assert inverse.form is ShiftForm.CO_SHIFT

    def test_adjoint(self, below_one):
        """Test adjoints of positive and normal models."""
        assert adjoint(below_one) is below_one
        assert adjoint(NormalDiagonalModel(cells=(cell(sp.I),))).cells[0].value == -sp.I


class TestGramPairAndModulus:
    """Test cases for gram_pair and modulus."""

    def test_shift_gram_pair(self, identity):
        """Test T*T = I and TT* = diag(0, 1, 1, ...) for the shift."""
        tstar_t, t_tstar = gram_pair(ShiftedDiagonalModel(shift_order=1, diag=identity))

        assert tstar_t.entries(3) == [1, 1, 1]
        assert t_tstar.entries(3) == [0, 1, 1]

    def test_unshifted_gram_pair(self, below_one):
        """Test that k = 0 gives the same square twice."""
        tstar_t, t_tstar = gram_pair(ShiftedDiagonalModel(shift_order=0, diag=below_one))

        assert tstar_t == t_tstar

    def test_higher_shift_order(self, below_one):
        """Test that TT* gains k leading zeros."""
        _, t_tstar = gram_pair(ShiftedDiagonalModel(shift_order=2, diag=below_one))

        assert t_tstar.cells == (cell(0, 2),)
        assert t_tstar.tails == (below_one.tails[0].squared(),)

    def test_co_shift_gram_pair(self, identity):
        """Test that the co-shift swaps the two members."""
        tstar_t, t_tstar = gram_pair(ShiftedDiagonalModel(shift_order=1, diag=identity, form=ShiftForm.CO_SHIFT))

        assert tstar_t.entries(2) == [0, 1]
        assert t_tstar.entries(2) == [1, 1]

    def test_modulus(self, normal_blocks):
        """Test |T| of normal and shifted models."""
        assert [c.value for c in modulus(normal_blocks).cells] == [2, 2]
        diag = PositiveDiagonalModel(cells=(cell(3, "inf"),))
        assert modulus(ShiftedDiagonalModel(shift_order=1, diag=diag)) == diag

    def test_modulus_of_negative_phase(self, reciprocals):
        """Test that |T| forgets a phase of -1."""
        model = NormalDiagonalModel(tails=(PhasedTail(rule=reciprocals.tails[0], phase=-1),))

        assert modulus(model) == reciprocals


class TestPredicates:
    """Test cases for range closure, zero entries and truncation deviation."""

    def test_range_is_closed(self, above_one, reciprocals):
        """Test range closure."""
        assert range_is_closed(above_one)
        assert not range_is_closed(reciprocals)

    def test_has_zero_entry(self, above_one, below_one):
        """Test zero entries in cells and tail heads."""
        assert has_zero_entry(below_one)
        assert not has_zero_entry(above_one)

    def test_direct_sum(self, above_one, below_one):
        """Test composing two diagonal models."""
        combined = compose_direct_sum(above_one, below_one)

        assert combined.tails == above_one.tails + below_one.tails

    def test_truncation_deviation(self, above_one):
        """Test the distance from the last included tail term to its limit."""
        assert truncation_deviation(above_one, 4) == sp.Rational(1, 4)
        assert truncation_deviation(PositiveDiagonalModel(cells=(cell(1),)), 1) == 0
        two_streams = PositiveDiagonalModel(cells=(cell(1, "inf"),), tails=above_one.tails)
        assert truncation_deviation(two_streams, 1) is None
