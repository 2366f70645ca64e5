"""Unilateral-shift compositions ``S^k D`` and their adjoints."""

from enum import Enum
from typing_extensions import Self

import numpy as np
from pydantic import Field, model_validator

from ..schemas.base import ExactModel
from ..utils.exact import to_complex
from .diagonal import PositiveDiagonalModel
from .matrix import FiniteMatrix


class ShiftForm(str, Enum):
    """Which side of the diagonal the shift sits on."""

    SHIFT = "shift"
    """``T = S^k D``"""
    CO_SHIFT = "co-shift"
    """``T = D (S*)^k``"""

    def flipped(self) -> "ShiftForm":
        return ShiftForm.CO_SHIFT if self is ShiftForm.SHIFT else ShiftForm.SHIFT


class ShiftedDiagonalModel(ExactModel):
    """``S^k D`` with ``S`` the unilateral right shift, or its co-shift form ``D (S*)^k``.

    The co-shift form is how adjoints and pseudoinverses are stored:
    ``(S^k D)* = D (S*)^k`` and ``(S^k D)^+ = D^+ (S*)^k`` because ``S^k`` is an isometry.
    """

    shift_order: int = Field(ge=0)
    diag: PositiveDiagonalModel
    form: ShiftForm = ShiftForm.SHIFT

    @model_validator(mode="after")
    def _check_dimension(self) -> Self:
        if self.shift_order > 0 and self.diag.dimension is not None:
            raise ValueError("The unilateral shift needs an infinite-dimensional diagonal part")
        return self

    def adjoint(self) -> "ShiftedDiagonalModel":
        return self.replace(form=self.form.flipped())

    def truncate(self, n: int) -> FiniteMatrix:
        """Top-left ``n x n`` block of the matrix in the canonical basis."""
        k = self.shift_order
        values = [to_complex(e) for e in self.diag.entries(n - k)] if n > k else []
        block = np.zeros((n, n), dtype=np.complex128)
        for j, value in enumerate(values[: n - k]):
            if self.form is ShiftForm.SHIFT:
                block[j + k, j] = value
            else:
                block[j, j + k] = value
        return FiniteMatrix(block)
