"""Dense complex matrices used as the finite-dimensional substrate."""

from dataclasses import dataclass
from typing import Any

import numpy as np
import numpy.typing as npt


@dataclass(frozen=True, eq=False)
class FiniteMatrix:
    """Read-only dense complex matrix."""

    array: npt.NDArray[np.complex128]

    def __post_init__(self) -> None:
        array = np.array(self.array, dtype=np.complex128)
        if array.ndim != 2 or array.shape[0] < 1 or array.shape[1] < 1:
            raise ValueError(f"FiniteMatrix needs a non-empty 2-D grid, got shape {array.shape}")
        if not np.all(np.isfinite(array)):
            raise ValueError("FiniteMatrix entries must be finite")
        array.setflags(write=False)
        object.__setattr__(self, "array", array)

    @classmethod
    def from_pairs(cls, rows: list[list[Any]]) -> "FiniteMatrix":
        """Build from row-major ``[re, im]`` pairs (plain numbers are read as real)."""
        if not rows or any(len(row) != len(rows[0]) for row in rows):
            raise ValueError("Matrix rows must be non-empty and of equal length")
        grid = [[complex(*entry) if isinstance(entry, list | tuple) else complex(entry) for entry in row] for row in rows]
        return cls(np.array(grid, dtype=np.complex128))

    def to_pairs(self) -> list[list[list[float]]]:
        """Row-major ``[re, im]`` pairs."""
        return [[[float(z.real), float(z.imag)] for z in row] for row in self.array]

    @property
    def rows(self) -> int:
        return int(self.array.shape[0])

    @property
    def cols(self) -> int:
        return int(self.array.shape[1])

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def conj_transpose(self) -> "FiniteMatrix":
        return FiniteMatrix(self.array.conj().T)

    def norm(self) -> float:
        """Spectral norm."""
        return float(np.linalg.norm(self.array, ord=2))

    def __matmul__(self, other: "FiniteMatrix") -> "FiniteMatrix":
        return FiniteMatrix(self.array @ other.array)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteMatrix):
            return NotImplemented
        return self.array.shape == other.array.shape and bool(np.array_equal(self.array, other.array))

    def __hash__(self) -> int:
        return hash((self.array.shape, self.array.tobytes()))
