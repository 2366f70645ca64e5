"""Parametric tail sequences with exactly known limits."""

import math
from enum import Enum
from typing_extensions import Self

import numpy as np
import numpy.typing as npt
import sympy as sp
from pydantic import Field, model_validator

from ..errors import OperatorModelError, RangeNotClosedError
from ..schemas.base import ExactModel, Scalar
from ..utils.exact import (
    ZERO,
    compare,
    exact_equal,
    is_nonnegative_real,
    is_positive_real,
    is_real,
    is_zero,
    to_complex,
)

N = sp.Symbol("n", positive=True, integer=True)


class TailDirection(str, Enum):
    """Side from which the terms approach their limit."""

    FROM_ABOVE = "above"
    FROM_BELOW = "below"

    @property
    def sign(self) -> int:
        return 1 if self is TailDirection.FROM_ABOVE else -1

    def flipped(self) -> "TailDirection":
        if self is TailDirection.FROM_ABOVE:
            return TailDirection.FROM_BELOW
        return TailDirection.FROM_ABOVE


class TailRule(ExactModel):
    """Strictly monotone sequence ``term(n)`` for ``n >= start_index``.

    The base sequence is ``b(n) = limit + s * coefficient * n**(-exponent)`` with
    ``s = +1`` from above and ``s = -1`` from below. Two optional transforms keep
    the family closed under squaring, pseudo-reciprocals and the ``beta - t``
    reflections used by decompositions::

        term(n) = shift + sign * b(n)**power,   sign = -1 if mirrored else +1

    Rules read from documents use only the base fields.
    """

    limit: Scalar
    direction: TailDirection
    coefficient: Scalar
    exponent: Scalar
    start_index: int = Field(default=1, ge=1)
    power: int = 1
    shift: Scalar = ZERO
    mirrored: bool = False

    @model_validator(mode="after")
    def _check_invariants(self) -> Self:
        if not is_nonnegative_real(self.limit):
            raise ValueError(f"Tail limit must be a nonnegative real, got {self.limit}")
        if not is_positive_real(self.coefficient):
            raise ValueError(f"Tail coefficient must be positive, got {self.coefficient}")
        if not is_positive_real(self.exponent):
            raise ValueError(f"Tail exponent must be positive, got {self.exponent}")
        if self.power == 0:
            raise ValueError("Tail power must be nonzero")
        if not is_real(self.shift):
            raise ValueError(f"Tail shift must be real, got {self.shift}")

        base_first = self.base_term(self.start_index)
        if self.direction is TailDirection.FROM_BELOW and compare(base_first, ZERO) < 0:
            raise ValueError(
                f"Negative tail term: {self.limit} - {self.coefficient}*"
                f"{self.start_index}**(-{self.exponent}) = {base_first}",
            )
        if self.power < 0 and (is_zero(self.limit) or is_zero(base_first)):
            raise ValueError("Negative tail powers need a base sequence bounded away from 0")
        if compare(self.infimum, ZERO) < 0:
            raise ValueError(f"Tail terms must be nonnegative, infimum is {self.infimum}")
        return self

    def base_term(self, n: int) -> sp.Expr:
        """Untransformed term ``limit +/- coefficient * n**(-exponent)``."""
        return self.limit + self.direction.sign * self.coefficient * sp.Integer(n) ** (-self.exponent)

    def _outer(self, raw: sp.Expr) -> sp.Expr:
        return self.shift - raw if self.mirrored else self.shift + raw

    def term(self, n: int) -> sp.Expr:
        """Term with index ``n >= start_index``."""
        if n < self.start_index:
            raise IndexError(f"Tail starts at index {self.start_index}, got {n}")
        return self._outer(self.base_term(n) ** self.power)

    def terms(self, count: int) -> list[sp.Expr]:
        """The first ``count`` terms."""
        return [self.term(self.start_index + k) for k in range(count)]

    @property
    def is_plain(self) -> bool:
        """True when the rule uses only the base fields."""
        return self.power == 1 and is_zero(self.shift) and not self.mirrored

    @property
    def accumulation_point(self) -> sp.Expr:
        """The limit of ``term(n)``."""
        return self._outer(self.limit**self.power)

    @property
    def approach(self) -> TailDirection:
        """Side from which the transformed terms approach ``accumulation_point``."""
        direction = self.direction
        if self.power < 0:
            direction = direction.flipped()
        if self.mirrored:
            direction = direction.flipped()
        return direction

    @property
    def first(self) -> sp.Expr:
        return self.term(self.start_index)

    @property
    def infimum(self) -> sp.Expr:
        if self.approach is TailDirection.FROM_ABOVE:
            return self.accumulation_point
        return self.first

    @property
    def supremum(self) -> sp.Expr:
        if self.approach is TailDirection.FROM_ABOVE:
            return self.first
        return self.accumulation_point

    @property
    def attains_infimum(self) -> bool:
        return self.approach is TailDirection.FROM_BELOW

    @property
    def attains_supremum(self) -> bool:
        return self.approach is TailDirection.FROM_ABOVE

    @property
    def head_is_zero(self) -> bool:
        return is_zero(self.first)

    def index_of(self, value: sp.Expr) -> int | None:
        """Index ``n`` with ``term(n) == value``, or None.

        The index is estimated in floating point from the closed form and then
        confirmed exactly.
        """
        if not is_real(value):
            return None
        raw = self.shift - value if self.mirrored else value - self.shift
        if compare(raw, ZERO) < 0 or (self.power < 0 and is_zero(raw)):
            return None
        try:
            base = to_complex(raw).real ** (1.0 / self.power)
            gap = (base - to_complex(self.limit).real) * self.direction.sign
            if gap <= 0:
                return None
            estimate = (to_complex(self.coefficient).real / gap) ** (1.0 / to_complex(self.exponent).real)
        except (OverflowError, ZeroDivisionError, ValueError):
            return None
        if not math.isfinite(estimate):
            return None
        center = round(estimate)
        for n in (center, center - 1, center + 1):
            if n >= self.start_index and exact_equal(self.term(n), value):
                return n
        return None

    def _float_parameters(self) -> tuple[float, float, float, float]:
        limit, coefficient, exponent, shift = (
            to_complex(v).real for v in (self.limit, self.coefficient, self.exponent, self.shift)
        )
        return limit, coefficient, exponent, shift

    def float_terms(self, start: int, stop: int) -> npt.NDArray[np.float64]:
        """Terms with ``start <= n < stop`` in floating point."""
        limit, coefficient, exponent, shift = self._float_parameters()
        n = np.arange(start, stop, dtype=np.float64)
        raw = (limit + self.direction.sign * coefficient * n ** (-exponent)) ** self.power
        return shift - raw if self.mirrored else shift + raw

    def float_indices(self, values: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        """Real index estimates of ``values`` from the closed form; NaN where no index fits."""
        limit, coefficient, exponent, shift = self._float_parameters()
        raw = shift - values if self.mirrored else values - shift
        with np.errstate(all="ignore"):
            base = np.where(raw >= 0, raw, np.nan) ** (1.0 / self.power)
            gap = (base - limit) * self.direction.sign
            return np.where(gap > 0, (coefficient / gap) ** (1.0 / exponent), np.nan)

    def horizon(self, distance: float, cap: int) -> int:
        """First index from which every term is within ``distance`` of the accumulation point.

        The deviation from the limit decreases with ``n``, so the index is found by
        doubling and bisection. The search gives up at ``cap``.
        """
        target = to_complex(self.accumulation_point).real

        def far(n: int) -> bool:
            return bool(abs(self.float_terms(n, n + 1)[0] - target) >= distance)

        low = self.start_index
        if low >= cap or not far(low):
            return min(low, cap)
        step = 1
        high = low + step
        while high < cap and far(high):
            low, step = high, step * 2
            high = low + step
        if high >= cap:
            if far(cap):
                return cap
            high = cap
        while high - low > 1:
            middle = (low + high) // 2
            if far(middle):
                low = middle
            else:
                high = middle
        return high

    def _normalized(self) -> "TailRule":
        """Fold shift and mirroring back into the base fields when ``power == 1``."""
        if self.power != 1 or (is_zero(self.shift) and not self.mirrored):
            return self
        limit = self.shift - self.limit if self.mirrored else self.shift + self.limit
        direction = self.direction.flipped() if self.mirrored else self.direction
        return TailRule(
            limit=limit,
            direction=direction,
            coefficient=self.coefficient,
            exponent=self.exponent,
            start_index=self.start_index,
        )

    def starting_at(self, start_index: int) -> "TailRule":
        """Same sequence restricted to indices ``>= start_index``."""
        return self.replace(start_index=start_index)

    def squared(self) -> "TailRule":
        """Rule of the squared terms."""
        if not (is_zero(self.shift) and not self.mirrored):
            raise OperatorModelError("Only untransformed tails can be squared")
        return self.replace(power=2 * self.power)

    def square_root(self) -> "TailRule":
        """Rule of the square-rooted terms (inverse of ``squared``)."""
        if self.power % 2 or not (is_zero(self.shift) and not self.mirrored):
            raise OperatorModelError("Tail is not the square of a representable tail")
        return self.replace(power=self.power // 2)

    def reciprocal(self) -> "TailRule":
        """Rule of ``1/term(n)``."""
        if not (is_zero(self.shift) and not self.mirrored):
            raise OperatorModelError("Only untransformed tails have representable reciprocals")
        if is_zero(self.accumulation_point):
            raise RangeNotClosedError(
                "Tail accumulates at 0, so the pseudoinverse is unbounded "
                "(a pseudoinverse is continuous if and only if the range is closed)",
            )
        if self.head_is_zero:
            raise OperatorModelError("Tail has a zero head; canonicalize the model first")
        return self.replace(power=-self.power)

    def reflected(self, level: sp.Expr) -> "TailRule":
        """Rule of ``level - term(n)``."""
        return self.replace(shift=level - self.shift, mirrored=not self.mirrored)._normalized()

    def offset(self, delta: sp.Expr) -> "TailRule":
        """Rule of ``term(n) + delta``."""
        return self.replace(shift=self.shift + delta)._normalized()

    def formula(self) -> sp.Expr:
        """Closed form of ``term(n)`` in the symbol ``n``."""
        base = self.limit + self.direction.sign * self.coefficient * N ** (-self.exponent)
        return self._outer(base**self.power)

    def describe(self) -> str:
        """Human-readable descriptor, e.g. ``1 - 1/n (n >= 2) -> 1 from below``."""
        return (
            f"{self.formula()} (n >= {self.start_index}) -> "
            f"{self.accumulation_point} from {self.approach.value}"
        )

