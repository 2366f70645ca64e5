"""Base schema definitions shared by models, descriptions and reports."""

from typing import Annotated, Any

import sympy as sp
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, PlainSerializer

from ..utils.exact import format_expr, to_expr

Scalar = Annotated[
    sp.Expr,
    BeforeValidator(to_expr),
    PlainSerializer(format_expr, return_type=str, when_used="json"),
]
"""An exact sympy scalar, accepted from numbers or numeric text."""


class ExactModel(BaseModel):
    """Immutable base class for every value type holding exact scalars."""

    model_config = ConfigDict(
        extra="forbid",
        frozen=True,
        arbitrary_types_allowed=True,
    )

    def replace(self, **changes: Any) -> Any:
        """Return a validated copy with some fields changed."""
        data = {name: getattr(self, name) for name in type(self).model_fields}
        data.update(changes)
        return type(self)(**data)


class Multiplicity(ExactModel):
    """Eigenvalue multiplicity: a positive count, or infinite when ``count`` is None."""

    count: int | None = Field(default=None, ge=1)

    @classmethod
    def finite(cls, count: int) -> "Multiplicity":
        """Finite multiplicity ``count >= 1``."""
        return cls(count=count)

    @classmethod
    def infinite(cls) -> "Multiplicity":
        """Infinite multiplicity."""
        return cls(count=None)

    @classmethod
    def coerce(cls, value: Any) -> "Multiplicity":
        """Accept a Multiplicity, a positive int, or the text ``"inf"``."""
        if isinstance(value, Multiplicity):
            return value
        if isinstance(value, dict):
            return cls(**value)
        if isinstance(value, str):
            if value.strip().lower() in {"inf", "infinite", "infinity"}:
                return cls.infinite()
            if value.strip().isdigit():
                return cls.finite(int(value))
            raise ValueError(f"Invalid multiplicity {value!r}")
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValueError(f"Invalid multiplicity {value!r}")
        return cls.finite(value)

    @property
    def is_infinite(self) -> bool:
        return self.count is None

    def __add__(self, other: "Multiplicity") -> "Multiplicity":
        if self.count is None or other.count is None:
            return Multiplicity.infinite()
        return Multiplicity.finite(self.count + other.count)

    def __str__(self) -> str:
        return "inf" if self.count is None else str(self.count)

    def to_document(self) -> int | str:
        """Value used in JSON documents."""
        return "inf" if self.count is None else self.count


ONCE = Multiplicity.finite(1)
