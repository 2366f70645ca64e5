"""Operator-description documents.

A description mirrors one model type. Scalars stay as the document wrote them
(numbers or numeric text) so that emitting a parsed document reproduces it;
``to_model()`` turns a description into the validated domain model.
"""

from typing import Annotated, Any, Literal

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError

from ..errors import OperatorModelError
from ..multiplication import CellKind, MeasureCell, MeasureSpaceModel, SymbolTail
from ..operators import (
    Cell,
    FiniteMatrix,
    NormalDiagonalModel,
    PhasedTail,
    PositiveDiagonalModel,
    ShiftedDiagonalModel,
    ShiftForm,
    TailDirection,
    TailRule,
)
from .base import Multiplicity

SCHEMA_VERSION = "1"

ScalarText = int | float | str
"""A number, or numeric text such as ``"1/2"``, ``"2*I"`` or ``"exp(I*pi/4)"``."""

MultiplicityText = Annotated[int, Field(ge=1)] | Literal["inf"]


def _build(factory: Any, where: str, **fields: Any) -> Any:
    """Construct a domain model, reporting invariant violations with their location."""
    try:
        return factory(**fields)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in error['loc']) or where}: {error['msg']}" for error in e.errors()
        )
        raise OperatorModelError(f"{where}: {problems}") from e
    except (TypeError, ValueError) as e:
        raise OperatorModelError(f"{where}: {e}") from e


class DocumentModel(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class CellDocument(DocumentModel):
    value: ScalarText
    multiplicity: MultiplicityText = 1

    def to_cell(self, where: str) -> Cell:
        return _build(Cell, where, value=self.value, multiplicity=Multiplicity.coerce(self.multiplicity))


class TailDocument(DocumentModel):
    limit: ScalarText
    direction: TailDirection
    coefficient: ScalarText
    exponent: ScalarText
    start_index: int = Field(default=1, ge=1)

    def to_rule(self, where: str) -> TailRule:
        return _build(
            TailRule,
            where,
            limit=self.limit,
            direction=self.direction,
            coefficient=self.coefficient,
            exponent=self.exponent,
            start_index=self.start_index,
        )


class PhasedTailDocument(TailDocument):
    phase: ScalarText = 1


class MeasureCellDocument(DocumentModel):
    label: str
    kind: CellKind = CellKind.ATOM
    weight: ScalarText = 1
    value: ScalarText


class SymbolTailDocument(PhasedTailDocument):
    label: str = "tail"


class DescriptionBase(DocumentModel):
    schema_version: Literal["1"] = SCHEMA_VERSION
    name: str = Field(min_length=1)
    notes: str = ""


class _DiagonalPart(DescriptionBase):
    cells: list[CellDocument] = Field(default_factory=list)
    tails: list[TailDocument] = Field(default_factory=list)

    def _positive(self) -> PositiveDiagonalModel:
        cells = tuple(c.to_cell(f"cells.{i}") for i, c in enumerate(self.cells))
        tails = tuple(t.to_rule(f"tails.{i}") for i, t in enumerate(self.tails))
        return _build(PositiveDiagonalModel, self.name, cells=cells, tails=tails)


class PositiveDiagonalDescription(_DiagonalPart):
    kind: Literal["positive-diagonal"] = "positive-diagonal"

    def to_model(self) -> PositiveDiagonalModel:
        return self._positive()


class NormalDiagonalDescription(DescriptionBase):
    kind: Literal["normal-diagonal"] = "normal-diagonal"
    cells: list[CellDocument] = Field(default_factory=list)
    tails: list[PhasedTailDocument] = Field(default_factory=list)

    def to_model(self) -> NormalDiagonalModel:
        cells = tuple(c.to_cell(f"cells.{i}") for i, c in enumerate(self.cells))
        tails = tuple(
            _build(PhasedTail, f"tails.{i}", rule=t.to_rule(f"tails.{i}"), phase=t.phase) for i, t in enumerate(self.tails)
        )
        return _build(NormalDiagonalModel, self.name, cells=cells, tails=tails)


class ShiftedDiagonalDescription(_DiagonalPart):
    kind: Literal["shifted-diagonal"] = "shifted-diagonal"
    shift_order: int = Field(ge=0)
    form: ShiftForm = ShiftForm.SHIFT

    def to_model(self) -> ShiftedDiagonalModel:
        return _build(ShiftedDiagonalModel, self.name, shift_order=self.shift_order, diag=self._positive(), form=self.form)


class DirectSumDescription(_DiagonalPart):
    """``S ⊕ T`` with a dense positive block ``S`` and a positive diagonal ``T``."""

    kind: Literal["direct-sum"] = "direct-sum"
    block: list[list[list[float] | float]]

    def block_matrix(self) -> FiniteMatrix:
        return _build(FiniteMatrix.from_pairs, "block", rows=self.block)

    def to_model(self) -> tuple[FiniteMatrix, PositiveDiagonalModel]:
        return self.block_matrix(), self._positive()


class MultiplicationDescription(DescriptionBase):
    kind: Literal["multiplication"] = "multiplication"
    measure_cells: list[MeasureCellDocument] = Field(default_factory=list)
    tail_families: list[SymbolTailDocument] = Field(default_factory=list)

    def to_model(self) -> MeasureSpaceModel:
        cells = tuple(
            _build(MeasureCell, f"measure_cells.{i}", label=c.label, kind=c.kind, weight=c.weight, symbol_value=c.value)
            for i, c in enumerate(self.measure_cells)
        )
        tails = tuple(
            _build(SymbolTail, f"tail_families.{i}", label=t.label, rule=t.to_rule(f"tail_families.{i}"), phase=t.phase)
            for i, t in enumerate(self.tail_families)
        )
        return _build(MeasureSpaceModel, self.name, cells=cells, tail_families=tails)


class FiniteMatrixDescription(DescriptionBase):
    kind: Literal["finite-matrix"] = "finite-matrix"
    matrix: list[list[list[float] | float]]

    def to_model(self) -> FiniteMatrix:
        return _build(FiniteMatrix.from_pairs, "matrix", rows=self.matrix)


OperatorDescription = Annotated[
    PositiveDiagonalDescription
    | NormalDiagonalDescription
    | ShiftedDiagonalDescription
    | DirectSumDescription
    | MultiplicationDescription
    | FiniteMatrixDescription,
    Field(discriminator="kind"),
]

DESCRIPTION_ADAPTER: TypeAdapter[OperatorDescription] = TypeAdapter(OperatorDescription)

DESCRIPTION_KINDS = (
    "positive-diagonal",
    "normal-diagonal",
    "shifted-diagonal",
    "direct-sum",
    "multiplication",
    "finite-matrix",
)
