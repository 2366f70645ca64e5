"""Diagonal operator models and their canonical basis enumeration.

A model lists finite cells ``(value, multiplicity)`` and parametric tails. The
canonical basis enumerates finite-multiplicity cells first, in order, each
repeated by its count. The remaining streams (infinite-multiplicity cells, then
tails) are interleaved round-robin, so element ``k`` of stream ``s`` sits at
index ``F + k*S + s``.
"""

from dataclasses import dataclass
from typing import Literal

from typing_extensions import Self

import sympy as sp
from pydantic import field_validator, model_validator

from ..errors import OperatorModelError
from ..schemas.base import ONCE, ExactModel, Multiplicity, Scalar
from ..utils.exact import (
    ONE,
    ZERO,
    conjugate,
    is_nonnegative_real,
    is_unit,
    is_zero,
    modulus,
)
from .tail import TailRule


class Cell(ExactModel):
    """A diagonal value repeated ``multiplicity`` times."""

    value: Scalar
    multiplicity: Multiplicity = ONCE

    @field_validator("multiplicity", mode="before")
    @classmethod
    def _coerce_multiplicity(cls, v: object) -> Multiplicity:
        return Multiplicity.coerce(v)


class PhasedTail(ExactModel):
    """Tail of a normal model: ``entry(n) = phase * rule.term(n)``."""

    rule: TailRule
    phase: Scalar = ONE

    @model_validator(mode="after")
    def _check_phase(self) -> Self:
        if not is_unit(self.phase):
            raise ValueError(f"Tail phase must have modulus 1, got {self.phase}")
        return self

    def term(self, n: int) -> sp.Expr:
        return self.phase * self.rule.term(n)

    @property
    def accumulation_point(self) -> sp.Expr:
        return self.phase * self.rule.accumulation_point

    def index_of(self, value: sp.Expr) -> int | None:
        """Index ``n`` with ``term(n) == value``, or None."""
        return self.rule.index_of(sp.expand(value * conjugate(self.phase)))


@dataclass(frozen=True)
class Location:
    """Source of one canonical basis vector.

    ``offset`` is the copy number for cells and ``n - start_index`` for tails.
    """

    kind: Literal["cell", "tail"]
    index: int
    offset: int


@dataclass(frozen=True)
class CanonicalLayout:
    """Bijection between canonical basis indices and model cells/tail terms."""

    finite_offsets: tuple[int | None, ...]
    finite_counts: tuple[int, ...]
    finite_count: int
    streams: tuple[tuple[Literal["cell", "tail"], int], ...]

    @classmethod
    def build(cls, cells: tuple[Cell, ...], tail_count: int) -> "CanonicalLayout":
        offsets: list[int | None] = []
        counts: list[int] = []
        finite_count = 0
        streams: list[tuple[Literal["cell", "tail"], int]] = []
        for i, cell in enumerate(cells):
            if cell.multiplicity.count is None:
                offsets.append(None)
                counts.append(0)
                streams.append(("cell", i))
            else:
                offsets.append(finite_count)
                counts.append(cell.multiplicity.count)
                finite_count += cell.multiplicity.count
        streams.extend(("tail", t) for t in range(tail_count))
        return cls(tuple(offsets), tuple(counts), finite_count, tuple(streams))

    @property
    def stream_count(self) -> int:
        return len(self.streams)

    @property
    def dimension(self) -> int | None:
        """Number of basis vectors, or None for infinite-dimensional models."""
        return None if self.streams else self.finite_count

    def stream_of(self, kind: Literal["cell", "tail"], index: int) -> int:
        return self.streams.index((kind, index))

    def position(self, location: Location) -> int:
        """Canonical index of a location."""
        if location.kind == "cell":
            offset = self.finite_offsets[location.index]
            if offset is not None:
                return offset + location.offset
        stream = self.stream_of(location.kind, location.index)
        return self.finite_count + location.offset * self.stream_count + stream

    def stream_position(self, stream: int, offset: int) -> int:
        return self.finite_count + offset * self.stream_count + stream

    def locate(self, position: int) -> Location:
        """Location of the canonical basis vector with index ``position``."""
        if position < 0:
            raise IndexError(f"Negative basis index {position}")
        if position < self.finite_count:
            for i, offset in enumerate(self.finite_offsets):
                if offset is not None and offset <= position < offset + self.finite_counts[i]:
                    return Location("cell", i, position - offset)
        if not self.streams:
            raise IndexError(f"Basis index {position} beyond dimension {self.finite_count}")
        offset, stream = divmod(position - self.finite_count, self.stream_count)
        kind, index = self.streams[stream]
        return Location(kind, index, offset)


class CoordinateSubspace(ExactModel):
    """Closed span of canonical basis vectors: finitely many indices plus whole streams."""

    indices: tuple[int, ...] = ()
    streams: tuple[int, ...] = ()

    @field_validator("indices", "streams")
    @classmethod
    def _sorted_unique(cls, v: tuple[int, ...]) -> tuple[int, ...]:
        if any(i < 0 for i in v):
            raise ValueError("Basis and stream indices must be nonnegative")
        return tuple(sorted(set(v)))

    def positions(self, layout: CanonicalLayout, n: int) -> list[int]:
        """Canonical indices below ``n`` spanned by the subspace."""
        chosen = set(i for i in self.indices if i < n)
        for stream in self.streams:
            offset = 0
            while (position := layout.stream_position(stream, offset)) < n:
                chosen.add(position)
                offset += 1
        return sorted(chosen)

    @property
    def is_empty(self) -> bool:
        return not self.indices and not self.streams


class _DiagonalModel(ExactModel):
    cells: tuple[Cell, ...] = ()

    def _tail_rules(self) -> tuple[TailRule, ...]:
        raise NotImplementedError

    def _tail_value(self, index: int, n: int) -> sp.Expr:
        raise NotImplementedError

    @property
    def layout(self) -> CanonicalLayout:
        return CanonicalLayout.build(self.cells, len(self._tail_rules()))

    @property
    def dimension(self) -> int | None:
        return self.layout.dimension

    @property
    def is_empty(self) -> bool:
        return not self.cells and not self._tail_rules()

    def value_at(self, location: Location) -> sp.Expr:
        if location.kind == "cell":
            return self.cells[location.index].value
        rule = self._tail_rules()[location.index]
        return self._tail_value(location.index, rule.start_index + location.offset)

    def entry(self, position: int) -> sp.Expr:
        """Diagonal entry at canonical index ``position``."""
        return self.value_at(self.layout.locate(position))

    def entries(self, n: int) -> list[sp.Expr]:
        """First ``n`` diagonal entries in canonical order."""
        if n < 1:
            raise ValueError("n must be >= 1")
        layout = self.layout
        if layout.dimension is not None and layout.dimension < n:
            raise OperatorModelError(f"Model has only {layout.dimension} basis vectors, {n} requested")
        return [self.value_at(layout.locate(i)) for i in range(n)]


class PositiveDiagonalModel(_DiagonalModel):
    """Positive diagonal operator: nonnegative cells plus tails."""

    tails: tuple[TailRule, ...] = ()

    @model_validator(mode="after")
    def _check_cells(self) -> Self:
        for i, cell in enumerate(self.cells):
            if not is_nonnegative_real(cell.value):
                raise ValueError(f"Cell {i} value must be a nonnegative real, got {cell.value}")
        return self

    def _tail_rules(self) -> tuple[TailRule, ...]:
        return self.tails

    def _tail_value(self, index: int, n: int) -> sp.Expr:
        return self.tails[index].term(n)

    def canonical(self) -> "PositiveDiagonalModel":
        """Split zero tail heads into ``(0, 1)`` cells."""
        heads = [rule for rule in self.tails if rule.head_is_zero]
        if not heads:
            return self
        return PositiveDiagonalModel(
            cells=self.cells + tuple(Cell(value=ZERO) for _ in heads),
            tails=tuple(
                rule.starting_at(rule.start_index + 1) if rule.head_is_zero else rule
                for rule in self.tails
            ),
        )

    def as_normal(self) -> "NormalDiagonalModel":
        return NormalDiagonalModel(
            cells=self.cells,
            tails=tuple(PhasedTail(rule=rule) for rule in self.tails),
        )

    def restricted(self, subspace: CoordinateSubspace) -> "PositiveDiagonalModel":
        cells, streams = _restrict(self, subspace)
        return PositiveDiagonalModel(
            cells=tuple(cells) + tuple(self.cells[i] for kind, i in streams if kind == "cell"),
            tails=tuple(self.tails[i] for kind, i in streams if kind == "tail"),
        )

    def support(self) -> "PositiveDiagonalModel":
        """Restriction to the orthogonal complement of the kernel."""
        canonical = self.canonical()
        return PositiveDiagonalModel(
            cells=tuple(c for c in canonical.cells if not is_zero(c.value)),
            tails=canonical.tails,
        )


class NormalDiagonalModel(_DiagonalModel):
    """Normal diagonal operator: complex cells plus phased tails."""

    tails: tuple[PhasedTail, ...] = ()

    def _tail_rules(self) -> tuple[TailRule, ...]:
        return tuple(t.rule for t in self.tails)

    def _tail_value(self, index: int, n: int) -> sp.Expr:
        return self.tails[index].term(n)

    def modulus(self) -> PositiveDiagonalModel:
        """``|T|``: drop the phases."""
        return PositiveDiagonalModel(
            cells=tuple(Cell(value=modulus(c.value), multiplicity=c.multiplicity) for c in self.cells),
            tails=tuple(t.rule for t in self.tails),
        )

    def adjoint(self) -> "NormalDiagonalModel":
        return NormalDiagonalModel(
            cells=tuple(c.replace(value=conjugate(c.value)) for c in self.cells),
            tails=tuple(t.replace(phase=conjugate(t.phase)) for t in self.tails),
        )

    def canonical(self) -> "NormalDiagonalModel":
        """Split zero tail heads into ``(0, 1)`` cells."""
        heads = [t for t in self.tails if t.rule.head_is_zero]
        if not heads:
            return self
        return NormalDiagonalModel(
            cells=self.cells + tuple(Cell(value=ZERO) for _ in heads),
            tails=tuple(
                t.replace(rule=t.rule.starting_at(t.rule.start_index + 1)) if t.rule.head_is_zero else t
                for t in self.tails
            ),
        )

    def restricted(self, subspace: CoordinateSubspace) -> "NormalDiagonalModel":
        cells, streams = _restrict(self, subspace)
        return NormalDiagonalModel(
            cells=tuple(cells) + tuple(self.cells[i] for kind, i in streams if kind == "cell"),
            tails=tuple(self.tails[i] for kind, i in streams if kind == "tail"),
        )

    def support(self) -> "NormalDiagonalModel":
        """Restriction to the orthogonal complement of the kernel."""
        canonical = self.canonical()
        return NormalDiagonalModel(
            cells=tuple(c for c in canonical.cells if not is_zero(c.value)),
            tails=canonical.tails,
        )


def _restrict(
    model: _DiagonalModel,
    subspace: CoordinateSubspace,
) -> tuple[list[Cell], list[tuple[Literal["cell", "tail"], int]]]:
    layout = model.layout
    for stream in subspace.streams:
        if stream >= layout.stream_count:
            raise OperatorModelError(f"Stream {stream} does not exist (model has {layout.stream_count})")
    selected = [layout.streams[s] for s in subspace.streams]
    cells: list[Cell] = []
    for position in subspace.indices:
        if layout.dimension is not None and position >= layout.dimension:
            raise OperatorModelError(f"Basis index {position} beyond dimension {layout.dimension}")
        location = layout.locate(position)
        if (location.kind, location.index) in selected:
            continue
        cells.append(Cell(value=model.value_at(location)))
    return cells, selected


def prepend_zeros(model: PositiveDiagonalModel, count: int) -> PositiveDiagonalModel:
    """Model with ``count`` zero entries placed before every other basis vector."""
    if count == 0:
        return model
    cells = model.cells
    first = cells[0] if cells else None
    if first is not None and first.multiplicity.count is not None and is_zero(first.value):
        merged = first.replace(multiplicity=first.multiplicity + Multiplicity.finite(count))
        return model.replace(cells=(merged, *cells[1:]))
    return model.replace(cells=(Cell(value=ZERO, multiplicity=count), *cells))
