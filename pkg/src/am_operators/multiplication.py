"""Multiplication operators ``M_f`` on countable unions of measure cells.

``X`` is modeled as finitely many labeled cells with constant ``f`` (an atom
contributes one basis vector, a diffuse cell infinitely many) plus countable
families of atoms whose ``|f|`` follows a tail rule. Null sets never appear.
"""

from enum import Enum
from typing import Literal

from typing_extensions import Self

import sympy as sp
from pydantic import Field, model_validator

from .classify import Reason, Verdict, classify_am_positive, classify_an_positive
from .errors import OperatorModelError
from .operators import (
    Cell,
    PositiveDiagonalModel,
    TailDirection,
    TailRule,
    is_min_attaining,
    is_norm_attaining,
    min_modulus,
    operator_norm,
)
from .schemas.base import ExactModel, Multiplicity, Scalar
from .utils.exact import (
    ONE,
    compare,
    exact_equal,
    exact_max,
    exact_min,
    is_positive_real,
    is_unit,
    modulus,
    sort_key,
    unique,
)


class CellKind(str, Enum):
    ATOM = "atom"
    DIFFUSE = "diffuse"


class MeasureCell(ExactModel):
    """A set of positive measure ``weight`` on which ``f`` equals ``symbol_value``."""

    label: str
    kind: CellKind = CellKind.ATOM
    weight: Scalar = ONE
    symbol_value: Scalar

    @model_validator(mode="after")
    def _check_weight(self) -> Self:
        if not is_positive_real(self.weight):
            raise ValueError(f"Cell {self.label!r} needs a positive weight, got {self.weight}")
        return self

    @property
    def level(self) -> sp.Expr:
        return modulus(self.symbol_value)


class SymbolTail(ExactModel):
    """Countably many atoms, the ``n``-th carrying ``f = phase * rule.term(n)``."""

    label: str = "tail"
    rule: TailRule
    phase: Scalar = ONE

    @model_validator(mode="after")
    def _check_phase(self) -> Self:
        if not is_unit(self.phase):
            raise ValueError(f"Tail phase must have modulus 1, got {self.phase}")
        return self

    def atom_label(self, n: int) -> str:
        return f"{self.label}[{n}]"


class MeasureSpaceModel(ExactModel):
    cells: tuple[MeasureCell, ...] = ()
    tail_families: tuple[SymbolTail, ...] = ()

    @model_validator(mode="after")
    def _check_labels(self) -> Self:
        labels = [c.label for c in self.cells] + [t.label for t in self.tail_families]
        if len(set(labels)) != len(labels):
            raise ValueError("Cell and tail labels must be distinct")
        return self

    @property
    def is_empty(self) -> bool:
        return not self.cells and not self.tail_families


class MultiplicationAttainment(ExactModel):
    """Whether ``|f|`` equals an essential bound on a set of positive measure."""

    attained: bool
    value: Scalar
    witness: str | None = None


def _require_nonempty(model: MeasureSpaceModel) -> None:
    if model.is_empty:
        raise OperatorModelError("The measure space has no cells of positive measure")


def ess_inf(model: MeasureSpaceModel) -> sp.Expr:
    """Essential infimum of ``|f|``; every cell has positive measure so this is a plain infimum."""
    _require_nonempty(model)
    return exact_min([c.level for c in model.cells] + [t.rule.infimum for t in model.tail_families])


def ess_sup(model: MeasureSpaceModel) -> sp.Expr:
    """Essential supremum of ``|f|``."""
    _require_nonempty(model)
    return exact_max([c.level for c in model.cells] + [t.rule.supremum for t in model.tail_families])


def min_modulus_mult(model: MeasureSpaceModel) -> sp.Expr:
    """``m(M_f) = ess inf |f|``."""
    return ess_inf(model)


def norm_mult(model: MeasureSpaceModel) -> sp.Expr:
    """``||M_f|| = ess sup |f|``."""
    return ess_sup(model)


def _attainment(model: MeasureSpaceModel, lowest: bool) -> MultiplicationAttainment:
    target = ess_inf(model) if lowest else ess_sup(model)
    for cell in model.cells:
        if exact_equal(cell.level, target):
            return MultiplicationAttainment(attained=True, value=target, witness=cell.label)
    for tail in model.tail_families:
        rule = tail.rule
        realised = rule.attains_infimum if lowest else rule.attains_supremum
        if realised and exact_equal(rule.first, target):
            return MultiplicationAttainment(attained=True, value=target, witness=tail.atom_label(rule.start_index))
    return MultiplicationAttainment(attained=False, value=target)


def is_min_attaining_mult(model: MeasureSpaceModel) -> MultiplicationAttainment:
    """True iff ``|f| = ess inf |f|`` on some set of positive measure."""
    return _attainment(model, lowest=True)


def is_norm_attaining_mult(model: MeasureSpaceModel) -> MultiplicationAttainment:
    """True iff ``|f| = ess sup |f|`` on some set of positive measure."""
    return _attainment(model, lowest=False)


def to_diagonal(model: MeasureSpaceModel) -> PositiveDiagonalModel:
    """``M_{|f|}`` as a diagonal model; cells keep their order."""
    return PositiveDiagonalModel(
        cells=tuple(
            Cell(
                value=cell.level,
                multiplicity=Multiplicity.infinite() if cell.kind is CellKind.DIFFUSE else Multiplicity.finite(1),
            )
            for cell in model.cells
        ),
        tails=tuple(t.rule for t in model.tail_families),
    )


class Layer(ExactModel):
    """``A_i``: the part of the remaining space where ``|f|`` equals the current bound."""

    index: int
    level: Scalar
    cells: tuple[str, ...] = ()
    atoms: tuple[tuple[int, int], ...] = ()


class MultiplicationClassification(ExactModel):
    """Layered exhaustion verdict.

    ``leading_layers`` are the first layers of the sweep towards the essential
    point, ``closing_layers`` the finitely many layers on the far side of it.
    When ``sweep_is_infinite`` the leading layers are a prefix of an infinite
    sequence.
    """

    verdict: Verdict
    reason: Reason
    essential_point: Scalar | None = None
    leading_layers: tuple[Layer, ...] = ()
    closing_layers: tuple[Layer, ...] = ()
    sweep_is_infinite: bool = False

    @property
    def layers(self) -> tuple[Layer, ...]:
        if self.sweep_is_infinite:
            return self.leading_layers
        return self.leading_layers + self.closing_layers


def _essential_points(model: MeasureSpaceModel) -> list[sp.Expr]:
    points = [t.rule.accumulation_point for t in model.tail_families]
    points += [c.level for c in model.cells if c.kind is CellKind.DIFFUSE]
    return unique(points)


def _sweep(
    model: MeasureSpaceModel,
    point: sp.Expr,
    direction: Literal["up", "down"],
    depth: int,
) -> tuple[list[Layer], list[Layer], bool]:
    """Peel layers of equal ``|f|`` moving towards ``point``, then past it.

    Cells strictly before ``point`` and every tail term are merged in sweep
    order; cells at or beyond ``point`` form the closing layers.
    """
    ascending = direction == "up"

    def before(value: sp.Expr) -> bool:
        order = compare(value, point)
        return order < 0 if ascending else order > 0

    def precedes(left: sp.Expr, right: sp.Expr) -> bool:
        order = compare(left, right)
        return order < 0 if ascending else order > 0

    near = [c for c in model.cells if before(c.level)]
    far = [c for c in model.cells if not before(c.level)]
    cursors = {t: tail.rule.start_index for t, tail in enumerate(model.tail_families)}
    pending = sorted(near, key=lambda c: sort_key(c.level), reverse=not ascending)

    leading: list[Layer] = []
    while len(leading) < depth and (pending or cursors):
        heads = [c.level for c in pending[:1]] + [model.tail_families[t].rule.term(n) for t, n in cursors.items()]
        level = heads[0]
        for value in heads[1:]:
            if precedes(value, level):
                level = value
        cells = []
        while pending and exact_equal(pending[0].level, level):
            cells.append(pending.pop(0).label)
        atoms = []
        for t, n in list(cursors.items()):
            if exact_equal(model.tail_families[t].rule.term(n), level):
                atoms.append((t, n))
                cursors[t] = n + 1
        leading.append(Layer(index=len(leading), level=level, cells=tuple(cells), atoms=tuple(atoms)))

    closing: list[Layer] = []
    for cell in sorted(far, key=lambda c: sort_key(c.level), reverse=not ascending):
        if closing and exact_equal(closing[-1].level, cell.level):
            last = closing[-1]
            closing[-1] = last.replace(cells=last.cells + (cell.label,))
        else:
            closing.append(Layer(index=len(closing), level=cell.level, cells=(cell.label,)))
    return leading, closing, bool(cursors)


def _classify(
    model: MeasureSpaceModel,
    wrong_side: TailDirection,
    direction: Literal["up", "down"],
    depth: int,
) -> MultiplicationClassification:
    holds, fails = (Verdict.AM, Verdict.NOT_AM) if direction == "up" else (Verdict.AN, Verdict.NOT_AN)
    side_reason = (
        Reason.INFINITELY_MANY_EIGENVALUES_ABOVE_ME if direction == "up" else Reason.INFINITELY_MANY_EIGENVALUES_BELOW_ME
    )
    points = _essential_points(model)
    if len(points) != 1:
        return MultiplicationClassification(verdict=fails, reason=Reason.ESSENTIAL_SPECTRUM_NOT_SINGLETON)
    point = points[0]
    if any(t.rule.approach is wrong_side for t in model.tail_families):
        # The first layer beyond ``point`` has measure zero: the bound is approached but never met.
        return MultiplicationClassification(verdict=fails, reason=side_reason, essential_point=point)
    leading, closing, infinite = _sweep(model, point, direction, depth)
    offset = len(leading)
    return MultiplicationClassification(
        verdict=holds,
        reason=Reason.OK,
        essential_point=point,
        leading_layers=tuple(leading),
        closing_layers=tuple(layer.replace(index=offset + layer.index) for layer in closing),
        sweep_is_infinite=infinite,
    )


def classify_am_mult(model: MeasureSpaceModel, depth: int = 32) -> MultiplicationClassification:
    """AM by exhausting ``X`` with sets where ``|f|`` equals the current essential infimum.

    Layers are indexed from 0. At most ``depth`` layers of an infinite sweep are listed.
    """
    return _classify(model, TailDirection.FROM_ABOVE, "up", depth)


def classify_an_mult(model: MeasureSpaceModel, depth: int = 32) -> MultiplicationClassification:
    """AN by exhausting ``X`` from the top with essential suprema."""
    return _classify(model, TailDirection.FROM_BELOW, "down", depth)


def layer_levels_hold(model: MeasureSpaceModel, classification: MultiplicationClassification) -> bool:
    """Every listed layer member has ``|f|`` equal to its layer's level."""
    by_label = {c.label: c for c in model.cells}
    for layer in classification.layers:
        for label in layer.cells:
            if not exact_equal(by_label[label].level, layer.level):
                return False
        for t, n in layer.atoms:
            if not exact_equal(model.tail_families[t].rule.term(n), layer.level):
                return False
    return True


class DiagonalReductionCheck(ExactModel):
    """Agreement of the measure-space criteria with the diagonal reduction."""

    min_modulus_equal: bool
    norm_equal: bool
    min_attainment_equal: bool
    norm_attainment_equal: bool
    am_equal: bool
    an_equal: bool
    layers_consistent: bool = Field(default=True)

    @property
    def holds(self) -> bool:
        return all(
            (
                self.min_modulus_equal,
                self.norm_equal,
                self.min_attainment_equal,
                self.norm_attainment_equal,
                self.am_equal,
                self.an_equal,
                self.layers_consistent,
            ),
        )


def check_diagonal_reduction(model: MeasureSpaceModel, depth: int = 32) -> DiagonalReductionCheck:
    diagonal = to_diagonal(model)
    am = classify_am_mult(model, depth)
    an = classify_an_mult(model, depth)
    return DiagonalReductionCheck(
        min_modulus_equal=exact_equal(min_modulus_mult(model), min_modulus(diagonal)),
        norm_equal=exact_equal(norm_mult(model), operator_norm(diagonal)),
        min_attainment_equal=is_min_attaining_mult(model).attained == is_min_attaining(diagonal).attained,
        norm_attainment_equal=is_norm_attaining_mult(model).attained == is_norm_attaining(diagonal).attained,
        am_equal=am.verdict is classify_am_positive(diagonal).verdict,
        an_equal=an.verdict is classify_an_positive(diagonal).verdict,
        layers_consistent=layer_levels_hold(model, am) and layer_levels_hold(model, an),
    )


__all__ = [
    "CellKind",
    "DiagonalReductionCheck",
    "Layer",
    "MeasureCell",
    "MeasureSpaceModel",
    "MultiplicationAttainment",
    "MultiplicationClassification",
    "SymbolTail",
    "check_diagonal_reduction",
    "classify_am_mult",
    "classify_an_mult",
    "ess_inf",
    "ess_sup",
    "is_min_attaining_mult",
    "is_norm_attaining_mult",
    "layer_levels_hold",
    "min_modulus_mult",
    "norm_mult",
    "to_diagonal",
]
