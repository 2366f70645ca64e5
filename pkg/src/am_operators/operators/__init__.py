"""Symbolic operator models and their basic functionals."""

import numpy as np
import sympy as sp

from ..errors import OperatorModelError, RangeNotClosedError
from ..schemas.base import ExactModel, Scalar
from ..utils.exact import (
    ZERO,
    compare,
    dagger,
    exact_equal,
    exact_max,
    exact_min,
    is_zero,
    modulus as scalar_modulus,
    to_complex,
)
from .diagonal import (
    CanonicalLayout,
    Cell,
    CoordinateSubspace,
    Location,
    NormalDiagonalModel,
    PhasedTail,
    PositiveDiagonalModel,
    prepend_zeros,
)
from .matrix import FiniteMatrix
from .shifted import ShiftedDiagonalModel, ShiftForm
from .tail import TailDirection, TailRule

DiagonalModel = PositiveDiagonalModel | NormalDiagonalModel
OperatorModel = PositiveDiagonalModel | NormalDiagonalModel | ShiftedDiagonalModel


class Attainment(ExactModel):
    """Whether an extremal value is realised by a basis vector."""

    attained: bool
    value: Scalar
    witness: int | None = None


def entries(model: DiagonalModel, n: int) -> list[sp.Expr]:
    """First ``n`` diagonal entries in canonical enumeration."""
    if isinstance(model, ShiftedDiagonalModel):
        raise TypeError("entries are defined for diagonal models; use truncate for shifted models")
    return model.entries(n)


def truncate(model: OperatorModel, n: int) -> FiniteMatrix:
    """The ``n x n`` compression to the first ``n`` canonical basis vectors."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if isinstance(model, ShiftedDiagonalModel):
        return model.truncate(n)
    return FiniteMatrix(np.diag([to_complex(e) for e in model.entries(n)]))


def _moduli(model: DiagonalModel) -> PositiveDiagonalModel:
    return model.modulus() if isinstance(model, NormalDiagonalModel) else model


def operator_norm(model: OperatorModel) -> sp.Expr:
    """``sup |entries|``; the shift is an isometry so shifted models use ``D``."""
    if isinstance(model, ShiftedDiagonalModel):
        return operator_norm(model.diag)
    positive = _moduli(model)
    candidates = [c.value for c in positive.cells] + [rule.supremum for rule in positive.tails]
    return exact_max(candidates) if candidates else ZERO


def min_modulus(model: OperatorModel) -> sp.Expr:
    """``m(T) = inf ||Tx||`` over unit vectors."""
    if isinstance(model, ShiftedDiagonalModel):
        if model.form is ShiftForm.CO_SHIFT and model.shift_order > 0:
            return ZERO
        return min_modulus(model.diag)
    positive = _moduli(model)
    candidates = [c.value for c in positive.cells] + [rule.infimum for rule in positive.tails]
    if not candidates:
        raise OperatorModelError("The empty model has no unit vectors")
    return exact_min(candidates)


def _attainment(model: DiagonalModel, lowest: bool) -> Attainment:
    positive = _moduli(model)
    layout = positive.layout
    target = min_modulus(positive) if lowest else operator_norm(positive)
    witnesses: list[int] = []
    for i, cell in enumerate(positive.cells):
        if exact_equal(cell.value, target):
            witnesses.append(layout.position(Location("cell", i, 0)))
    for t, rule in enumerate(positive.tails):
        realised = rule.attains_infimum if lowest else rule.attains_supremum
        if realised and exact_equal(rule.first, target):
            witnesses.append(layout.position(Location("tail", t, 0)))
    return Attainment(attained=bool(witnesses), value=target, witness=min(witnesses) if witnesses else None)


def is_min_attaining(model: DiagonalModel) -> Attainment:
    """Whether ``m(T)`` is attained; the witness is a minimizing canonical index."""
    return _attainment(model, lowest=True)


def is_norm_attaining(model: DiagonalModel) -> Attainment:
    """Whether ``||T||`` is attained; the witness is a maximizing canonical index."""
    if model.is_empty:
        return Attainment(attained=False, value=ZERO)
    return _attainment(model, lowest=False)


def canonical(model: DiagonalModel) -> DiagonalModel:
    """The model with zero tail heads split off into cells."""
    return model.canonical()


def _check_closed_range(rules: list[TailRule]) -> None:
    for rule in rules:
        if is_zero(rule.accumulation_point):
            raise RangeNotClosedError(
                f"0 accumulates along the tail {rule.describe()}: the range is not closed, "
                "and a pseudoinverse is continuous if and only if the range is closed",
            )


def pseudoinverse(model: OperatorModel) -> OperatorModel:
    """Moore-Penrose inverse, applying the pseudo-reciprocal entrywise."""
    if isinstance(model, ShiftedDiagonalModel):
        inverse = pseudoinverse(model.diag)
        return model.replace(diag=inverse, form=model.form.flipped())
    if isinstance(model, PositiveDiagonalModel):
        positive = model.canonical()
        _check_closed_range(list(positive.tails))
        return PositiveDiagonalModel(
            cells=tuple(c.replace(value=dagger(c.value)) for c in positive.cells),
            tails=tuple(rule.reciprocal() for rule in positive.tails),
        )
    normal = model.canonical()
    _check_closed_range([t.rule for t in normal.tails])
    return NormalDiagonalModel(
        cells=tuple(c.replace(value=dagger(c.value)) for c in normal.cells),
        tails=tuple(
            PhasedTail(rule=t.rule.reciprocal(), phase=sp.conjugate(t.phase)) for t in normal.tails
        ),
    )


def adjoint(model: OperatorModel) -> OperatorModel:
    """``T*``: conjugated entries, or the flipped shift form."""
    if isinstance(model, PositiveDiagonalModel):
        return model
    return model.adjoint()


def square(model: PositiveDiagonalModel) -> PositiveDiagonalModel:
    """Entrywise square."""
    return PositiveDiagonalModel(
        cells=tuple(c.replace(value=c.value**2) for c in model.cells),
        tails=tuple(rule.squared() for rule in model.tails),
    )


def gram_pair(model: ShiftedDiagonalModel) -> tuple[PositiveDiagonalModel, PositiveDiagonalModel]:
    """``(T*T, TT*)``; the member on the shifted side gains ``k`` leading zeros."""
    squared = square(model.diag)
    padded = prepend_zeros(squared, model.shift_order)
    if model.form is ShiftForm.SHIFT:
        return squared, padded
    return padded, squared


def modulus(model: OperatorModel) -> PositiveDiagonalModel:
    """``|T| = sqrt(T*T)``."""
    if isinstance(model, ShiftedDiagonalModel):
        if model.form is ShiftForm.SHIFT:
            return model.diag
        return prepend_zeros(model.diag, model.shift_order)
    return _moduli(model)


def restrict(model: DiagonalModel, subspace: CoordinateSubspace) -> DiagonalModel:
    """Compression to a coordinate subspace, itself a diagonal model."""
    return model.restricted(subspace)


def restrict_to_support(model: DiagonalModel) -> DiagonalModel:
    """Restriction to the orthogonal complement of the kernel."""
    return model.support()


def compose_direct_sum(left: PositiveDiagonalModel, right: PositiveDiagonalModel) -> PositiveDiagonalModel:
    """``left ⊕ right`` as one diagonal model."""
    return PositiveDiagonalModel(cells=left.cells + right.cells, tails=left.tails + right.tails)


def range_is_closed(model: DiagonalModel) -> bool:
    """True unless 0 is an accumulation point of the entries."""
    rules = model.tails if isinstance(model, PositiveDiagonalModel) else [t.rule for t in model.tails]
    return not any(is_zero(rule.accumulation_point) for rule in rules)


def has_zero_entry(model: DiagonalModel) -> bool:
    return any(is_zero(c.value) for c in model.cells) or any(
        is_zero((t if isinstance(t, TailRule) else t.rule).first) for t in model.tails
    )


def truncation_deviation(model: DiagonalModel, n: int) -> sp.Expr | None:
    """Largest gap between a tail limit and that tail's last term among the first ``n`` entries.

    Returns None when some stream has no entry among the first ``n``.
    """
    positive = _moduli(model)
    layout = positive.layout
    if layout.dimension is None and n < layout.finite_count + layout.stream_count:
        return None
    deviation = ZERO
    for t, rule in enumerate(positive.tails):
        stream = layout.stream_of("tail", t)
        last = (n - 1 - layout.finite_count - stream) // layout.stream_count
        gap = scalar_modulus(rule.term(rule.start_index + last) - rule.accumulation_point)
        if compare(gap, deviation) > 0:
            deviation = gap
    return deviation


__all__ = [
    "Attainment",
    "CanonicalLayout",
    "Cell",
    "CoordinateSubspace",
    "DiagonalModel",
    "FiniteMatrix",
    "Location",
    "NormalDiagonalModel",
    "OperatorModel",
    "PhasedTail",
    "PositiveDiagonalModel",
    "ShiftForm",
    "ShiftedDiagonalModel",
    "TailDirection",
    "TailRule",
    "adjoint",
    "canonical",
    "compose_direct_sum",
    "entries",
    "gram_pair",
    "has_zero_entry",
    "is_min_attaining",
    "is_norm_attaining",
    "min_modulus",
    "modulus",
    "operator_norm",
    "prepend_zeros",
    "pseudoinverse",
    "range_is_closed",
    "restrict",
    "restrict_to_support",
    "square",
    "truncation_deviation",
    "truncate",
]
