"""Seeded random models and matrices for the property suites.

Every generator takes a ``numpy.random.Generator`` and uses small rationals so
that exact comparisons stay fast.
"""

import numpy as np
import sympy as sp

from .classify import Reason
from .multiplication import CellKind, MeasureCell, MeasureSpaceModel, SymbolTail
from .operators import (
    Cell,
    CoordinateSubspace,
    FiniteMatrix,
    NormalDiagonalModel,
    PhasedTail,
    PositiveDiagonalModel,
    ShiftedDiagonalModel,
    ShiftForm,
    TailDirection,
    TailRule,
)
from .schemas.base import Multiplicity
from .utils.exact import ONE, ZERO

DENOMINATOR = 12
MAX_MATRIX_DIMENSION = 12
EXPONENTS = (sp.Integer(1), sp.Integer(2), sp.Rational(1, 2))
UNIT_PHASES = (
    ONE,
    sp.I,
    -ONE,
    -sp.I,
    sp.Rational(3, 5) + sp.Rational(4, 5) * sp.I,
    sp.Rational(-4, 5) + sp.Rational(3, 5) * sp.I,
)


def rational(rng: np.random.Generator, low: int, high: int, denominator: int = DENOMINATOR) -> sp.Rational:
    """Uniform rational in ``[low, high]`` on the grid ``1/denominator``."""
    return sp.Rational(int(rng.integers(low * denominator, high * denominator + 1)), denominator)


def fraction(rng: np.random.Generator, denominator: int = DENOMINATOR) -> sp.Rational:
    """Rational in ``(0, 1]``."""
    return sp.Rational(int(rng.integers(1, denominator + 1)), denominator)


def multiplicity(rng: np.random.Generator, infinite_probability: float = 0.0) -> Multiplicity:
    if rng.random() < infinite_probability:
        return Multiplicity.infinite()
    return Multiplicity.finite(int(rng.integers(1, 4)))


def tail_rule(rng: np.random.Generator, limit: sp.Expr, direction: TailDirection, ceiling: sp.Expr | None = None) -> TailRule:
    """Plain tail with the given limit and side.

    From below, the coefficient is scaled so the first term stays nonnegative;
    from above, ``ceiling`` (when given) bounds the first term.
    """
    start = int(rng.integers(1, 4))
    exponent = EXPONENTS[int(rng.integers(len(EXPONENTS)))]
    reach = sp.Integer(start) ** exponent
    if direction is TailDirection.FROM_BELOW:
        coefficient = limit * reach * fraction(rng)
    elif ceiling is not None:
        coefficient = (ceiling - limit) * reach * fraction(rng)
    else:
        coefficient = rational(rng, 1, 3) * reach
    return TailRule(limit=limit, direction=direction, coefficient=coefficient, exponent=exponent, start_index=start)


def positive_model(rng: np.random.Generator, max_cells: int = 4, max_tails: int = 2) -> PositiveDiagonalModel:
    """Random infinite-dimensional positive model covering every classification branch."""
    cells = [
        Cell(value=rational(rng, 0, 3), multiplicity=multiplicity(rng, 0.2)) for _ in range(int(rng.integers(0, max_cells + 1)))
    ]
    if rng.random() < 0.2:
        cells.append(Cell(value=ZERO, multiplicity=Multiplicity.infinite()))
    shared = rational(rng, 0, 2)
    tails = []
    for _ in range(int(rng.integers(0, max_tails + 1))):
        limit = shared if rng.random() < 0.7 else rational(rng, 0, 2)
        direction = TailDirection.FROM_ABOVE if limit == 0 or rng.random() < 0.5 else TailDirection.FROM_BELOW
        tails.append(tail_rule(rng, limit, direction))
    if not tails and all(c.multiplicity.count is not None for c in cells):
        cells.append(Cell(value=rational(rng, 0, 2), multiplicity=Multiplicity.infinite()))
    return PositiveDiagonalModel(cells=tuple(cells), tails=tuple(tails))


def closed_range_model(rng: np.random.Generator) -> PositiveDiagonalModel:
    """Positive model whose tails stay away from 0."""
    cells = [Cell(value=rational(rng, 0, 3), multiplicity=multiplicity(rng, 0.2)) for _ in range(int(rng.integers(0, 4)))]
    tails = []
    for _ in range(int(rng.integers(1, 3))):
        limit = rational(rng, 1, 3)
        direction = TailDirection.FROM_ABOVE if rng.random() < 0.5 else TailDirection.FROM_BELOW
        tails.append(tail_rule(rng, limit, direction))
    return PositiveDiagonalModel(cells=tuple(cells), tails=tuple(tails))


def am_triple(rng: np.random.Generator) -> tuple[sp.Expr, PositiveDiagonalModel, PositiveDiagonalModel]:
    """``(beta, K, F)`` meeting the constraints of ``beta*I - K + F``.

    ``K`` always contributes an infinite-dimensional part so the composed
    operator lives on an infinite-dimensional space.
    """
    beta = ZERO if rng.random() < 0.2 else rational(rng, 1, 3)
    compact_cells = [Cell(value=ZERO, multiplicity=Multiplicity.infinite())] if beta == 0 or rng.random() < 0.4 else []
    compact_tails = []
    if beta > 0:
        compact_cells += [Cell(value=beta * fraction(rng), multiplicity=multiplicity(rng)) for _ in range(int(rng.integers(0, 3)))]
        has_kernel_block = any(c.multiplicity.is_infinite for c in compact_cells)
        if not has_kernel_block or rng.random() < 0.7:
            compact_tails.append(tail_rule(rng, ZERO, TailDirection.FROM_ABOVE, ceiling=beta))
    finite_cells = [Cell(value=rational(rng, 1, 3), multiplicity=multiplicity(rng)) for _ in range(int(rng.integers(0, 3)))]
    return (
        beta,
        PositiveDiagonalModel(cells=tuple(compact_cells), tails=tuple(compact_tails)),
        PositiveDiagonalModel(cells=tuple(finite_cells)),
    )


def violated_model(rng: np.random.Generator) -> tuple[PositiveDiagonalModel, Reason]:
    """A model that is not AM, with the reason the classifier must give."""
    cells = tuple(Cell(value=rational(rng, 0, 3), multiplicity=multiplicity(rng)) for _ in range(int(rng.integers(0, 3))))
    if rng.random() < 0.5:
        beta = rational(rng, 0, 2)
        tails = [tail_rule(rng, beta, TailDirection.FROM_ABOVE)]
        if beta > 0 and rng.random() < 0.5:
            tails.append(tail_rule(rng, beta, TailDirection.FROM_BELOW))
        return PositiveDiagonalModel(cells=cells, tails=tuple(tails)), Reason.INFINITELY_MANY_EIGENVALUES_ABOVE_ME
    low = rational(rng, 1, 2)
    high = low + rational(rng, 1, 2)
    tails = (tail_rule(rng, low, TailDirection.FROM_BELOW), tail_rule(rng, high, TailDirection.FROM_BELOW))
    return PositiveDiagonalModel(cells=cells, tails=tails), Reason.ESSENTIAL_SPECTRUM_NOT_SINGLETON


def index_scaled(rule: TailRule, factor: int) -> TailRule:
    """Rule whose term ``factor * n`` equals ``rule.term(n)``, so every term of ``rule`` recurs in it."""
    return rule.replace(
        coefficient=rule.coefficient * sp.Integer(factor) ** rule.exponent,
        start_index=rule.start_index * factor,
    )


def normal_am_model(rng: np.random.Generator) -> NormalDiagonalModel:
    """Normal model whose modulus is AM: one essential modulus approached from below.

    Some models carry a second tail repeating the moduli of the first under
    its own phase, so decompositions meet blocks shared by two tails.
    """
    beta = rational(rng, 1, 2)

    def phase() -> sp.Expr:
        return UNIT_PHASES[int(rng.integers(len(UNIT_PHASES)))]

    cells = [Cell(value=rational(rng, 0, 4) * phase(), multiplicity=multiplicity(rng)) for _ in range(int(rng.integers(0, 4)))]
    tails = []
    if rng.random() < 0.7:
        rule = tail_rule(rng, beta, TailDirection.FROM_BELOW)
        tails.append(PhasedTail(rule=rule, phase=phase()))
        if rng.random() < 0.3:
            factor = int(rng.integers(2, 4))
            if not rule.exponent.is_integer:
                factor **= 2
            tails.append(PhasedTail(rule=index_scaled(rule, factor), phase=phase()))
    if not tails or rng.random() < 0.3:
        cells.append(Cell(value=beta * phase(), multiplicity=Multiplicity.infinite()))
    return NormalDiagonalModel(cells=tuple(cells), tails=tuple(tails))


def shifted_model(rng: np.random.Generator) -> ShiftedDiagonalModel:
    diag = positive_model(rng)
    form = ShiftForm.SHIFT if rng.random() < 0.5 else ShiftForm.CO_SHIFT
    return ShiftedDiagonalModel(shift_order=int(rng.integers(0, 3)), diag=diag, form=form)


def measure_model(rng: np.random.Generator) -> MeasureSpaceModel:
    """Cells of random kind plus at most two symbol tails."""
    cells = []
    for i in range(int(rng.integers(1, 4))):
        kind = CellKind.DIFFUSE if rng.random() < 0.3 else CellKind.ATOM
        value = rational(rng, 0, 3) * UNIT_PHASES[int(rng.integers(len(UNIT_PHASES)))]
        cells.append(MeasureCell(label=f"A{i}", kind=kind, weight=rational(rng, 1, 2), symbol_value=value))
    tails = []
    for t in range(int(rng.integers(0, 3))):
        limit = rational(rng, 1, 2)
        direction = TailDirection.FROM_ABOVE if rng.random() < 0.5 else TailDirection.FROM_BELOW
        tails.append(SymbolTail(label=f"T{t}", rule=tail_rule(rng, limit, direction)))
    return MeasureSpaceModel(cells=tuple(cells), tail_families=tuple(tails))


def complex_matrix(
    rng: np.random.Generator,
    rows: int | None = None,
    cols: int | None = None,
    rank: int | None = None,
) -> FiniteMatrix:
    """Matrix with independent standard complex Gaussian entries, optionally of reduced rank."""
    rows = rows or int(rng.integers(1, MAX_MATRIX_DIMENSION + 1))
    cols = cols or int(rng.integers(1, MAX_MATRIX_DIMENSION + 1))

    def gaussian(shape: tuple[int, int]) -> np.ndarray:
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    if rank is None or rank >= min(rows, cols):
        return FiniteMatrix(gaussian((rows, cols)))
    return FiniteMatrix(gaussian((rows, rank)) @ gaussian((rank, cols)))


def coordinate_subspace(rng: np.random.Generator, model: PositiveDiagonalModel) -> CoordinateSubspace:
    """Non-empty subspace mixing single basis vectors and whole streams."""
    layout = model.layout
    reach = layout.finite_count + 3 * max(layout.stream_count, 1)
    if layout.dimension is not None:
        reach = layout.dimension
    indices = tuple(int(i) for i in rng.choice(reach, size=int(rng.integers(0, min(reach, 4) + 1)), replace=False))
    streams = tuple(s for s in range(layout.stream_count) if rng.random() < 0.4)
    if not indices and not streams:
        indices = (int(rng.integers(reach)),)
    return CoordinateSubspace(indices=indices, streams=streams)
