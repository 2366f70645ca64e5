"""AM and AN classification of structured operators.

A positive diagonal model is AM exactly when its essential spectrum is a single
point ``beta`` and only finitely many entries (counted with multiplicity) lie
above ``beta``; it then splits as ``beta*I - K + F`` with ``K`` compact,
``||K|| <= beta``, ``F`` finite rank and ``KF = FK = 0``. AN is the mirror
statement with entries below the essential point and ``alpha*I + K - F``.
"""

from enum import Enum
from typing import Literal

from typing_extensions import Self

import numpy as np
import sympy as sp
from pydantic import model_validator

from .errors import DecompositionError, NotPositiveSemidefiniteError, OperatorModelError
from .operators import (
    Cell,
    CoordinateSubspace,
    FiniteMatrix,
    Location,
    NormalDiagonalModel,
    PhasedTail,
    PositiveDiagonalModel,
    ShiftedDiagonalModel,
    TailDirection,
    TailRule,
    adjoint,
    compose_direct_sum,
    gram_pair,
    min_modulus,
    modulus,
    pseudoinverse,
    range_is_closed,
    restrict_to_support,
    square,
)
from .oracle import PSD_SLACK, hermitian_eigen
from .schemas.base import ONCE, ExactModel, Multiplicity, Scalar
from .spectra import (
    EigenvalueTail,
    essential_spectrum,
    same_eigenvalues,
    same_families,
    shared_tail_terms,
    spectrum_of_diagonal,
)
from .utils.exact import (
    ONE,
    ZERO,
    compare,
    contains,
    exact_equal,
    is_nonnegative_real,
    is_unit,
    is_zero,
    modulus as scalar_modulus,
    phase_of,
    sort_key,
    to_expr,
    to_float,
)
from .utils.logger import get_logger

logger = get_logger(__name__)


class Verdict(str, Enum):
    """Outcome of an AM or AN test."""

    AM = "AM"
    NOT_AM = "NotAM"
    AN = "AN"
    NOT_AN = "NotAN"

    @property
    def holds(self) -> bool:
        return self in (Verdict.AM, Verdict.AN)


class Reason(str, Enum):
    """Why a verdict was reached."""

    OK = "OK"
    ESSENTIAL_SPECTRUM_NOT_SINGLETON = "EssentialSpectrumNotSingleton"
    INFINITELY_MANY_EIGENVALUES_ABOVE_ME = "InfinitelyManyEigenvaluesAboveMe"
    INFINITELY_MANY_EIGENVALUES_BELOW_ME = "InfinitelyManyEigenvaluesBelowMe"


class AMDecomposition(ExactModel):
    """``P = beta*I - K + F`` with ``K`` and ``F`` on complementary coordinate subspaces."""

    beta: Scalar
    compact_part: PositiveDiagonalModel
    finite_part: PositiveDiagonalModel


class ANDecomposition(ExactModel):
    """``P = alpha*I + K - F`` with ``K`` and ``F`` on complementary coordinate subspaces."""

    alpha: Scalar
    compact_part: PositiveDiagonalModel
    finite_part: PositiveDiagonalModel


class AMClassification(ExactModel):
    verdict: Verdict
    reason: Reason
    decomposition: AMDecomposition | None = None
    counterexample: CoordinateSubspace | None = None

    @model_validator(mode="after")
    def _check_consistency(self) -> Self:
        if self.verdict is Verdict.AM and self.decomposition is None:
            raise ValueError("An AM verdict carries its decomposition")
        return self


class ANClassification(ExactModel):
    verdict: Verdict
    reason: Reason
    decomposition: ANDecomposition | None = None
    counterexample: CoordinateSubspace | None = None


def _side_streams(model: PositiveDiagonalModel, side: TailDirection) -> tuple[int, ...]:
    layout = model.layout
    return tuple(
        layout.stream_of("tail", t) for t, rule in enumerate(model.tails) if rule.approach is side
    )


def _essential_point(model: PositiveDiagonalModel) -> sp.Expr | None:
    essential = essential_spectrum(model)
    return essential[0] if len(essential) == 1 else None


def classify_am_positive(model: PositiveDiagonalModel) -> AMClassification:
    """AM test: singleton essential spectrum and finitely many entries above it.

    On AM, ``K`` collects ``beta - v`` for entries ``v <= beta`` (ties give 0)
    and ``F`` collects ``v - beta`` for entries above ``beta``. On failure the
    counterexample is the span of a tail decreasing to its limit, a coordinate
    subspace on which the minimum is not attained.
    """
    canonical = model.canonical()
    above = _side_streams(canonical, TailDirection.FROM_ABOVE)
    counterexample = CoordinateSubspace(streams=above[:1]) if above else None
    beta = _essential_point(canonical)
    if beta is None:
        logger.debug("Not AM: essential spectrum is not a single point")
        return AMClassification(
            verdict=Verdict.NOT_AM,
            reason=Reason.ESSENTIAL_SPECTRUM_NOT_SINGLETON,
            counterexample=counterexample,
        )
    if above:
        logger.debug(f"Not AM: infinitely many entries above {beta}")
        return AMClassification(
            verdict=Verdict.NOT_AM,
            reason=Reason.INFINITELY_MANY_EIGENVALUES_ABOVE_ME,
            counterexample=counterexample,
        )

    k_cells = [Cell(value=beta - c.value, multiplicity=c.multiplicity) for c in canonical.cells if compare(c.value, beta) <= 0]
    f_cells = [Cell(value=c.value - beta, multiplicity=c.multiplicity) for c in canonical.cells if compare(c.value, beta) > 0]
    decomposition = AMDecomposition(
        beta=beta,
        compact_part=PositiveDiagonalModel(
            cells=tuple(k_cells),
            tails=tuple(rule.reflected(beta) for rule in canonical.tails),
        ),
        finite_part=PositiveDiagonalModel(cells=tuple(f_cells)),
    )
    return AMClassification(verdict=Verdict.AM, reason=Reason.OK, decomposition=decomposition)


def compose_am_form(
    beta: sp.Expr,
    compact_part: PositiveDiagonalModel,
    finite_part: PositiveDiagonalModel,
) -> PositiveDiagonalModel:
    """Build ``beta*I - K + F`` on the direct sum of the supports of ``K`` and ``F``.

    Raises:
        DecompositionError: If ``K`` is not compact with ``||K|| <= beta`` or ``F``
            is not finite rank.
    """
    if not is_nonnegative_real(beta):
        raise DecompositionError(f"beta must be a nonnegative real, got {beta}")
    for cell in compact_part.cells:
        if cell.multiplicity.is_infinite and not is_zero(cell.value):
            raise DecompositionError(f"K has the eigenvalue {cell.value} with infinite multiplicity, so it is not compact")
        if compare(cell.value, beta) > 0:
            raise DecompositionError(f"K entry {cell.value} exceeds beta = {beta}")
    for rule in compact_part.tails:
        if not is_zero(rule.accumulation_point):
            raise DecompositionError(f"K tail {rule.describe()} does not tend to 0")
        if compare(rule.supremum, beta) > 0:
            raise DecompositionError(f"K tail {rule.describe()} exceeds beta = {beta}")
    if finite_part.tails or any(c.multiplicity.is_infinite for c in finite_part.cells):
        raise DecompositionError("F must have finitely many entries")

    return PositiveDiagonalModel(
        cells=tuple(Cell(value=beta - c.value, multiplicity=c.multiplicity) for c in compact_part.cells)
        + tuple(Cell(value=beta + c.value, multiplicity=c.multiplicity) for c in finite_part.cells),
        tails=tuple(rule.reflected(beta) for rule in compact_part.tails),
    )


def classify_an_positive(model: PositiveDiagonalModel) -> ANClassification:
    """AN test: singleton essential spectrum ``{alpha}`` and finitely many entries below it.

    On AN, ``K`` collects ``v - alpha`` for entries ``v >= alpha`` and ``F``
    collects ``alpha - v`` for entries below ``alpha``.
    """
    canonical = model.canonical()
    below = _side_streams(canonical, TailDirection.FROM_BELOW)
    counterexample = CoordinateSubspace(streams=below[:1]) if below else None
    alpha = _essential_point(canonical)
    if alpha is None:
        return ANClassification(
            verdict=Verdict.NOT_AN,
            reason=Reason.ESSENTIAL_SPECTRUM_NOT_SINGLETON,
            counterexample=counterexample,
        )
    if below:
        return ANClassification(
            verdict=Verdict.NOT_AN,
            reason=Reason.INFINITELY_MANY_EIGENVALUES_BELOW_ME,
            counterexample=counterexample,
        )
    k_cells = [Cell(value=c.value - alpha, multiplicity=c.multiplicity) for c in canonical.cells if compare(c.value, alpha) >= 0]
    f_cells = [Cell(value=alpha - c.value, multiplicity=c.multiplicity) for c in canonical.cells if compare(c.value, alpha) < 0]
    return ANClassification(
        verdict=Verdict.AN,
        reason=Reason.OK,
        decomposition=ANDecomposition(
            alpha=alpha,
            compact_part=PositiveDiagonalModel(
                cells=tuple(k_cells),
                tails=tuple(rule.offset(-alpha) for rule in canonical.tails),
            ),
            finite_part=PositiveDiagonalModel(cells=tuple(f_cells)),
        ),
    )


class DualityCheck(ExactModel):
    """AM of ``T`` against closed range plus AN of ``T^+``."""

    am: Verdict
    range_closed: bool
    an_of_pinv: Verdict | None
    consistent: bool


def check_duality_am_an(model: PositiveDiagonalModel) -> DualityCheck:
    """Compute the three ingredients independently and compare.

    ``an_of_pinv`` is None when the range is not closed.
    """
    canonical = model.canonical()
    am = classify_am_positive(canonical).verdict
    closed = range_is_closed(canonical)
    an_of_pinv = None
    if closed:
        inverse = pseudoinverse(canonical)
        assert isinstance(inverse, PositiveDiagonalModel)
        an_of_pinv = classify_an_positive(inverse).verdict
    consistent = am.holds == (closed and an_of_pinv is Verdict.AN)
    if not consistent:
        logger.warning(f"Duality mismatch: am={am.value}, closed={closed}, an_of_pinv={an_of_pinv}")
    return DualityCheck(am=am, range_closed=closed, an_of_pinv=an_of_pinv, consistent=consistent)


class AdjointTransfer(ExactModel):
    """Essential spectra of ``T*T`` and ``TT*`` and the AM verdicts of ``T`` and ``T*``."""

    ess_tstar_t: tuple[Scalar, ...]
    ess_t_tstar: tuple[Scalar, ...]
    ess_equal: bool
    am_t: Verdict
    am_tstar: Verdict

    @property
    def consistent(self) -> bool:
        """Equal essential spectra force equal verdicts."""
        return not self.ess_equal or self.am_t is self.am_tstar


def classify_am_adjoint_transfer(model: ShiftedDiagonalModel) -> AdjointTransfer:
    """``T`` is AM iff ``T*T`` is, and ``T*`` iff ``TT*`` is."""
    tstar_t, t_tstar = gram_pair(model)
    ess_first = essential_spectrum(tstar_t)
    ess_last = essential_spectrum(t_tstar)
    ess_equal = len(ess_first) == len(ess_last) and all(contains(ess_last, v) for v in ess_first)
    return AdjointTransfer(
        ess_tstar_t=ess_first,
        ess_t_tstar=ess_last,
        ess_equal=ess_equal,
        am_t=classify_am_positive(tstar_t).verdict,
        am_tstar=classify_am_positive(t_tstar).verdict,
    )


def classify_am_normal(model: NormalDiagonalModel) -> AMClassification:
    """AM of a normal model through ``|T|^2 = T*T``; the decomposition is that of ``|T|``."""
    absolute = modulus(model)
    verdict = classify_am_positive(square(absolute))
    if not verdict.verdict.holds:
        return verdict
    return classify_am_positive(absolute)


class BlockMember(ExactModel):
    """A piece of ``H_beta``: a cell, or one absorbed tail term."""

    source: Literal["cell", "tail"]
    index: int
    term: int | None = None
    multiplicity: Multiplicity = ONCE
    phase: Scalar = ONE
    positions: tuple[int, ...] = ()
    stream: int | None = None


class SpectralBlock(ExactModel):
    """``beta * U_beta`` on ``H_beta``; ``U_beta`` is diagonal with the member phases."""

    beta: Scalar
    members: tuple[BlockMember, ...]

    @model_validator(mode="after")
    def _check_phases(self) -> Self:
        if not is_nonnegative_real(self.beta):
            raise ValueError(f"Block modulus must be a nonnegative real, got {self.beta}")
        for member in self.members:
            if not is_unit(member.phase):
                raise ValueError(f"Block phase {member.phase} is not unimodular")
            if is_zero(self.beta) and not exact_equal(member.phase, ONE):
                raise ValueError("The kernel block uses the identity unitary")
        return self


class TailFamily(ExactModel):
    """One block per non-absorbed term ``n``: modulus ``rule.term(n)`` and phase ``phase``."""

    tail_id: int
    rule: TailRule
    phase: Scalar = ONE
    stream: int
    absorbed: tuple[int, ...] = ()


class SpectralDecomposition(ExactModel):
    """``T = ⊕ beta * U_beta`` for a normal AM diagonal model."""

    blocks: tuple[SpectralBlock, ...] = ()
    tail_families: tuple[TailFamily, ...] = ()

    @model_validator(mode="after")
    def _check_distinct(self) -> Self:
        betas = [block.beta for block in self.blocks]
        for i, beta in enumerate(betas):
            if contains(betas[:i], beta):
                raise ValueError(f"Block modulus {beta} appears twice")
        return self

    def entries(self, n: int) -> list[sp.Expr]:
        """First ``n`` canonical entries rebuilt as ``beta * phase``."""
        return reconstruct(self).entries(n)

    def grouped(self, n: int) -> list[tuple[sp.Expr, list[tuple[int, sp.Expr]]]]:
        """``(beta, [(index, phase), ...])`` for the first ``n`` canonical indices, grouped by modulus."""
        groups: list[tuple[sp.Expr, list[tuple[int, sp.Expr]]]] = []
        for position, entry in enumerate(self.entries(n)):
            beta = scalar_modulus(entry)
            phase = ONE if is_zero(beta) else phase_of(entry)
            for existing, members in groups:
                if exact_equal(existing, beta):
                    members.append((position, phase))
                    break
            else:
                groups.append((beta, [(position, phase)]))
        return groups


def spectral_decomposition_normal(model: NormalDiagonalModel) -> SpectralDecomposition:
    """Group the basis of a normal AM model by ``|entry|``.

    Cells with equal modulus share a block. A tail term whose modulus equals a
    block's modulus is absorbed into that block; zero-headed tails are absorbed
    into the kernel block. Moduli shared by several tails get one block holding
    every such term. Every other tail term is a block of its own.

    Raises:
        DecompositionError: If the model is not AM.
    """
    classification = classify_am_normal(model)
    if not classification.verdict.holds:
        raise DecompositionError(
            f"Spectral decomposition needs an AM operator (verdict {classification.verdict.value}: "
            f"{classification.reason.value})",
        )
    layout = model.layout
    grouped: list[tuple[sp.Expr, list[BlockMember]]] = []

    def block_for(beta: sp.Expr) -> list[BlockMember]:
        for existing, members in grouped:
            if exact_equal(existing, beta):
                return members
        members: list[BlockMember] = []
        grouped.append((beta, members))
        return members

    for i, cell in enumerate(model.cells):
        beta = scalar_modulus(cell.value)
        phase = ONE if is_zero(beta) else phase_of(cell.value)
        if cell.multiplicity.is_infinite:
            member = BlockMember(source="cell", index=i, multiplicity=cell.multiplicity, phase=phase, stream=layout.stream_of("cell", i))
        else:
            count = cell.multiplicity.count or 0
            positions = tuple(layout.position(Location("cell", i, k)) for k in range(count))
            member = BlockMember(source="cell", index=i, multiplicity=cell.multiplicity, phase=phase, positions=positions)
        block_for(beta).append(member)

    absorbed: list[list[int]] = []
    for t, tail in enumerate(model.tails):
        rule = tail.rule
        taken: list[int] = []
        if rule.head_is_zero:
            block_for(ZERO)
        for beta, members in list(grouped):
            n = rule.index_of(beta)
            if n is None:
                continue
            phase = ONE if is_zero(beta) else tail.phase
            position = layout.position(Location("tail", t, n - rule.start_index))
            members.append(BlockMember(source="tail", index=t, term=n, phase=phase, positions=(position,)))
            taken.append(n)
        absorbed.append(taken)

    moduli = [EigenvalueTail(rule=tail.rule, excluded=tuple(taken)) for tail, taken in zip(model.tails, absorbed, strict=True)]
    for beta in shared_tail_terms(moduli):
        members = block_for(beta)
        for t, tail in enumerate(model.tails):
            n = tail.rule.index_of(beta)
            if n is None or n in absorbed[t]:
                continue
            position = layout.position(Location("tail", t, n - tail.rule.start_index))
            members.append(BlockMember(source="tail", index=t, term=n, phase=tail.phase, positions=(position,)))
            absorbed[t].append(n)

    families = [
        TailFamily(
            tail_id=t,
            rule=tail.rule,
            phase=tail.phase,
            stream=layout.stream_of("tail", t),
            absorbed=tuple(sorted(absorbed[t])),
        )
        for t, tail in enumerate(model.tails)
    ]

    blocks = [SpectralBlock(beta=beta, members=tuple(members)) for beta, members in grouped if members]
    blocks.sort(key=lambda block: sort_key(block.beta))
    return SpectralDecomposition(blocks=tuple(blocks), tail_families=tuple(families))


def reconstruct(decomposition: SpectralDecomposition) -> NormalDiagonalModel:
    """Normal model with entry ``beta * phase`` at every member of every block.

    Raises:
        DecompositionError: If members overlap, a tail member has no term index,
            or the cells and tails are not listed contiguously from 0.
    """
    cells: dict[int, Cell] = {}
    absorbed: dict[int, set[int]] = {}
    for block in decomposition.blocks:
        for member in block.members:
            if member.source == "cell":
                if member.index in cells:
                    raise DecompositionError(f"Cell {member.index} appears in more than one block")
                cells[member.index] = Cell(value=block.beta * member.phase, multiplicity=member.multiplicity)
            else:
                if member.term is None:
                    raise DecompositionError(f"Tail member {member.index} of block {block.beta} has no term index")
                terms = absorbed.setdefault(member.index, set())
                if member.term in terms:
                    raise DecompositionError(f"Tail {member.index} term {member.term} appears twice")
                terms.add(member.term)
    if sorted(cells) != list(range(len(cells))):
        raise DecompositionError("Cell members do not cover a contiguous range of cells")

    tails: list[PhasedTail] = []
    for t, family in enumerate(decomposition.tail_families):
        if family.tail_id != t:
            raise DecompositionError(f"Tail family {family.tail_id} listed at position {t}")
        if set(family.absorbed) != absorbed.get(t, set()):
            raise DecompositionError(f"Absorbed terms of tail {t} disagree with the blocks")
        tails.append(PhasedTail(rule=family.rule, phase=family.phase))
    for t in absorbed:
        if t >= len(tails):
            raise DecompositionError(f"Block member refers to unknown tail {t}")
    return NormalDiagonalModel(cells=tuple(cells[i] for i in range(len(cells))), tails=tuple(tails))


class DirectSumClassification(ExactModel):
    """``S ⊕ T`` for a positive finite block ``S`` and an AM model ``T``."""

    classification: AMClassification
    combined: PositiveDiagonalModel
    shifted_block: tuple[Scalar, ...]
    shifted_block_positive: bool


EXACT_BLOCK_SIZE = 8
_X = sp.Symbol("x")


def _exact_block_values(block: FiniteMatrix) -> list[sp.Expr] | None:
    """Eigenvalues of a Hermitian block whose entries are read as exact decimals.

    Returns None when the exact block is not Hermitian or too large, or when its
    characteristic polynomial does not have rational coefficients.
    """
    if block.rows > EXACT_BLOCK_SIZE:
        return None
    exact = sp.Matrix(block.rows, block.cols, [to_expr(complex(z)) for z in block.array.flat])
    if exact != exact.H:
        return None
    coefficients = [sp.expand(c) for c in exact.charpoly(_X).all_coeffs()]
    if not all(c.is_rational for c in coefficients):
        return None
    roots = sp.Poly.from_list(coefficients, _X).real_roots()
    return roots if len(roots) == block.rows else None


def _exact_eigenvalue(value: float, slack: float) -> sp.Expr:
    if abs(value) <= slack:
        return ZERO
    return sp.nsimplify(value, tolerance=1e-12, rational=True)


def direct_sum_am(finite_part: FiniteMatrix, model: PositiveDiagonalModel, psd_slack: float = PSD_SLACK) -> DirectSumClassification:
    """Classify ``S ⊕ T`` and report the block ``S - beta*I`` alongside.

    The combined model is classified directly; ``shifted_block`` lists the
    eigenvalues of ``S - beta*I``, which need not be positive. Eigenvalues of
    ``S`` are exact algebraic numbers when its entries, read as decimals, give a
    rational characteristic polynomial.

    Raises:
        NotPositiveSemidefiniteError: If ``S`` is not positive semidefinite.
        DecompositionError: If ``T`` is not AM.
    """
    try:
        eigen = hermitian_eigen(finite_part)
    except OperatorModelError as e:
        raise NotPositiveSemidefiniteError(f"Finite block is not positive semidefinite: {e}") from e
    slack = psd_slack * max(1.0, finite_part.norm())
    if eigen.values.size and float(eigen.values[0]) < -slack:
        raise NotPositiveSemidefiniteError(f"Finite block has the negative eigenvalue {float(eigen.values[0]):.6g}")

    base = classify_am_positive(model)
    if base.decomposition is None:
        raise DecompositionError(f"The diagonal summand is not AM ({base.reason.value})")
    beta = base.decomposition.beta

    exact = _exact_block_values(finite_part)
    if exact is None:
        logger.debug("Finite block eigenvalues recovered from floating point")
        values = [_exact_eigenvalue(float(v), slack) for v in np.asarray(eigen.values)]
    else:
        values = [ZERO if abs(to_float(v)) <= slack else v for v in exact]
    block = PositiveDiagonalModel(cells=tuple(Cell(value=v) for v in values))
    combined = compose_direct_sum(block, model)
    shifted = tuple(v - beta for v in values)
    return DirectSumClassification(
        classification=classify_am_positive(combined),
        combined=combined,
        shifted_block=shifted,
        shifted_block_positive=all(compare(v, ZERO) >= 0 for v in shifted),
    )


def min_modulus_pair(model: ShiftedDiagonalModel) -> tuple[sp.Expr, sp.Expr]:
    """``(m(T), m(T*))``; they can differ when ``N(T) != N(T*)``."""
    return min_modulus(model), min_modulus(adjoint(model))


class RestrictionCheck(ExactModel):
    """Essential and discrete spectra of ``T`` against ``T`` restricted to ``N(T)^perp``."""

    essential_full: tuple[Scalar, ...]
    essential_support: tuple[Scalar, ...]
    essential_inclusions: bool
    discrete_nonzero_equal: bool

    @property
    def holds(self) -> bool:
        return self.essential_inclusions and self.discrete_nonzero_equal


def check_restriction_lemma(model: PositiveDiagonalModel) -> RestrictionCheck:
    """``ess(T0) ⊆ ess(T) ⊆ ess(T0) ∪ {0}`` and ``d(T) \\ {0} = d(T0) \\ {0}``."""
    full = spectrum_of_diagonal(model)
    support = spectrum_of_diagonal(restrict_to_support(model))
    lower = all(contains(full.essential, v) for v in support.essential)
    upper = all(contains(support.essential, v) or is_zero(v) for v in full.essential)
    nonzero_full = tuple(e for e in full.discrete if not is_zero(e.value))
    nonzero_support = tuple(e for e in support.discrete if not is_zero(e.value))
    discrete_equal = same_eigenvalues(nonzero_full, nonzero_support) and same_families(
        full.discrete_tails,
        support.discrete_tails,
    )
    return RestrictionCheck(
        essential_full=full.essential,
        essential_support=support.essential,
        essential_inclusions=lower and upper,
        discrete_nonzero_equal=discrete_equal,
    )


__all__ = [
    "AMClassification",
    "AMDecomposition",
    "ANClassification",
    "ANDecomposition",
    "AdjointTransfer",
    "BlockMember",
    "DirectSumClassification",
    "DualityCheck",
    "Reason",
    "RestrictionCheck",
    "SpectralBlock",
    "SpectralDecomposition",
    "TailFamily",
    "Verdict",
    "check_duality_am_an",
    "check_restriction_lemma",
    "classify_am_adjoint_transfer",
    "classify_am_normal",
    "classify_am_positive",
    "classify_an_positive",
    "compose_am_form",
    "direct_sum_am",
    "min_modulus_pair",
    "reconstruct",
    "spectral_decomposition_normal",
]
