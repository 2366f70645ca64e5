"""Exact spectra of diagonal models.

A spectrum is kept symbolically: merged point eigenvalues with multiplicities,
tail families contributing countably many simple eigenvalues, and the
continuous, essential and discrete parts derived from them. Tail terms that
coincide with a point eigenvalue are folded into that eigenvalue's multiplicity
and recorded as ``excluded`` on the family. Terms shared by several families
become explicit eigenvalues in the same way, so every eigenvalue is counted once.
"""

import math
from collections.abc import Callable
from typing_extensions import Self

import sympy as sp
from pydantic import model_validator

from .errors import FiniteDimensionalError, InvertibilityError, OperatorModelError, RangeNotClosedError
from .operators import NormalDiagonalModel, PositiveDiagonalModel
from .operators.tail import TailRule
from .schemas.base import ONCE, ExactModel, Multiplicity, Scalar
from .utils.exact import (
    ONE,
    compare,
    conjugate,
    contains,
    dagger,
    exact_equal,
    exact_min,
    is_zero,
    modulus,
    sort_key,
    to_float,
    unique,
)
from .utils.logger import get_logger

logger = get_logger(__name__)

COINCIDENCE_DEPTH = 64
MAX_COINCIDENCE_SCAN = 4096


class Eigenvalue(ExactModel):
    """A point eigenvalue with its multiplicity."""

    value: Scalar
    multiplicity: Multiplicity = ONCE


class EigenvalueTail(ExactModel):
    """Simple eigenvalues ``phase * rule.term(n)`` except the ``excluded`` indices."""

    rule: TailRule
    phase: Scalar = ONE
    excluded: tuple[int, ...] = ()

    @property
    def limit(self) -> sp.Expr:
        return self.phase * self.rule.accumulation_point

    def term(self, n: int) -> sp.Expr:
        return self.phase * self.rule.term(n)

    def index_of(self, value: sp.Expr) -> int | None:
        """Index of the term equal to ``value``, ignoring exclusions."""
        return self.rule.index_of(sp.expand(value * conjugate(self.phase)))

    def values(self, count: int) -> list[sp.Expr]:
        """The first ``count`` terms that are not excluded."""
        values: list[sp.Expr] = []
        n = self.rule.start_index
        while len(values) < count:
            if n not in self.excluded:
                values.append(self.term(n))
            n += 1
        return values

    def with_excluded(self, indices: set[int]) -> "EigenvalueTail":
        if indices <= set(self.excluded):
            return self
        return self.replace(excluded=tuple(sorted(set(self.excluded) | indices)))

    def reciprocal(self) -> "EigenvalueTail":
        """Family of ``1/term(n)``."""
        return EigenvalueTail(rule=self.rule.reciprocal(), phase=conjugate(self.phase), excluded=self.excluded)

    def describe(self) -> str:
        text = self.rule.describe()
        if not exact_equal(self.phase, ONE):
            text = f"({self.phase}) * [{text}]"
        if self.excluded:
            text += f", excluding n in {list(self.excluded)}"
        return text


class SpectrumReport(ExactModel):
    """Partition of the spectrum of a normal diagonal model.

    ``point``/``point_tails`` describe the point spectrum. ``essential`` holds
    tail limits and infinite-multiplicity eigenvalues, ``continuous`` the tail
    limits that are not eigenvalues, ``discrete``/``discrete_tails`` the isolated
    eigenvalues of finite multiplicity. The residual spectrum is always empty.
    """

    point: tuple[Eigenvalue, ...] = ()
    point_tails: tuple[EigenvalueTail, ...] = ()
    continuous: tuple[Scalar, ...] = ()
    essential: tuple[Scalar, ...] = ()
    discrete: tuple[Eigenvalue, ...] = ()
    discrete_tails: tuple[EigenvalueTail, ...] = ()
    continuous_recomputed: bool = False

    @model_validator(mode="after")
    def _check_partition(self) -> Self:
        for value in self.continuous:
            if not contains(self.essential, value):
                raise ValueError(f"Continuous spectral value {value} is not essential")
        for eigenvalue in self.point:
            if eigenvalue.multiplicity.is_infinite and not contains(self.essential, eigenvalue.value):
                raise ValueError(f"Infinite-multiplicity eigenvalue {eigenvalue.value} is not essential")
        for family in self.point_tails:
            if not contains(self.essential, family.limit):
                raise ValueError(f"Tail limit {family.limit} is not essential")
        for eigenvalue in self.discrete:
            if eigenvalue.multiplicity.is_infinite:
                raise ValueError(f"Discrete eigenvalue {eigenvalue.value} has infinite multiplicity")
            if contains(self.essential, eigenvalue.value):
                raise ValueError(f"Discrete eigenvalue {eigenvalue.value} is also essential")
        return self

    @property
    def is_empty(self) -> bool:
        return not self.point and not self.point_tails

    def tail_limits(self) -> list[sp.Expr]:
        return unique(family.limit for family in self.point_tails)


def _scan_window(family: EigenvalueTail, other: EigenvalueTail) -> range:
    """Indices of ``family`` whose terms can also be terms of ``other``.

    Families with distinct limits share only terms lying at least half the
    distance between the limits away from one of them, so the window ends at
    that horizon. Families converging to the same point from the same side are
    searched to ``COINCIDENCE_DEPTH`` terms.
    """
    rule = family.rule
    if exact_equal(family.limit, other.limit):
        if rule.approach is not other.rule.approach:
            return range(0)
        return range(rule.start_index, rule.start_index + COINCIDENCE_DEPTH)
    cap = rule.start_index + MAX_COINCIDENCE_SCAN
    stop = rule.horizon(to_float(modulus(family.limit - other.limit)) / 2 * (1 - 1e-9), cap)
    if stop >= cap:
        logger.warning(f"Coincidence search along {family.describe()} stopped at index {cap}")
    return range(rule.start_index, stop)


def _shared_terms(family: EigenvalueTail, other: EigenvalueTail) -> list[sp.Expr]:
    """Terms of ``family`` inside its scan window that are also terms of ``other``."""
    window = _scan_window(family, other)
    if not window:
        return []
    estimates = other.rule.float_indices(family.rule.float_terms(window.start, window.stop))
    skip = set(family.excluded)
    shared: list[sp.Expr] = []
    for n, estimate in zip(window, estimates, strict=True):
        if n in skip or not math.isfinite(estimate):
            continue
        if abs(estimate - round(estimate)) > 1e-6 * max(1.0, estimate):
            continue
        value = family.term(n)
        m = other.index_of(value)
        if m is not None and m not in other.excluded:
            shared.append(value)
    return shared


def shared_tail_terms(families: list[EigenvalueTail]) -> list[sp.Expr]:
    """Values that are non-excluded terms of at least two families, in ascending order."""
    shared: list[sp.Expr] = []
    for i, family in enumerate(families):
        for other in families[i + 1 :]:
            if not exact_equal(family.phase, other.phase):
                continue
            for value in _shared_terms(family, other) + _shared_terms(other, family):
                if not contains(shared, value):
                    shared.append(value)
    return sorted(shared, key=sort_key)


def _fold_coincidences(families: list[EigenvalueTail]) -> tuple[list[Eigenvalue], list[EigenvalueTail]]:
    """Terms shared by several families become explicit eigenvalues excluded from each family."""
    eigenvalues: list[Eigenvalue] = []
    folded = list(families)
    for value in shared_tail_terms(families):
        count = 0
        for k, family in enumerate(folded):
            n = family.index_of(value)
            if n is None or n in family.excluded:
                continue
            folded[k] = family.with_excluded({n})
            count += 1
        eigenvalues.append(Eigenvalue(value=value, multiplicity=Multiplicity.finite(count)))
    if eigenvalues:
        logger.debug(f"Folded {len(eigenvalues)} terms shared between tail families")
    return eigenvalues, folded


def _merge(
    cells: list[Eigenvalue],
    families: list[EigenvalueTail],
) -> tuple[tuple[Eigenvalue, ...], tuple[EigenvalueTail, ...]]:
    merged: list[Eigenvalue] = []
    for cell in cells:
        for i, seen in enumerate(merged):
            if exact_equal(seen.value, cell.value):
                merged[i] = seen.replace(multiplicity=seen.multiplicity + cell.multiplicity)
                break
        else:
            merged.append(cell)

    folded: list[EigenvalueTail] = []
    for family in families:
        absorbed: set[int] = set()
        for i, eigenvalue in enumerate(merged):
            n = family.index_of(eigenvalue.value)
            if n is None or n in family.excluded:
                continue
            merged[i] = eigenvalue.replace(multiplicity=eigenvalue.multiplicity + ONCE)
            absorbed.add(n)
        folded.append(family.with_excluded(absorbed))
    shared, folded = _fold_coincidences(folded)
    return tuple(merged + shared), tuple(folded)


def _is_eigenvalue(value: sp.Expr, point: tuple[Eigenvalue, ...], families: tuple[EigenvalueTail, ...]) -> bool:
    if contains((e.value for e in point), value):
        return True
    return any(family.index_of(value) is not None for family in families)


def _assemble(
    point: tuple[Eigenvalue, ...],
    families: tuple[EigenvalueTail, ...],
    recomputed: bool = False,
) -> SpectrumReport:
    essential = unique(
        [family.limit for family in families] + [e.value for e in point if e.multiplicity.is_infinite],
    )
    continuous = [
        limit for limit in unique(family.limit for family in families) if not _is_eigenvalue(limit, point, families)
    ]
    discrete = tuple(e for e in point if not e.multiplicity.is_infinite and not contains(essential, e.value))
    discrete_tails = []
    for family in families:
        hits = {n for value in essential if (n := family.index_of(value)) is not None}
        discrete_tails.append(family.with_excluded(hits))
    return SpectrumReport(
        point=point,
        point_tails=families,
        continuous=tuple(sorted(continuous, key=sort_key)),
        essential=tuple(sorted(essential, key=sort_key)),
        discrete=discrete,
        discrete_tails=tuple(discrete_tails),
        continuous_recomputed=recomputed,
    )


def spectrum_of_diagonal(model: PositiveDiagonalModel | NormalDiagonalModel) -> SpectrumReport:
    """Spectrum of a positive or normal diagonal model."""
    normal = model.as_normal() if isinstance(model, PositiveDiagonalModel) else model
    canonical = normal.canonical()
    cells = [Eigenvalue(value=c.value, multiplicity=c.multiplicity) for c in canonical.cells]
    families = [EigenvalueTail(rule=t.rule, phase=t.phase) for t in canonical.tails]
    point, folded = _merge(cells, families)
    report = _assemble(point, folded)
    logger.debug(f"Spectrum computed: essential={list(report.essential)}, continuous={list(report.continuous)}")
    return report


def essential_spectrum(model: PositiveDiagonalModel | NormalDiagonalModel) -> tuple[Scalar, ...]:
    """``σ_ess`` alone: tail limits and cell values of infinite multiplicity, ascending.

    Equal to ``spectrum_of_diagonal(model).essential`` without merging the
    eigenvalues.
    """
    normal = model.as_normal() if isinstance(model, PositiveDiagonalModel) else model
    values = [t.phase * t.rule.accumulation_point for t in normal.tails]
    values.extend(c.value for c in normal.cells if c.multiplicity.is_infinite)
    return tuple(sorted(unique(values), key=sort_key))


def _family_range(family: EigenvalueTail) -> tuple[sp.Expr, sp.Expr]:
    return family.rule.infimum, family.rule.supremum


def _families_meet(left: EigenvalueTail, right: EigenvalueTail) -> bool:
    """Conservative test for a common term: False only when provably disjoint."""
    if not exact_equal(left.phase, right.phase):
        # Terms are nonzero after canonicalisation, so distinct phases give distinct rays.
        return False
    low_l, high_l = _family_range(left)
    low_r, high_r = _family_range(right)
    return compare(high_l, low_r) >= 0 and compare(high_r, low_l) >= 0


def _spectra_meet(left: SpectrumReport, right: SpectrumReport) -> bool:
    """Whether the full spectra of two reports may share a point."""
    right_values = [e.value for e in right.point] + list(right.essential)
    for value in [e.value for e in left.point] + list(left.essential):
        if contains(right_values, value) or any(f.index_of(value) is not None for f in right.point_tails):
            return True
    for value in right_values:
        if any(f.index_of(value) is not None for f in left.point_tails):
            return True
    return any(_families_meet(a, b) for a in left.point_tails for b in right.point_tails)


def spectrum_of_direct_sum(left: SpectrumReport, right: SpectrumReport) -> SpectrumReport:
    """Spectrum of ``T1 ⊕ T2``: unions of the parts, multiplicities added.

    When the two full spectra may share a point, the continuous part is
    recomputed from the merged eigenvalue data and flagged as such.
    """
    point, families = _merge(
        list(left.point) + list(right.point),
        list(left.point_tails) + list(right.point_tails),
    )
    recomputed = _spectra_meet(left, right)
    if recomputed:
        logger.debug("Summand spectra are not provably disjoint; continuous part recomputed")
    return _assemble(point, families, recomputed=recomputed or left.continuous_recomputed or right.continuous_recomputed)


def _map_report(
    report: SpectrumReport,
    scalar_map: Callable[[sp.Expr], sp.Expr],
    tail_map: Callable[[EigenvalueTail], EigenvalueTail],
) -> SpectrumReport:
    return SpectrumReport(
        point=tuple(e.replace(value=scalar_map(e.value)) for e in report.point),
        point_tails=tuple(tail_map(f) for f in report.point_tails),
        continuous=tuple(sorted((scalar_map(v) for v in report.continuous), key=sort_key)),
        essential=tuple(sorted((scalar_map(v) for v in report.essential), key=sort_key)),
        discrete=tuple(e.replace(value=scalar_map(e.value)) for e in report.discrete),
        discrete_tails=tuple(tail_map(f) for f in report.discrete_tails),
        continuous_recomputed=report.continuous_recomputed,
    )


def _family_reciprocal(family: EigenvalueTail) -> EigenvalueTail:
    try:
        return family.reciprocal()
    except RangeNotClosedError:
        raise
    except OperatorModelError as e:
        raise OperatorModelError(f"Cannot map tail {family.describe()}: {e}") from e


def map_spectrum_inverse(report: SpectrumReport) -> SpectrumReport:
    """Spectrum of ``T^-1``: every value ``λ`` maps to ``1/λ``.

    Raises:
        InvertibilityError: If 0 lies in the spectrum.
    """
    if any(is_zero(e.value) for e in report.point) or any(is_zero(v) for v in report.essential):
        raise InvertibilityError("0 lies in the spectrum, so the operator is not boundedly invertible")
    if any(family.rule.head_is_zero for family in report.point_tails):
        raise InvertibilityError("A tail family contains the eigenvalue 0")
    return _map_report(report, lambda v: ONE / v, _family_reciprocal)


def map_spectrum_pseudoinverse(report: SpectrumReport) -> SpectrumReport:
    """Spectrum of ``T^+``: every value ``λ`` maps to ``λ^+`` (``1/λ``, or 0 for 0).

    Raises:
        RangeNotClosedError: If 0 is an accumulation point of the spectrum.
    """
    for family in report.point_tails:
        if is_zero(family.limit):
            raise RangeNotClosedError(
                f"0 accumulates along {family.describe()}: the range is not closed, "
                "and a pseudoinverse is continuous if and only if the range is closed",
            )
    return _map_report(report, dagger, _family_reciprocal)


def min_modulus_from_spectrum(report: SpectrumReport) -> sp.Expr:
    """``inf |λ|`` over point values, tail terms and tail limits."""
    candidates = [modulus(e.value) for e in report.point]
    for family in report.point_tails:
        candidates.append(family.rule.infimum)
    candidates.extend(modulus(v) for v in report.essential)
    if not candidates:
        raise OperatorModelError("The spectrum is empty")
    return exact_min(candidates)


def essential_min_modulus(report: SpectrumReport) -> sp.Expr:
    """``m_e(T) = inf |λ|`` over the essential spectrum.

    Raises:
        FiniteDimensionalError: If the essential spectrum is empty.
    """
    if not report.essential:
        raise FiniteDimensionalError("The essential spectrum is empty; the operator is finite-dimensional")
    return exact_min(modulus(v) for v in report.essential)


def _same_values(left: tuple[sp.Expr, ...], right: tuple[sp.Expr, ...]) -> bool:
    return len(unique(left)) == len(unique(right)) and all(contains(right, v) for v in left)


def same_eigenvalues(left: tuple[Eigenvalue, ...], right: tuple[Eigenvalue, ...]) -> bool:
    if len(left) != len(right):
        return False
    remaining = list(right)
    for eigenvalue in left:
        for i, candidate in enumerate(remaining):
            if exact_equal(candidate.value, eigenvalue.value) and candidate.multiplicity == eigenvalue.multiplicity:
                del remaining[i]
                break
        else:
            return False
    return True


def _same_rule(left: TailRule, right: TailRule) -> bool:
    return (
        left.direction is right.direction
        and left.start_index == right.start_index
        and left.power == right.power
        and left.mirrored == right.mirrored
        and all(
            exact_equal(getattr(left, name), getattr(right, name))
            for name in ("limit", "coefficient", "exponent", "shift")
        )
    )


def _same_family(left: EigenvalueTail, right: EigenvalueTail) -> bool:
    return (
        _same_rule(left.rule, right.rule)
        and exact_equal(left.phase, right.phase)
        and set(left.excluded) == set(right.excluded)
    )


def same_families(left: tuple[EigenvalueTail, ...], right: tuple[EigenvalueTail, ...]) -> bool:
    if len(left) != len(right):
        return False
    remaining = list(right)
    for family in left:
        for i, candidate in enumerate(remaining):
            if _same_family(family, candidate):
                del remaining[i]
                break
        else:
            return False
    return True


def same_spectrum(left: SpectrumReport, right: SpectrumReport) -> bool:
    """Exact, order-insensitive equality of two reports."""
    return (
        same_eigenvalues(left.point, right.point)
        and same_families(left.point_tails, right.point_tails)
        and _same_values(left.essential, right.essential)
        and _same_values(left.continuous, right.continuous)
        and same_eigenvalues(left.discrete, right.discrete)
        and same_families(left.discrete_tails, right.discrete_tails)
    )


def full_spectrum_values(report: SpectrumReport, n: int) -> list[sp.Expr]:
    """Explicit spectral values: point values, ``n`` terms per tail, and essential points.

    Values are listed in that order and may repeat.
    """
    values = [e.value for e in report.point]
    for family in report.point_tails:
        values.extend(family.values(n))
    values.extend(report.essential)
    return values


__all__ = [
    "Eigenvalue",
    "EigenvalueTail",
    "SpectrumReport",
    "essential_min_modulus",
    "essential_spectrum",
    "full_spectrum_values",
    "map_spectrum_inverse",
    "map_spectrum_pseudoinverse",
    "min_modulus_from_spectrum",
    "same_eigenvalues",
    "same_families",
    "same_spectrum",
    "shared_tail_terms",
    "spectrum_of_diagonal",
    "spectrum_of_direct_sum",
]
