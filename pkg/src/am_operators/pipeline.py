"""Classification pipeline: one description in, one report out."""

import time
from collections.abc import Callable
from typing import TypeVar

from .classify import (
    AMClassification,
    ANClassification,
    SpectralDecomposition,
    check_duality_am_an,
    classify_am_adjoint_transfer,
    classify_am_normal,
    classify_am_positive,
    classify_an_positive,
    direct_sum_am,
    min_modulus_pair,
    reconstruct,
    spectral_decomposition_normal,
)
from .config import Config
from .errors import AMOperatorsError
from .multiplication import (
    MeasureSpaceModel,
    check_diagonal_reduction,
    classify_am_mult,
    classify_an_mult,
    ess_inf,
    ess_sup,
    is_min_attaining_mult,
    is_norm_attaining_mult,
    to_diagonal,
)
from .operators import (
    Attainment,
    FiniteMatrix,
    NormalDiagonalModel,
    PositiveDiagonalModel,
    ShiftedDiagonalModel,
    is_min_attaining,
    is_norm_attaining,
    min_modulus,
    modulus,
    operator_norm,
)
from .oracle import (
    check_kernel_lemmas,
    check_moore_penrose,
    check_spectral_equalities,
    is_hyponormal_fd,
    is_paranormal_fd,
    numerical_rank,
    svd,
    truncation_gap,
)
from .schemas.description import (
    DirectSumDescription,
    FiniteMatrixDescription,
    MultiplicationDescription,
    NormalDiagonalDescription,
    OperatorDescription,
    PositiveDiagonalDescription,
    ShiftedDiagonalDescription,
)
from .schemas.report import (
    AdjointTransferSummary,
    AttainmentSummary,
    BlockSummary,
    ClassificationReport,
    DecompositionSummary,
    DirectSumSummary,
    DualitySummary,
    EigenvalueEntry,
    MatrixSummary,
    MultiplicationSummary,
    SpectralDecompositionSummary,
    SpectrumSummary,
    TruncationSummary,
    VerdictSummary,
)
from .spectra import SpectrumReport, essential_min_modulus, spectrum_of_diagonal
from .utils.exact import exact_equal, format_expr
from .utils.logger import get_logger

T = TypeVar("T")

RECONSTRUCTION_DEPTH = 32


def _float_text(value: float) -> str:
    return f"{value:.12g}"


def _entries(model: PositiveDiagonalModel) -> list[EigenvalueEntry]:
    return [
        EigenvalueEntry(value=format_expr(c.value), multiplicity=c.multiplicity.to_document()) for c in model.cells
    ]


def _attainment_summary(attainment: Attainment) -> AttainmentSummary:
    return AttainmentSummary(
        attained=attainment.attained,
        value=format_expr(attainment.value),
        witness=attainment.witness,
    )


def _verdict_summary(classification: AMClassification | ANClassification, emit_witness: bool = False) -> VerdictSummary:
    counterexample = classification.counterexample if emit_witness else None
    return VerdictSummary(
        verdict=classification.verdict.value,
        reason=classification.reason.value,
        counterexample_streams=list(counterexample.streams) if counterexample else None,
    )


class ClassificationPipeline:
    """Runs every applicable classification and check for a description."""

    def __init__(self, config: Config | None = None, emit_witness: bool = False):
        """Initialize the pipeline with configuration.

        Args:
            config: Settings; read from the environment when omitted
            emit_witness: Include witness subspaces for NotAM and NotAN verdicts
        """
        self.config = config or Config.from_env()
        self.emit_witness = emit_witness
        self.logger = get_logger(__name__)

    def _attempt(self, report: ClassificationReport, label: str, step: Callable[[], T]) -> T | None:
        """Run one derived computation; failures are recorded on the report."""
        try:
            return step()
        except AMOperatorsError as e:
            self.logger.debug(f"{report.name}: {label} failed: {e}")
            report.errors.append(f"{label}: {e}")
            return None

    def run(self, description: OperatorDescription) -> ClassificationReport:
        """Build the report for one description.

        Model errors raised while building the operator itself propagate;
        everything derived afterwards is recorded as a report field or error.
        """
        self.logger.info(f"Classifying {description.kind} description {description.name!r}")
        started = time.perf_counter()
        report = ClassificationReport(name=description.name, kind=description.kind)

        if isinstance(description, PositiveDiagonalDescription):
            self._positive(report, description.to_model())
        elif isinstance(description, NormalDiagonalDescription):
            self._normal(report, description.to_model())
        elif isinstance(description, ShiftedDiagonalDescription):
            self._shifted(report, description.to_model())
        elif isinstance(description, DirectSumDescription):
            block, model = description.to_model()
            self._direct_sum(report, block, model)
        elif isinstance(description, MultiplicationDescription):
            self._multiplication(report, description.to_model())
        elif isinstance(description, FiniteMatrixDescription):
            self._matrix(report, description.to_model())

        if self.config.include_timing:
            report.timing_seconds = round(time.perf_counter() - started, 6)
        report.success = not report.errors
        self.logger.info(f"Finished {description.name!r} with {len(report.errors)} recorded errors")
        return report

    def _spectrum_summary(self, spectrum: SpectrumReport) -> SpectrumSummary:
        limit = self.config.discrete_listing_limit
        discrete = [format_expr(e.value) for e in spectrum.discrete]
        for family in spectrum.discrete_tails:
            if len(discrete) >= limit:
                break
            discrete.extend(format_expr(v) for v in family.values(limit - len(discrete)))
        return SpectrumSummary(
            essential=[format_expr(v) for v in spectrum.essential],
            continuous=[format_expr(v) for v in spectrum.continuous],
            point=[
                EigenvalueEntry(value=format_expr(e.value), multiplicity=e.multiplicity.to_document())
                for e in spectrum.point
            ],
            discrete=discrete[:limit],
            discrete_truncated=bool(spectrum.discrete_tails) or len(discrete) > limit,
            tails=[family.describe() for family in spectrum.point_tails],
            continuous_recomputed=spectrum.continuous_recomputed,
        )

    def _common_diagonal(self, report: ClassificationReport, model: PositiveDiagonalModel | NormalDiagonalModel) -> None:
        spectrum = spectrum_of_diagonal(model)
        report.spectrum = self._spectrum_summary(spectrum)
        report.min_modulus = self._attempt(report, "min_modulus", lambda: format_expr(min_modulus(model)))
        report.essential_min_modulus = self._attempt(
            report,
            "essential_min_modulus",
            lambda: format_expr(essential_min_modulus(spectrum)),
        )
        report.norm = format_expr(operator_norm(model))
        report.min_attaining = self._attempt(report, "min_attaining", lambda: _attainment_summary(is_min_attaining(model)))
        report.norm_attaining = _attainment_summary(is_norm_attaining(model))
        if model.dimension is None:
            gap = self._attempt(report, "truncation", lambda: truncation_gap(model, self.config.truncation, self.config.tolerance))
            if gap is not None:
                report.truncation = TruncationSummary(**gap.model_dump())

    def _decompositions(self, report: ClassificationReport, positive: PositiveDiagonalModel) -> None:
        am = classify_am_positive(positive)
        an = classify_an_positive(positive)
        report.am = _verdict_summary(am, self.emit_witness)
        report.an = _verdict_summary(an, self.emit_witness)
        if am.decomposition is not None:
            d = am.decomposition
            report.am_decomposition = DecompositionSummary(
                level=format_expr(d.beta),
                compact_cells=_entries(d.compact_part),
                compact_tails=[rule.describe() for rule in d.compact_part.tails],
                finite_entries=_entries(d.finite_part),
            )
        if an.decomposition is not None:
            e = an.decomposition
            report.an_decomposition = DecompositionSummary(
                level=format_expr(e.alpha),
                compact_cells=_entries(e.compact_part),
                compact_tails=[rule.describe() for rule in e.compact_part.tails],
                finite_entries=_entries(e.finite_part),
            )
        duality = check_duality_am_an(positive)
        report.duality = DualitySummary(
            am=duality.am.value,
            range_closed=duality.range_closed,
            an_of_pinv=duality.an_of_pinv.value if duality.an_of_pinv else None,
            consistent=duality.consistent,
        )

    def _positive(self, report: ClassificationReport, model: PositiveDiagonalModel) -> None:
        self._common_diagonal(report, model)
        self._decompositions(report, model)

    def _normal(self, report: ClassificationReport, model: NormalDiagonalModel) -> None:
        self._common_diagonal(report, model)
        self._decompositions(report, modulus(model))
        report.am = _verdict_summary(classify_am_normal(model), self.emit_witness)
        decomposition = self._attempt(report, "spectral_decomposition", lambda: spectral_decomposition_normal(model))
        if decomposition is not None:
            report.spectral_decomposition = self._blocks_summary(model, decomposition)

    def _blocks_summary(self, model: NormalDiagonalModel, decomposition: SpectralDecomposition) -> SpectralDecompositionSummary:
        blocks = []
        for block in decomposition.blocks:
            members = []
            for member in block.members:
                where = f"{member.source} {member.index}"
                if member.term is not None:
                    where += f" term {member.term}"
                members.append(f"{where} x{member.multiplicity} phase {format_expr(member.phase)}")
            blocks.append(BlockSummary(beta=format_expr(block.beta), members=members))
        rebuilt = reconstruct(decomposition).entries(RECONSTRUCTION_DEPTH)
        original = model.entries(RECONSTRUCTION_DEPTH)
        return SpectralDecompositionSummary(
            blocks=blocks,
            tail_families=[
                f"{family.rule.describe()} phase {format_expr(family.phase)}, absorbed {list(family.absorbed)}"
                for family in decomposition.tail_families
            ],
            round_trip_exact=len(rebuilt) == len(original) and all(exact_equal(a, b) for a, b in zip(rebuilt, original, strict=True)),
        )

    def _shifted(self, report: ClassificationReport, model: ShiftedDiagonalModel) -> None:
        absolute = modulus(model)
        report.spectrum = self._spectrum_summary(spectrum_of_diagonal(absolute))
        report.norm = format_expr(operator_norm(model))
        m_t, m_tstar = min_modulus_pair(model)
        report.min_modulus = format_expr(m_t)
        report.essential_min_modulus = self._attempt(
            report,
            "essential_min_modulus",
            lambda: format_expr(essential_min_modulus(spectrum_of_diagonal(absolute))),
        )
        self._decompositions(report, absolute)
        transfer = classify_am_adjoint_transfer(model)
        report.adjoint_transfer = AdjointTransferSummary(
            ess_tstar_t=[format_expr(v) for v in transfer.ess_tstar_t],
            ess_t_tstar=[format_expr(v) for v in transfer.ess_t_tstar],
            ess_equal=transfer.ess_equal,
            am_t=transfer.am_t.value,
            am_tstar=transfer.am_tstar.value,
            min_modulus_t=format_expr(m_t),
            min_modulus_tstar=format_expr(m_tstar),
        )

    def _direct_sum(self, report: ClassificationReport, block: FiniteMatrix, model: PositiveDiagonalModel) -> None:
        result = self._attempt(report, "direct_sum", lambda: direct_sum_am(block, model, self.config.psd_slack))
        if result is None:
            return
        report.direct_sum = DirectSumSummary(
            verdict=result.classification.verdict.value,
            shifted_block=[format_expr(v) for v in result.shifted_block],
            shifted_block_positive=result.shifted_block_positive,
        )
        self._common_diagonal(report, result.combined)
        self._decompositions(report, result.combined)

    def _multiplication(self, report: ClassificationReport, model: MeasureSpaceModel) -> None:
        diagonal = to_diagonal(model)
        report.spectrum = self._spectrum_summary(spectrum_of_diagonal(diagonal))
        report.min_modulus = format_expr(ess_inf(model))
        report.norm = format_expr(ess_sup(model))
        low = is_min_attaining_mult(model)
        high = is_norm_attaining_mult(model)
        report.min_attaining = AttainmentSummary(attained=low.attained, value=format_expr(low.value), witness=low.witness)
        report.norm_attaining = AttainmentSummary(attained=high.attained, value=format_expr(high.value), witness=high.witness)
        am = classify_am_mult(model)
        an = classify_an_mult(model)
        report.am = VerdictSummary(verdict=am.verdict.value, reason=am.reason.value)
        report.an = VerdictSummary(verdict=an.verdict.value, reason=an.reason.value)
        report.multiplication = MultiplicationSummary(
            ess_inf=report.min_modulus,
            ess_sup=report.norm,
            am_layers=[format_expr(layer.level) for layer in am.layers],
            am_sweep_is_infinite=am.sweep_is_infinite,
            diagonal_reduction_agrees=check_diagonal_reduction(model).holds,
        )

    def _matrix(self, report: ClassificationReport, a: FiniteMatrix) -> None:
        config = self.config
        decomposition = svd(a)
        report.min_modulus = _float_text(decomposition.smallest)
        report.norm = _float_text(decomposition.largest)
        if not a.is_square:
            report.errors.append("matrix: hyponormal and paranormal checks need a square matrix")
            return
        paranormal = is_paranormal_fd(
            a,
            lambda_grid_size=config.paranormal_grid_size,
            trials=config.paranormal_trials,
            tolerance=config.psd_slack,
            seed=config.default_seed,
        )
        report.matrix = MatrixSummary(
            singular_values=[float(s) for s in decomposition.singular_values],
            numerical_rank=numerical_rank(a, config.rank_cutoff),
            hyponormal=is_hyponormal_fd(a, config.psd_slack),
            paranormal=paranormal.holds,
            paranormal_witness_source=paranormal.source,
            moore_penrose_hold=check_moore_penrose(
                a,
                tolerance=config.projector_tolerance,
                rank_cutoff=config.rank_cutoff,
                psd_slack=config.psd_slack,
            ).all_hold,
            spectral_equalities_hold=check_spectral_equalities(a, rank_cutoff=config.rank_cutoff).nonzero_match,
            kernel_lemmas_hold=check_kernel_lemmas(
                a,
                tolerance=config.projector_tolerance,
                lambda_grid_size=config.paranormal_grid_size,
                trials=config.paranormal_trials,
                seed=config.default_seed,
            ).holds,
        )


def run_pipeline(description: OperatorDescription, config: Config | None = None) -> ClassificationReport:
    """Classify one description with a fresh pipeline."""
    return ClassificationPipeline(config).run(description)
