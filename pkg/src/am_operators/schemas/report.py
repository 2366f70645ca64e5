"""Classification report documents."""

from typing import Any

from pydantic import BaseModel, Field

from .description import SCHEMA_VERSION


class EigenvalueEntry(BaseModel):
    value: str
    multiplicity: int | str


class SpectrumSummary(BaseModel):
    """Essential set, discrete eigenvalues (listing capped) and tail descriptors."""

    essential: list[str] = Field(default_factory=list)
    continuous: list[str] = Field(default_factory=list)
    point: list[EigenvalueEntry] = Field(default_factory=list)
    discrete: list[str] = Field(default_factory=list)
    discrete_truncated: bool = False
    tails: list[str] = Field(default_factory=list)
    continuous_recomputed: bool = False


class AttainmentSummary(BaseModel):
    attained: bool
    value: str
    witness: int | str | None = None


class VerdictSummary(BaseModel):
    verdict: str
    reason: str
    counterexample_streams: list[int] | None = None


class DecompositionSummary(BaseModel):
    """``level*I -/+ K +/- F`` with ``K`` and ``F`` listed as diagonal models."""

    level: str
    compact_cells: list[EigenvalueEntry] = Field(default_factory=list)
    compact_tails: list[str] = Field(default_factory=list)
    finite_entries: list[EigenvalueEntry] = Field(default_factory=list)


class BlockSummary(BaseModel):
    beta: str
    members: list[str]


class SpectralDecompositionSummary(BaseModel):
    blocks: list[BlockSummary] = Field(default_factory=list)
    tail_families: list[str] = Field(default_factory=list)
    round_trip_exact: bool = True


class DualitySummary(BaseModel):
    am: str
    range_closed: bool
    an_of_pinv: str | None = None
    consistent: bool


class AdjointTransferSummary(BaseModel):
    ess_tstar_t: list[str]
    ess_t_tstar: list[str]
    ess_equal: bool
    am_t: str
    am_tstar: str
    min_modulus_t: str
    min_modulus_tstar: str


class MultiplicationSummary(BaseModel):
    ess_inf: str
    ess_sup: str
    am_layers: list[str] = Field(default_factory=list)
    am_sweep_is_infinite: bool = False
    diagonal_reduction_agrees: bool


class DirectSumSummary(BaseModel):
    verdict: str
    shifted_block: list[str]
    shifted_block_positive: bool


class TruncationSummary(BaseModel):
    n: int
    sigma_min: float
    min_modulus: float
    bound: float | None = None
    within_bound: bool | None = None


class MatrixSummary(BaseModel):
    """Oracle readings for a dense matrix."""

    singular_values: list[float]
    numerical_rank: int
    hyponormal: bool
    paranormal: bool
    paranormal_witness_source: str | None = None
    moore_penrose_hold: bool
    spectral_equalities_hold: bool
    kernel_lemmas_hold: bool


class ClassificationReport(BaseModel):
    """Everything the pipeline derives from one description.

    Derived quantities that fail are recorded in ``errors`` and left unset.
    """

    schema_version: str = SCHEMA_VERSION
    name: str
    kind: str
    success: bool = True
    min_modulus: str | None = None
    essential_min_modulus: str | None = None
    norm: str | None = None
    spectrum: SpectrumSummary | None = None
    min_attaining: AttainmentSummary | None = None
    norm_attaining: AttainmentSummary | None = None
    am: VerdictSummary | None = None
    an: VerdictSummary | None = None
    am_decomposition: DecompositionSummary | None = None
    an_decomposition: DecompositionSummary | None = None
    spectral_decomposition: SpectralDecompositionSummary | None = None
    duality: DualitySummary | None = None
    adjoint_transfer: AdjointTransferSummary | None = None
    multiplication: MultiplicationSummary | None = None
    direct_sum: DirectSumSummary | None = None
    matrix: MatrixSummary | None = None
    truncation: TruncationSummary | None = None
    errors: list[str] = Field(default_factory=list)
    timing_seconds: float | None = None

    @classmethod
    def error_report(cls, name: str, kind: str, error: str) -> "ClassificationReport":
        """A report for a description that could not be processed at all."""
        return cls(name=name, kind=kind, success=False, errors=[error])

    def to_document(self) -> dict[str, Any]:
        return self.model_dump(mode="json", exclude_none=True)
