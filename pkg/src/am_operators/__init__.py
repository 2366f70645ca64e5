"""AM Operators - classify absolutely minimum attaining operators on Hilbert spaces with exact spectra."""

__version__ = "0.1.0"
__description__ = "Exact classification of absolutely minimum attaining operators and their spectra"

from .classify import (
    Reason,
    Verdict,
    check_duality_am_an,
    classify_am_normal,
    classify_am_positive,
    classify_an_positive,
    direct_sum_am,
    spectral_decomposition_normal,
)
from .config import Config
from .description import emit_description, parse_description
from .multiplication import MeasureSpaceModel, classify_am_mult, classify_an_mult
from .operators import (
    Cell,
    FiniteMatrix,
    NormalDiagonalModel,
    PhasedTail,
    PositiveDiagonalModel,
    ShiftedDiagonalModel,
    TailDirection,
    TailRule,
)
from .pipeline import ClassificationPipeline, run_pipeline
from .spectra import SpectrumReport, spectrum_of_diagonal
from .utils import setup_minimal_logger

__all__ = [
    "Cell",
    "ClassificationPipeline",
    "Config",
    "FiniteMatrix",
    "MeasureSpaceModel",
    "NormalDiagonalModel",
    "PhasedTail",
    "PositiveDiagonalModel",
    "Reason",
    "ShiftedDiagonalModel",
    "SpectrumReport",
    "TailDirection",
    "TailRule",
    "Verdict",
    "__version__",
    "check_duality_am_an",
    "classify_am_mult",
    "classify_am_normal",
    "classify_am_positive",
    "classify_an_mult",
    "classify_an_positive",
    "direct_sum_am",
    "emit_description",
    "parse_description",
    "run_pipeline",
    "setup_minimal_logger",
    "spectral_decomposition_normal",
    "spectrum_of_diagonal",
]
