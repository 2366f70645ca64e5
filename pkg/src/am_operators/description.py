"""Reading and writing operator descriptions as JSON or YAML."""

import json
from pathlib import Path
from typing import Any, Literal

import yaml
from pydantic import ValidationError

from .errors import DescriptionSchemaError, DescriptionSyntaxError, OperatorModelError
from .multiplication import MeasureSpaceModel
from .operators import (
    Cell,
    FiniteMatrix,
    NormalDiagonalModel,
    PositiveDiagonalModel,
    ShiftedDiagonalModel,
    TailRule,
)
from .schemas.description import (
    DESCRIPTION_ADAPTER,
    CellDocument,
    FiniteMatrixDescription,
    MeasureCellDocument,
    MultiplicationDescription,
    NormalDiagonalDescription,
    OperatorDescription,
    PhasedTailDocument,
    PositiveDiagonalDescription,
    ShiftedDiagonalDescription,
    SymbolTailDocument,
    TailDocument,
)
from .utils.exact import format_expr
from .utils.logger import get_logger

DocumentFormat = Literal["json", "yaml"]

SUFFIX_FORMATS: dict[str, DocumentFormat] = {".json": "json", ".yaml": "yaml", ".yml": "yaml"}

logger = get_logger(__name__)


def format_for(path: Path) -> DocumentFormat:
    try:
        return SUFFIX_FORMATS[path.suffix.lower()]
    except KeyError:
        raise DescriptionSyntaxError(f"Unsupported description file type {path.suffix!r} for {path}") from None


def _load_document(text: str, fmt: DocumentFormat) -> Any:
    if fmt == "json":
        try:
            return json.loads(text)
        except json.JSONDecodeError as e:
            raise DescriptionSyntaxError(e.msg, e.lineno, e.colno) from e
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        problem = getattr(e, "problem", None) or str(e)
        if mark is not None:
            raise DescriptionSyntaxError(problem, mark.line + 1, mark.column + 1) from e
        raise DescriptionSyntaxError(problem) from e


def _schema_error(e: ValidationError) -> DescriptionSchemaError:
    problems = []
    for error in e.errors():
        path = ".".join(str(part) for part in error["loc"])
        problems.append(f"{path or '<root>'}: {error['msg']}")
    return DescriptionSchemaError("; ".join(problems))


def parse_description(source: str | Path, fmt: DocumentFormat | None = None) -> OperatorDescription:
    """Parse and validate a description from a file path or from document text.

    Text is read as JSON unless ``fmt`` says otherwise; files use their suffix.
    The described model is built once so that invariant violations surface here.

    Raises:
        DescriptionSyntaxError: Malformed JSON or YAML, with line and column.
        DescriptionSchemaError: Well-formed document not matching the schema.
        OperatorModelError: The described operator violates a model invariant.
    """
    if isinstance(source, Path):
        fmt = fmt or format_for(source)
        text = source.read_text(encoding="utf-8")
    else:
        text = source
    document = _load_document(text, fmt or "json")
    if not isinstance(document, dict):
        raise DescriptionSchemaError("A description must be a mapping at the top level")

    try:
        description = DESCRIPTION_ADAPTER.validate_python(document)
    except ValidationError as e:
        raise _schema_error(e) from e

    description.to_model()
    logger.debug(f"Parsed {description.kind} description {description.name!r}")
    return description


def _cell_documents(cells: tuple[Cell, ...]) -> list[CellDocument]:
    return [CellDocument(value=format_expr(c.value), multiplicity=c.multiplicity.to_document()) for c in cells]


def _tail_fields(rule: TailRule) -> dict[str, Any]:
    if not rule.is_plain:
        raise OperatorModelError(f"Only untransformed tails can be written to a description, got {rule.describe()}")
    return {
        "limit": format_expr(rule.limit),
        "direction": rule.direction,
        "coefficient": format_expr(rule.coefficient),
        "exponent": format_expr(rule.exponent),
        "start_index": rule.start_index,
    }


def description_from_model(
    model: PositiveDiagonalModel | NormalDiagonalModel | ShiftedDiagonalModel | MeasureSpaceModel | FiniteMatrix,
    name: str,
    notes: str = "",
) -> OperatorDescription:
    """Description of a domain model, used to dump counterexamples for replay."""
    if isinstance(model, PositiveDiagonalModel):
        return PositiveDiagonalDescription(
            name=name,
            notes=notes,
            cells=_cell_documents(model.cells),
            tails=[TailDocument(**_tail_fields(rule)) for rule in model.tails],
        )
    if isinstance(model, NormalDiagonalModel):
        return NormalDiagonalDescription(
            name=name,
            notes=notes,
            cells=_cell_documents(model.cells),
            tails=[PhasedTailDocument(**_tail_fields(t.rule), phase=format_expr(t.phase)) for t in model.tails],
        )
    if isinstance(model, ShiftedDiagonalModel):
        return ShiftedDiagonalDescription(
            name=name,
            notes=notes,
            shift_order=model.shift_order,
            form=model.form,
            cells=_cell_documents(model.diag.cells),
            tails=[TailDocument(**_tail_fields(rule)) for rule in model.diag.tails],
        )
    if isinstance(model, MeasureSpaceModel):
        return MultiplicationDescription(
            name=name,
            notes=notes,
            measure_cells=[
                MeasureCellDocument(
                    label=c.label,
                    kind=c.kind,
                    weight=format_expr(c.weight),
                    value=format_expr(c.symbol_value),
                )
                for c in model.cells
            ],
            tail_families=[
                SymbolTailDocument(label=t.label, phase=format_expr(t.phase), **_tail_fields(t.rule))
                for t in model.tail_families
            ],
        )
    return FiniteMatrixDescription(name=name, notes=notes, matrix=model.to_pairs())


def description_document(description: OperatorDescription) -> dict[str, Any]:
    return description.model_dump(mode="json")


def emit_description(description: OperatorDescription, fmt: DocumentFormat = "json") -> str:
    """Serialize a description so that ``parse_description`` reads it back unchanged."""
    document = description_document(description)
    if fmt == "yaml":
        return yaml.safe_dump(document, sort_keys=False, allow_unicode=True)
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"
