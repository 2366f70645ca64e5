"""Command line interface for operator classification."""

import json
import sys
from pathlib import Path
from typing import Any

import click

from .config import Config
from .description import parse_description
from .errors import AMOperatorsError, DescriptionError, OperatorModelError, UnknownSuiteError
from .pipeline import ClassificationPipeline
from .suites import SUITES, SuiteRunner, list_suites
from .utils import get_logger, setup_logger
from .utils.description_loader import DescriptionLoader

EXIT_UNEXPECTED = 1
EXIT_DESCRIPTION = 2
EXIT_MODEL = 3
EXIT_SUITE_FAILED = 4


def write_document(document: dict[str, Any], output_path: str | None, pretty: bool = True) -> str:
    """Serialize a document; write it to ``output_path`` when given and return the text."""
    text = json.dumps(document, indent=2 if pretty else None, ensure_ascii=False) + "\n"
    if output_path:
        path = Path(output_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    return text


def _fail(message: str, code: int) -> None:
    click.echo(message, err=True)
    sys.exit(code)


@click.group()
@click.option("--debug", is_flag=True, help="Enable debug logging")
@click.pass_context
def main(ctx: click.Context, debug: bool) -> None:
    """am-operators - classify absolutely minimum attaining operators."""
    ctx.ensure_object(dict)

    config = Config.from_env()
    if debug:
        config.log_level = "DEBUG"

    setup_logger(config)
    ctx.obj["config"] = config
    ctx.obj["logger"] = get_logger(__name__)


@main.command()
@click.option("--descriptions-dir", default=None, help="Directory containing operator descriptions")
@click.pass_context
def list_examples(ctx: click.Context, descriptions_dir: str | None) -> None:
    """List the bundled example descriptions."""
    directory = descriptions_dir or ctx.obj["config"].descriptions_dir
    examples = DescriptionLoader(directory).list_descriptions_with_notes()

    if not examples:
        click.echo(f"No descriptions found in {directory}")
        return

    click.echo("Available example descriptions:")
    for name, notes in examples:
        click.echo(f"  {name}: {notes}")


@main.command("list-suites")
def list_suites_command() -> None:
    """List the property suites."""
    click.echo("Available suites:")
    for name, summary in list_suites():
        click.echo(f"  {name} ({SUITES[name].default_trials} trials): {summary}")


@main.command()
@click.argument("name", required=False)
@click.option("--descriptions-dir", default=None, help="Directory containing operator descriptions")
@click.pass_context
def validate(ctx: click.Context, name: str | None, descriptions_dir: str | None) -> None:
    """Parse-only check of one bundled description, or of all of them."""
    directory = descriptions_dir or ctx.obj["config"].descriptions_dir
    loader = DescriptionLoader(directory)
    names = [name] if name else loader.get_available_descriptions()

    if not names:
        click.echo(f"No descriptions found in {directory}")
        return

    click.echo(f"Validating {len(names)} descriptions in {directory}...")
    valid_count = 0
    for entry in names:
        is_valid, error = loader.validate_description(entry)
        if is_valid:
            valid_count += 1
            click.echo(f"OK   {entry}")
        else:
            click.echo(f"FAIL {entry}: {error}")

    click.echo(f"\n{valid_count}/{len(names)} descriptions are valid")
    if valid_count != len(names):
        sys.exit(EXIT_DESCRIPTION)


@main.command()
@click.option("--input", "-i", "input_file", type=click.Path(exists=True, dir_okay=False), help="Description file (.json, .yaml, .yml)")
@click.option("--example", "-e", help="Name of a bundled description")
@click.option("--report", "-r", "report_file", type=click.Path(), help="Write the JSON report here")
@click.option("--truncation", type=click.IntRange(1, 4096), default=None, help="Truncation size for the finite checks")
@click.option("--tolerance", type=float, default=None, help="Numerical tolerance")
@click.option("--emit-witness", is_flag=True, help="Include witness subspaces for NotAM/NotAN verdicts")
@click.option("--descriptions-dir", default=None, help="Directory containing operator descriptions")
@click.pass_context
def classify(
    ctx: click.Context,
    input_file: str | None,
    example: str | None,
    report_file: str | None,
    truncation: int | None,
    tolerance: float | None,
    emit_witness: bool,
    descriptions_dir: str | None,
) -> None:
    """Classify one operator description and print its report."""
    logger = ctx.obj["logger"]
    config: Config = ctx.obj["config"]
    if truncation is not None:
        config.truncation = truncation
    if tolerance is not None:
        config.tolerance = tolerance

    try:
        if input_file:
            description = parse_description(Path(input_file))
        elif example:
            loader = DescriptionLoader(descriptions_dir or config.descriptions_dir)
            description = loader.load_description(example)
        else:
            _fail("Error: Must provide either --input or --example", EXIT_DESCRIPTION)
            return
        report = ClassificationPipeline(config, emit_witness=emit_witness).run(description)
    except FileNotFoundError as e:
        _fail(str(e), EXIT_DESCRIPTION)
        return
    except DescriptionError as e:
        _fail(f"Invalid description: {e}", EXIT_DESCRIPTION)
        return
    except OperatorModelError as e:
        _fail(f"Invalid operator: {e}", EXIT_MODEL)
        return
    except AMOperatorsError as e:
        logger.exception("Classification failed")
        _fail(f"Classification failed: {e}", EXIT_UNEXPECTED)
        return

    text = write_document(report.to_document(), report_file)
    if report_file:
        click.echo(f"Report saved to {report_file}")
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--name", "-n", required=True, help="Suite name (see list-suites)")
@click.option("--seed", type=int, default=None, help="Root seed (default from AM_SEED)")
@click.option("--trials", type=click.IntRange(min=0), default=None, help="Number of trials (suite default otherwise)")
@click.option("--workers", "-w", type=click.IntRange(1, 64), default=None, help="Worker threads")
@click.option("--output", "-o", type=click.Path(), help="Write the JSON summary here")
@click.pass_context
def suite(
    ctx: click.Context,
    name: str,
    seed: int | None,
    trials: int | None,
    workers: int | None,
    output: str | None,
) -> None:
    """Run a property suite; counterexamples are dumped as replayable descriptions."""
    config: Config = ctx.obj["config"]
    runner = SuiteRunner(config)
    try:
        result = runner.run(name, seed=seed, trials=trials, workers=workers)
    except UnknownSuiteError as e:
        _fail(f"{e}", EXIT_SUITE_FAILED)
        return

    text = write_document(result.to_document(), output)
    if output:
        click.echo(f"Summary saved to {output}")
    passed = result.trials - len(result.failures)
    click.echo(f"{result.name}: {passed}/{result.trials} trials passed (seed {result.seed})")
    if not result.passed:
        if not output:
            click.echo(text, nl=False)
        sys.exit(EXIT_SUITE_FAILED)


if __name__ == "__main__":
    main()
