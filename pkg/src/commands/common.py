"""Shared command plumbing: option groups, error translation, output."""

import functools
import logging
from collections.abc import Callable, Sequence
from typing import Any, TypeVar

import click
import pandas as pd
from pydantic import BaseModel
from pydantic import ValidationError as PydanticValidationError

from ..core.exceptions import EXIT_VALIDATION, UqpeError
from ..models import OutputFormat
from ..schemas import RunConfig
from ..utils import emit, render_csv, render_json

logger = logging.getLogger(__name__)

EXIT_INTERNAL = 1

F = TypeVar("F", bound=Callable[..., Any])


def report_error(stage: str, code: str, message: str) -> None:
    click.echo(f"error [{stage}] {code}: {message}", err=True)


def handle_errors(command: str) -> Callable[[F], F]:
    """Translate known failures into exit codes: 2 validation, 3 numeric."""

    def decorator(fn: F) -> F:
        @functools.wraps(fn)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            try:
                return fn(*args, **kwargs)
            except UqpeError as exc:
                logger.debug(f"{command} failed with {exc.code}: {exc.details}")
                report_error(exc.stage or command, exc.code, exc.message)
                raise SystemExit(exc.exit_code) from None
            except PydanticValidationError as exc:
                first = exc.errors()[0]
                location = ".".join(str(part) for part in first.get("loc", ()))
                report_error("cli", "InvalidOption", f"{location}: {first['msg']}")
                raise SystemExit(EXIT_VALIDATION) from None
            except (click.ClickException, SystemExit):
                raise
            except Exception as exc:
                logger.error(f"{command}: unexpected error - {exc}", exc_info=True)
                report_error(command, "InternalError", str(exc))
                raise SystemExit(EXIT_INTERNAL) from None

        return wrapper  # type: ignore[return-value]

    return decorator


def data_options(fn: F) -> F:
    """Options selecting the input CSV and its columns."""
    options = [
        click.option("--data", "data_path", required=True, type=click.Path(dir_okay=False), help="Input CSV file"),
        click.option("--outcome", required=True, help="Outcome column"),
        click.option("--target", required=True, help="Target covariate column"),
        click.option("--controls", default="", help="Comma-separated control columns"),
        click.option("--drop-na", is_flag=True, help="Drop rows with missing values instead of failing"),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def output_options(fn: F) -> F:
    options = [
        click.option("--seed", type=int, default=None, help="Master seed (default UQPE_SEED)"),
        click.option("--threads", type=int, default=None, help="Worker threads, 0 = auto (default UQPE_THREADS)"),
        click.option(
            "--format",
            "output_format",
            type=click.Choice([f.value for f in OutputFormat]),
            default=OutputFormat.csv.value,
            show_default=True,
        ),
        click.option("--output", type=click.Path(dir_okay=False), default=None, help="Output file (stdout if omitted)"),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def write_output(
    config: RunConfig,
    records: Sequence[BaseModel],
    frame: pd.DataFrame,
) -> None:
    """Emit records as JSON or the frame as CSV, with the config echo."""
    echo = config.echo()
    if config.format == OutputFormat.json.value:
        text = render_json(echo, records)
    else:
        text = render_csv(frame, echo)
    emit(text, config.output)
