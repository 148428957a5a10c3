"""
CSV and JSON writers.

Every document embeds the resolved run configuration: JSON documents as
{"config": ..., "records": [...]}, CSV files as a first comment line
`# config=<compact JSON>` followed by the header and rows.
"""

import io
import json
import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import click
import pandas as pd
from pydantic import BaseModel

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
CONFIG_PREFIX = "# config="


def config_line(config: dict[str, Any]) -> str:
    return CONFIG_PREFIX + json.dumps(config, separators=(",", ":"), sort_keys=True)


def render_csv(frame: pd.DataFrame, config: dict[str, Any]) -> str:
    buffer = io.StringIO()
    buffer.write(config_line(config) + "\n")
    frame.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return buffer.getvalue()


def records_frame(rows: Sequence[dict[str, Any]], columns: Sequence[str]) -> pd.DataFrame:
    return pd.DataFrame(list(rows), columns=list(columns))


def render_json(config: dict[str, Any], records: Sequence[BaseModel | dict[str, Any]]) -> str:
    payload = {
        "config": config,
        "records": [
            r.model_dump(mode="json") if isinstance(r, BaseModel) else r for r in records
        ],
    }
    return json.dumps(payload, indent=2, allow_nan=True) + "\n"


def read_config_line(path: str | Path) -> dict[str, Any]:
    """Configuration echoed on the first line of a CSV written by `render_csv`."""
    with open(path, encoding="utf-8") as handle:
        first = handle.readline().rstrip("\n")
    if not first.startswith(CONFIG_PREFIX):
        raise ValueError(f"{path} does not start with a config line")
    return json.loads(first.removeprefix(CONFIG_PREFIX))


def read_result_csv(path: str | Path) -> pd.DataFrame:
    return pd.read_csv(path, skiprows=1)


def emit(text: str, path: str | Path | None) -> None:
    """Write to `path`, or to stdout when no path is given."""
    if path is None:
        click.echo(text, nl=False)
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info(f"Wrote {path}")
