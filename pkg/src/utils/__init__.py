"""
Utilities package.

Contains option parsing helpers and the CSV/JSON writers.
"""

from .export import (
    CONFIG_PREFIX,
    config_line,
    emit,
    read_config_line,
    read_result_csv,
    records_frame,
    render_csv,
    render_json,
)
from .utils import (
    format_duration,
    parse_float_list,
    parse_int_list,
    split_list,
)

__all__ = [
    # Export
    "CONFIG_PREFIX",
    "config_line",
    "render_csv",
    "render_json",
    "records_frame",
    "read_config_line",
    "read_result_csv",
    "emit",
    # Parsing
    "split_list",
    "parse_float_list",
    "parse_int_list",
    "format_duration",
]
