"""
Utility functions for uqpe-match.

Small parsing and formatting helpers used by the command line.
"""

import re

from ..core.exceptions import ValidationError

LIST_SEPARATOR = re.compile(r"[,\s]+")


def split_list(text: str | None) -> list[str]:
    """Split a comma or whitespace separated option value, dropping blanks."""
    if not text:
        return []
    return [item for item in LIST_SEPARATOR.split(text.strip()) if item]


def parse_float_list(text: str | None, option: str = "value") -> list[float]:
    """
    Parse "0.1,0.25,0.5" into floats.

    Raises:
        ValidationError: an item is not a number
    """
    values = []
    for item in split_list(text):
        try:
            values.append(float(item))
        except ValueError:
            raise ValidationError(
                f"Invalid {option} {item!r}: expected a number", {"option": option}
            ) from None
    return values


def parse_int_list(text: str | None, option: str = "value") -> list[int]:
    values = []
    for item in split_list(text):
        try:
            values.append(int(item))
        except ValueError:
            raise ValidationError(
                f"Invalid {option} {item!r}: expected an integer", {"option": option}
            ) from None
    return values


def format_duration(seconds: int | float) -> str:
    """
    Format a duration in seconds for log messages.

    Returns:
        Formatted duration string (e.g., "2h 30m", "45m 10s", "3.2s")
    """
    seconds = max(0.0, float(seconds))
    if seconds < 60:
        return f"{seconds:.1f}s"

    minutes, remaining_seconds = divmod(int(seconds), 60)
    if minutes < 60:
        if remaining_seconds == 0:
            return f"{minutes}m"
        return f"{minutes}m {remaining_seconds}s"

    hours, remaining_minutes = divmod(minutes, 60)
    if remaining_minutes == 0:
        return f"{hours}h"
    return f"{hours}h {remaining_minutes}m"
