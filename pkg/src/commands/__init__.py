"""
Commands package.

Contains the command-line entry points.
"""

from . import estimate, match, simulate

__all__ = [
    "estimate",
    "match",
    "simulate",
]
