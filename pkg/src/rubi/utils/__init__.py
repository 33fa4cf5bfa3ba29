"""Utility functions."""

from .formatting import format_duration, format_path_list, format_percent

__all__ = ["format_duration", "format_path_list", "format_percent"]
