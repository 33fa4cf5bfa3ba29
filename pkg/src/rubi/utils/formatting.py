"""Formatting utilities for console output."""

from datetime import datetime
from typing import Optional


def format_duration(start: datetime, end: Optional[datetime]) -> str:
    """Format the duration between two datetimes; '-' while still running."""
    if end is None:
        return "-"
    total_seconds = int((end - start).total_seconds())

    if total_seconds < 60:
        return f"{total_seconds}s"
    elif total_seconds < 3600:
        minutes = total_seconds // 60
        seconds = total_seconds % 60
        return f"{minutes}m {seconds}s" if seconds else f"{minutes}m"
    else:
        hours = total_seconds // 3600
        minutes = (total_seconds % 3600) // 60
        if minutes:
            return f"{hours}h {minutes}m"
        return f"{hours}h"


def format_percent(value: Optional[float], digits: int = 1) -> str:
    """0.933 -> '93.3%'; None -> 'n/a'."""
    if value is None:
        return "n/a"
    return f"{100.0 * value:.{digits}f}%"


def format_path_list(paths: list[str], max_display: int = 5) -> str:
    """Format a list of artifact paths for display."""
    if not paths:
        return "None"

    if len(paths) <= max_display:
        return "\n".join(f"  • {p}" for p in paths)

    displayed = "\n".join(f"  • {p}" for p in paths[:max_display])
    remaining = len(paths) - max_display
    return f"{displayed}\n  ... and {remaining} more"
