"""Ledger records for RUBI runs."""

from dataclasses import dataclass, field
from datetime import datetime
from typing import Optional


@dataclass
class Run:
    """One CLI invocation against a run directory."""
    id: Optional[int] = None
    command: str = ""
    config_hash: str = ""
    started_at: datetime = field(default_factory=datetime.now)
    finished_at: Optional[datetime] = None
    status: str = "running"  # running, ok, failed

    @classmethod
    def from_row(cls, row: tuple) -> "Run":
        """Create Run from database row."""
        return cls(
            id=row[0],
            command=row[1],
            config_hash=row[2],
            started_at=datetime.fromisoformat(row[3]),
            finished_at=datetime.fromisoformat(row[4]) if row[4] else None,
            status=row[5],
        )

    @property
    def is_active(self) -> bool:
        return self.finished_at is None


@dataclass
class StageRecord:
    """An artifact a run produced (or reused)."""
    id: Optional[int] = None
    run_id: int = 0
    stage: str = ""  # align, candidates, featurize, train, predict, evaluate
    artifact: str = ""
    completed_at: datetime = field(default_factory=datetime.now)

    @classmethod
    def from_row(cls, row: tuple) -> "StageRecord":
        """Create StageRecord from database row."""
        return cls(
            id=row[0],
            run_id=row[1],
            stage=row[2],
            artifact=row[3],
            completed_at=datetime.fromisoformat(row[4]),
        )
