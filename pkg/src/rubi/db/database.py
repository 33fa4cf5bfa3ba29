"""SQLite run ledger."""

import sqlite3
from contextlib import contextmanager
from datetime import datetime
from pathlib import Path
from typing import Generator, Optional

from .models import Run, StageRecord


class RunLedger:
    """SQLite ledger of runs and completed stages inside a run directory."""

    def __init__(self, db_path: Path):
        """Open (and create if needed) the ledger at ``db_path``."""
        self.db_path = Path(db_path)
        self.db_path.parent.mkdir(parents=True, exist_ok=True)
        self._init_schema()

    @contextmanager
    def _connection(self) -> Generator[sqlite3.Connection, None, None]:
        """Context manager for database connections."""
        conn = sqlite3.connect(self.db_path)
        conn.row_factory = sqlite3.Row
        try:
            yield conn
            conn.commit()
        finally:
            conn.close()

    def _init_schema(self) -> None:
        with self._connection() as conn:
            conn.executescript("""
                CREATE TABLE IF NOT EXISTS runs (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    command TEXT NOT NULL,
                    config_hash TEXT NOT NULL,
                    started_at TEXT NOT NULL,
                    finished_at TEXT,
                    status TEXT NOT NULL DEFAULT 'running'
                );

                CREATE TABLE IF NOT EXISTS stages (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    run_id INTEGER NOT NULL,
                    stage TEXT NOT NULL,
                    artifact TEXT NOT NULL,
                    completed_at TEXT NOT NULL,
                    FOREIGN KEY (run_id) REFERENCES runs(id)
                );

                CREATE INDEX IF NOT EXISTS idx_stages_run ON stages(run_id);
            """)

    # Run operations

    def start_run(self, command: str, config_hash: str) -> Run:
        """Open a new run."""
        now = datetime.now().isoformat()
        with self._connection() as conn:
            cursor = conn.execute(
                "INSERT INTO runs (command, config_hash, started_at) VALUES (?, ?, ?)",
                (command, config_hash, now)
            )
            return Run(
                id=cursor.lastrowid,
                command=command,
                config_hash=config_hash,
                started_at=datetime.fromisoformat(now),
            )

    def finish_run(self, run_id: int, status: str = "ok") -> None:
        """Close a run with its final status."""
        with self._connection() as conn:
            conn.execute(
                "UPDATE runs SET finished_at = ?, status = ? WHERE id = ?",
                (datetime.now().isoformat(), status, run_id)
            )

    def get_run(self, run_id: int) -> Optional[Run]:
        with self._connection() as conn:
            row = conn.execute(
                """SELECT id, command, config_hash, started_at, finished_at, status
                   FROM runs WHERE id = ?""",
                (run_id,)
            ).fetchone()
            return Run.from_row(tuple(row)) if row else None

    def list_runs(self, limit: int = 20) -> list[Run]:
        """Most recent runs first."""
        with self._connection() as conn:
            rows = conn.execute(
                """SELECT id, command, config_hash, started_at, finished_at, status
                   FROM runs ORDER BY id DESC LIMIT ?""",
                (limit,)
            ).fetchall()
            return [Run.from_row(tuple(row)) for row in rows]

    # Stage operations

    def record_stage(self, run_id: int, stage: str, artifact: str) -> StageRecord:
        """Note that ``run_id`` produced ``artifact`` for ``stage``."""
        now = datetime.now().isoformat()
        with self._connection() as conn:
            cursor = conn.execute(
                "INSERT INTO stages (run_id, stage, artifact, completed_at) VALUES (?, ?, ?, ?)",
                (run_id, stage, artifact, now)
            )
            return StageRecord(
                id=cursor.lastrowid,
                run_id=run_id,
                stage=stage,
                artifact=artifact,
                completed_at=datetime.fromisoformat(now),
            )

    def get_stages(self, run_id: int) -> list[StageRecord]:
        with self._connection() as conn:
            rows = conn.execute(
                """SELECT id, run_id, stage, artifact, completed_at
                   FROM stages WHERE run_id = ? ORDER BY id""",
                (run_id,)
            ).fetchall()
            return [StageRecord.from_row(tuple(row)) for row in rows]

    def completed_artifacts(self, config_hash: str) -> set[str]:
        """Artifacts whose most recent writer ran under ``config_hash``."""
        with self._connection() as conn:
            rows = conn.execute(
                """SELECT s.artifact FROM stages s JOIN runs r ON s.run_id = r.id
                   WHERE s.id IN (SELECT MAX(id) FROM stages GROUP BY artifact)
                     AND r.config_hash = ?""",
                (config_hash,)
            ).fetchall()
            return {row[0] for row in rows}
