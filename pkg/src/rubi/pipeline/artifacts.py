"""Run directories: canonical artifact names, the manifest and resume checks."""

import json
import logging
from pathlib import Path
from typing import Optional, Sequence

from ..config import LEDGER_FILE
from ..db import Run, RunLedger
from ..errors import InputError

logger = logging.getLogger(__name__)

MANIFEST_FILE = "manifest.json"


def pair_name(source: str, target: str) -> str:
    return f"{source}-{target}"


class RunDirectory:
    """Folder holding every stage output of one configuration.

    ``manifest.json`` records the config hash, languages and seeds. With
    ``resume`` on, an artifact is reused only if the manifest carries the
    same config hash and the ledger recorded a run writing it.
    """

    def __init__(self, root: Path | str, config_hash: str, resume: bool = False):
        self.root = Path(root)
        self.config_hash = config_hash
        self.resume = resume
        self.root.mkdir(parents=True, exist_ok=True)
        self.ledger = RunLedger(self.root / LEDGER_FILE)
        self._run: Optional[Run] = None
        self._matched_before_begin: Optional[bool] = None

    # artifact names

    def alignment(self, source: str, target: str) -> Path:
        return self.root / f"align_{pair_name(source, target)}.txt"

    def convergence(self, source: str, target: str) -> Path:
        return self.root / f"convergence_{pair_name(source, target)}.csv"

    def candidates(self, source: str, target: str) -> Path:
        return self.root / f"candidates_{pair_name(source, target)}.tsv"

    def features(self, split: str) -> Path:
        return self.root / f"features_{split}.csv"

    @property
    def model(self) -> Path:
        return self.root / "model.txt"

    @property
    def training_report(self) -> Path:
        return self.root / "training.csv"

    @property
    def training_counts(self) -> Path:
        return self.root / "training_counts.json"

    def ranked(self, source: str, target: str) -> Path:
        return self.root / f"ranked_{pair_name(source, target)}.tsv"

    @property
    def result(self) -> Path:
        return self.root / "result.json"

    @property
    def manifest(self) -> Path:
        return self.root / MANIFEST_FILE

    # manifest

    def read_manifest(self) -> Optional[dict]:
        if not self.manifest.exists():
            return None
        try:
            return json.loads(self.manifest.read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise InputError(f"corrupt manifest {self.manifest}: {exc}") from exc

    def write_manifest(self, languages: dict[str, str], seeds: dict[str, int]) -> None:
        manifest = {"config_hash": self.config_hash, "languages": languages, "seeds": seeds}
        text = json.dumps(manifest, sort_keys=True, indent=2) + "\n"
        self.manifest.write_text(text, encoding="utf-8")

    def manifest_matches(self) -> bool:
        manifest = self.read_manifest()
        return manifest is not None and manifest.get("config_hash") == self.config_hash

    # ledger

    def begin(self, command: str, languages: dict[str, str], seeds: dict[str, int]) -> Run:
        # reuse decisions use the manifest as found, not the one written here
        self._matched_before_begin = self.manifest_matches()
        if self.manifest.exists() and not self._matched_before_begin:
            logger.warning(
                "%s holds outputs of another configuration; they will be replaced", self.root
            )
        self.write_manifest(languages, seeds)
        self._run = self.ledger.start_run(command, self.config_hash)
        return self._run

    def finish(self, status: str = "ok") -> None:
        if self._run is not None and self._run.id is not None:
            self.ledger.finish_run(self._run.id, status)
            self._run = None

    def record(self, stage: str, artifacts: Sequence[Path]) -> None:
        if self._run is None or self._run.id is None:
            return
        for artifact in artifacts:
            self.ledger.record_stage(self._run.id, stage, artifact.name)

    def reusable(self, *artifacts: Path) -> bool:
        """True when every artifact can be loaded instead of recomputed."""
        matched = self._matched_before_begin
        if matched is None:
            matched = self.manifest_matches()
        if not self.resume or not matched:
            return False
        done = self.ledger.completed_artifacts(self.config_hash)
        return all(a.exists() and a.name in done for a in artifacts)
