"""Run ledger."""

from .database import RunLedger
from .models import Run, StageRecord

__all__ = ["RunLedger", "Run", "StageRecord"]
