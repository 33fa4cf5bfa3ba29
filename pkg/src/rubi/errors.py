"""Exception hierarchy for RUBI.

The CLI maps these onto exit codes: input problems exit with 2, numerical
failures with 3.
"""

from typing import Optional


class RubiError(Exception):
    """Base class for every error raised by the toolkit."""

    exit_code = 1

    def __init__(self, message: str, stage: Optional[str] = None):
        super().__init__(message)
        self.stage = stage

    def with_stage(self, stage: str) -> "RubiError":
        """Tag the error with the pipeline stage it escaped from."""
        if self.stage is None:
            self.stage = stage
        return self

    def __str__(self) -> str:
        message = super().__str__()
        return f"[{self.stage}] {message}" if self.stage else message


class InputError(RubiError, ValueError):
    """Malformed files, invalid configuration or bad arguments."""

    exit_code = 2


class NumericalError(RubiError, ArithmeticError):
    """Non-finite values, failed decompositions or diverging optimisation."""

    exit_code = 3


class TrainingDiverged(NumericalError):
    """Ranker training produced a non-finite loss or gradient."""

    def __init__(self, message: str, report: object = None, stage: Optional[str] = None):
        super().__init__(message, stage=stage)
        self.report = report
