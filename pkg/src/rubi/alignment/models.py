"""Alignment maps, optimiser settings and convergence logs."""

import csv
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..errors import InputError

ORTHOGONALITY_TOL = 1e-6


class AlignMethod(str, Enum):
    """How an alignment map was produced."""

    PROCRUSTES = "procrustes"
    WPROC = "wproc"
    RCSLS = "rcsls"


class InitMethod(str, Enum):
    """Starting point of the stochastic Wasserstein-Procrustes loop."""

    IDENTITY = "identity"
    RANDOM_ORTHOGONAL = "random_orthogonal"
    PROCRUSTES_SEED = "procrustes_seed"


class Constraint(str, Enum):
    """Feasible set RCSLS refinement projects onto after every step."""

    ORTHOGONAL = "orthogonal"
    SPECTRAL_BALL = "spectral_ball"


def orthogonality_error(matrix: np.ndarray) -> float:
    """max |Q^T Q - I|."""
    return float(np.abs(matrix.T @ matrix - np.eye(matrix.shape[1])).max())


@dataclass(frozen=True)
class AlignmentMap:
    """d x d map W with ``X @ W`` landing in the target space."""

    matrix: np.ndarray
    source_lang: str = "src"
    target_lang: str = "tgt"
    method: AlignMethod = AlignMethod.PROCRUSTES
    orthogonal: bool = field(default=False)

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=np.float64, copy=True)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise InputError(f"alignment matrix must be square, got {matrix.shape}")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "method", AlignMethod(self.method))
        if self.orthogonal and orthogonality_error(matrix) > ORTHOGONALITY_TOL:
            raise InputError("matrix flagged orthogonal but |Q^T Q - I| exceeds 1e-6")

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def apply(self, vectors: np.ndarray) -> np.ndarray:
        """Map row vectors into the target space."""
        vectors = np.asarray(vectors, dtype=np.float64)
        if vectors.shape[-1] != self.dim:
            raise InputError(f"vectors of dim {vectors.shape[-1]} do not fit a {self.dim}-d map")
        return vectors @ self.matrix

    @classmethod
    def identity(
        cls, dim: int, source_lang: str = "src", target_lang: str = "tgt"
    ) -> "AlignmentMap":
        return cls(np.eye(dim), source_lang, target_lang, AlignMethod.PROCRUSTES, True)


def save_alignment(alignment: AlignmentMap, path: Path | str) -> None:
    """Text format: header ``d method source_lang target_lang``, then d rows."""
    path = Path(path)
    with open(path, "w", encoding="utf-8") as f:
        f.write(
            f"{alignment.dim} {alignment.method.value} "
            f"{alignment.source_lang or '-'} {alignment.target_lang or '-'}\n"
        )
        for row in alignment.matrix:
            f.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def load_alignment(path: Path | str) -> AlignmentMap:
    """Read a map written by :func:`save_alignment`."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"alignment file not found: {path}")
    try:
        with open(path, encoding="utf-8") as f:
            lines = f.read().splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read alignment {path}: {exc}") from exc
    header = lines[0].split() if lines else []
    if len(header) != 4:
        raise InputError(f"{path}: header must be 'd method source_lang target_lang'")
    try:
        d = int(header[0])
        method = AlignMethod(header[1])
        rows = [[float(v) for v in line.split()] for line in lines[1:] if line.strip()]
        matrix = np.array(rows, dtype=np.float64)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None
    if matrix.shape != (d, d):
        raise InputError(f"{path}: expected {d}x{d} matrix, got {matrix.shape}")
    return AlignmentMap(
        matrix=matrix,
        source_lang=header[2],
        target_lang=header[3],
        method=method,
        orthogonal=orthogonality_error(matrix) <= ORTHOGONALITY_TOL,
    )


class WProcConfig(BaseModel):
    """Settings of the stochastic Wasserstein-Procrustes loop."""

    model_config = ConfigDict(extra="forbid", use_enum_values=False)

    batch_size: int = Field(500, ge=1)
    epochs: int = Field(5, ge=0)
    iters_per_epoch: int = Field(5000, ge=0)
    learning_rate: float = Field(0.5, gt=0)
    seed: int = 0
    init: InitMethod = InitMethod.PROCRUSTES_SEED
    # batches are drawn from this many most frequent words
    sample_top: int = Field(20000, ge=1)
    log_every: int = Field(100, ge=1)
    # upper bound on assignment/Procrustes rounds while building the seed
    seed_rounds: int = Field(100, ge=1)


class RcslsConfig(BaseModel):
    """Settings of RCSLS refinement."""

    model_config = ConfigDict(extra="forbid")

    k_neighbors: int = Field(10, ge=1)
    iterations: int = Field(50, ge=0)
    step_size: float = Field(1.0, gt=0)
    constraint: Constraint = Constraint.SPECTRAL_BALL
    # neighbourhoods are searched among this many most frequent words (None: all)
    pool_size: Optional[int] = Field(None, ge=1)


@dataclass
class ConvergenceLog:
    """Mean batch objective per logging window of the alignment loop."""

    iterations: list[int] = field(default_factory=list)
    objectives: list[float] = field(default_factory=list)

    def record(self, iteration: int, objective: float) -> None:
        self.iterations.append(iteration)
        self.objectives.append(objective)

    def __len__(self) -> int:
        return len(self.iterations)

    def to_csv(self, path: Path | str) -> None:
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["iter", "objective"])
            for it, obj in zip(self.iterations, self.objectives):
                writer.writerow([it, f"{obj:.17g}"])

    @classmethod
    def from_csv(cls, path: Path | str) -> "ConvergenceLog":
        log = cls()
        try:
            with open(path, newline="", encoding="utf-8") as f:
                for row in csv.DictReader(f):
                    log.record(int(row["iter"]), float(row["objective"]))
        except (OSError, ValueError, KeyError, csv.Error) as exc:
            raise InputError(f"cannot read convergence log {path}: {exc}") from exc
        return log
