"""Exact linear assignment on square cost matrices."""

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..errors import InputError


class Direction(str, Enum):
    """Whether the assignment minimises or maximises the total cost."""

    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"


@dataclass(frozen=True)
class Permutation:
    """Bijection on {0..n-1}: ``mapping[i]`` is the column assigned to row i."""

    mapping: np.ndarray

    def __post_init__(self) -> None:
        mapping = np.asarray(self.mapping, dtype=np.int64)
        n = mapping.shape[0] if mapping.ndim == 1 else -1
        if n < 0 or not np.array_equal(np.sort(mapping), np.arange(n)):
            raise InputError("mapping is not a permutation of 0..n-1")
        mapping = mapping.copy()
        mapping.setflags(write=False)
        object.__setattr__(self, "mapping", mapping)

    def __len__(self) -> int:
        return int(self.mapping.shape[0])

    def inverse(self) -> "Permutation":
        """Permutation sending each column back to its row."""
        inv = np.empty_like(self.mapping)
        inv[self.mapping] = np.arange(len(self))
        return Permutation(inv)

    def as_matrix(self) -> np.ndarray:
        """0/1 matrix P with P[i, mapping[i]] = 1."""
        P = np.zeros((len(self), len(self)))
        P[np.arange(len(self)), self.mapping] = 1.0
        return P


def _check_cost(cost: np.ndarray) -> np.ndarray:
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
        raise InputError(f"cost matrix must be square, got shape {cost.shape}")
    if not np.all(np.isfinite(cost)):
        raise InputError("cost matrix contains non-finite entries")
    return cost


def solve_assignment(
    cost: np.ndarray,
    direction: Direction | str = Direction.MINIMIZE,
) -> Permutation:
    """Optimal permutation for ``sum_i cost[i, mapping[i]]``.

    Uses the Jonker-Volgenant shortest augmenting path solver from scipy,
    which is exact and O(n^3). Rows are processed in index order, so ties
    resolve the same way on every run.
    """
    cost = _check_cost(cost)
    maximize = Direction(direction) is Direction.MAXIMIZE
    if cost.shape[0] == 0:
        return Permutation(np.zeros(0, dtype=np.int64))
    rows, cols = linear_sum_assignment(cost, maximize=maximize)
    mapping = np.empty(cost.shape[0], dtype=np.int64)
    mapping[rows] = cols
    return Permutation(mapping)


def assignment_value(cost: np.ndarray, perm: Permutation) -> float:
    """Objective ``sum_i cost[i, perm.mapping[i]]``."""
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2 or cost.shape != (len(perm), len(perm)):
        raise InputError(
            f"permutation of size {len(perm)} does not fit cost matrix {cost.shape}"
        )
    return float(cost[np.arange(len(perm)), perm.mapping].sum())
