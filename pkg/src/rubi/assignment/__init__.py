"""Linear assignment solver used inside Wasserstein alignment."""

from .hungarian import Direction, Permutation, assignment_value, solve_assignment

__all__ = ["Direction", "Permutation", "assignment_value", "solve_assignment"]
