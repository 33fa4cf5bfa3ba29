"""Tests for the exact assignment solver."""

import itertools

import numpy as np
import pytest

from rubi.assignment import Direction, Permutation, assignment_value, solve_assignment
from rubi.errors import InputError


def brute_force_value(cost: np.ndarray) -> float:
    n = cost.shape[0]
    return min(
        sum(cost[i, p[i]] for i in range(n)) for p in itertools.permutations(range(n))
    )


class TestSolveAssignment:
    """Tests for solve_assignment."""

    def test_diagonal_favouring(self):
        """Test the obvious optimum of [[0, 9], [9, 0]]."""
        perm = solve_assignment(np.array([[0.0, 9.0], [9.0, 0.0]]))

        assert perm.mapping.tolist() == [0, 1]

    def test_three_by_three_matches_brute_force(self):
        """Test the 3 x 3 example against all six permutations."""
        cost = np.array([[4.0, 1.0, 3.0], [2.0, 0.0, 5.0], [3.0, 2.0, 2.0]])

        perm = solve_assignment(cost)

        assert assignment_value(cost, perm) == brute_force_value(cost)

    def test_maximize_equals_minimize_negated(self, rng):
        """Test maximising M gives the same mapping as minimising -M."""
        cost = rng.normal(size=(6, 6))

        up = solve_assignment(cost, Direction.MAXIMIZE)
        down = solve_assignment(-cost, "minimize")

        assert up.mapping.tolist() == down.mapping.tolist()

    def test_exact_on_small_random_matrices(self):
        """Test the solver equals n! enumeration for n <= 7 on 1000 seeded matrices."""
        rng = np.random.default_rng(0)
        for trial in range(1000):
            n = 1 + trial % 7
            cost = rng.integers(-20, 20, size=(n, n)).astype(float)
            perm = solve_assignment(cost)
            assert assignment_value(cost, perm) == brute_force_value(cost)

    def test_row_shift_shifts_value(self, rng):
        """Test adding a constant to a row shifts the optimum by that constant."""
        cost = rng.normal(size=(5, 5))
        shifted = cost.copy()
        shifted[2] += 3.5

        base = solve_assignment(cost)
        moved = solve_assignment(shifted)

        assert moved.mapping.tolist() == base.mapping.tolist()
        assert assignment_value(shifted, moved) == pytest.approx(assignment_value(cost, base) + 3.5)

    def test_transpose_gives_inverse(self, rng):
        """Test solving C^T returns the inverse permutation."""
        cost = rng.normal(size=(6, 6))

        perm = solve_assignment(cost)
        transposed = solve_assignment(cost.T)

        assert transposed.mapping.tolist() == perm.inverse().mapping.tolist()

    def test_empty_matrix(self):
        """Test a 0 x 0 problem has the empty permutation."""
        assert len(solve_assignment(np.zeros((0, 0)))) == 0

    def test_non_square_rejected(self):
        """Test rectangular costs are refused."""
        with pytest.raises(InputError):
            solve_assignment(np.zeros((2, 3)))

    def test_non_finite_rejected(self):
        """Test inf entries are refused."""
        with pytest.raises(InputError):
            solve_assignment(np.array([[0.0, np.inf], [1.0, 0.0]]))


class TestAssignmentValue:
    """Tests for assignment_value and Permutation."""

    def test_identity_and_swap(self):
        """Test both permutations of [[1, 2], [3, 4]] sum to 5."""
        cost = np.array([[1.0, 2.0], [3.0, 4.0]])

        assert assignment_value(cost, Permutation(np.array([0, 1]))) == 5.0
        assert assignment_value(cost, Permutation(np.array([1, 0]))) == 5.0

    def test_matches_trace_of_matrix_product(self, rng):
        """Test the value equals trace(P^T C)."""
        cost = rng.normal(size=(5, 5))
        perm = Permutation(rng.permutation(5))

        expected = np.trace(perm.as_matrix().T @ cost)

        assert assignment_value(cost, perm) == pytest.approx(expected)

    def test_dimension_mismatch(self):
        """Test a permutation of the wrong size is refused."""
        with pytest.raises(InputError):
            assignment_value(np.zeros((3, 3)), Permutation(np.array([1, 0])))

    def test_not_a_bijection(self):
        """Test mappings with repeats are rejected."""
        with pytest.raises(InputError):
            Permutation(np.array([0, 0, 1]))
