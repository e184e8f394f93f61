"""
Unit tests for random stream helpers.
"""
import numpy as np

from src.utils.rng import child_rng, open_unit


class TestChildRng:
    """Tests for child_rng function."""

    def test_same_key_same_stream(self):
        """Identical (seed, key) pairs give identical draws."""
        a = child_rng(7, 3, 11).standard_normal(5)
        b = child_rng(7, 3, 11).standard_normal(5)
        np.testing.assert_array_equal(a, b)

    def test_different_keys_differ(self):
        """Different trial indices or seeds give different draws."""
        base = child_rng(7, 0, 1).standard_normal(5)
        assert not np.array_equal(base, child_rng(7, 0, 2).standard_normal(5))
        assert not np.array_equal(base, child_rng(8, 0, 1).standard_normal(5))
        assert not np.array_equal(base, child_rng(7, 1, 1).standard_normal(5))

    def test_independent_of_creation_order(self):
        """A stream does not depend on which other streams were created first."""
        first = child_rng(1, 5).random(3)
        child_rng(1, 4).random(100)
        np.testing.assert_array_equal(first, child_rng(1, 5).random(3))


class TestOpenUnit:
    """Tests for open_unit function."""

    def test_strictly_inside(self):
        u = open_unit(np.random.default_rng(0), 100_000)
        assert np.all(u > 0.0)
        assert np.all(u < 1.0)
