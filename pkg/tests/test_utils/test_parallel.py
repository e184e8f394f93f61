"""
Unit tests for the order-preserving trial runner.
"""
from functools import partial

from src.utils.parallel import run_indexed
from src.utils.rng import child_rng


def _draw(index: int, seed: int) -> float:
    return float(child_rng(seed, index).standard_normal())


class TestRunIndexed:
    """Tests for run_indexed function."""

    def test_serial_order(self):
        assert run_indexed(lambda i: i * i, 5, jobs=1) == [0, 1, 4, 9, 16]

    def test_empty(self):
        assert run_indexed(lambda i: i, 0, jobs=4) == []

    def test_jobs_do_not_change_results(self):
        """Results are identical for one and several workers."""
        fn = partial(_draw, seed=42)
        serial = run_indexed(fn, 20, jobs=1)
        pooled = run_indexed(fn, 20, jobs=3)
        assert serial == pooled
