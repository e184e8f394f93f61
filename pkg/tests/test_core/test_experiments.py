"""
Unit tests for experiment campaigns.
"""
import json

import numpy as np
import pytest

from src.core.datagen import Dataset
from src.core.errors import NotSeparableError
from src.core.experiments import (
    CampaignResult,
    DEFAULT_BUDGETS,
    fig1_sizes,
    fit_classifier,
    paired_wce_empirical,
    preset_config,
    run_cosine_study,
    run_experiment,
    run_fig1_sweep,
    run_fig3_grid,
    run_theorem_campaign,
    summarize_reports,
    summarize_rows,
    write_campaign,
)
from src.core.file_manager import load_result_rows
from src.core.models import BudgetEntry, ExperimentConfig, GenRecipe
from src.core.svm import LinearModel
from src.utils.stats import spearman


def _means(rows, stat):
    return np.array([r.mean for r in rows if r.stat == stat])


def _table(rows):
    return [(r.family, r.classifier, r.dim, r.mu, r.n, r.beta, r.stat, r.mean, r.std, r.trials, r.failures) for r in rows]


class TestPresets:
    """Tests for preset_config function."""

    def test_targets(self):
        assert preset_config("fig1").kind == "Fig1Sweep"
        assert preset_config("fig3").kind == "Fig3Grid"
        assert preset_config("fig4").kind == "CosineStudy"

    def test_overrides(self):
        config = preset_config("fig1", n=400, trials=3, seed=11, beta=None)
        assert config.n == 400
        assert config.trials == 3
        assert config.seed == 11
        assert config.beta == 0.05

    def test_unknown(self):
        with pytest.raises(ValueError):
            preset_config("fig9")

    def test_default_budgets_are_valid(self):
        assert [b.family.value for b in DEFAULT_BUDGETS] == ["uniform", "laplace", "gaussian", "frechet"]


class TestHelpers:
    """Tests for fig1_sizes, fit_classifier and paired_wce_empirical."""

    def test_fig1_sizes(self):
        sizes = fig1_sizes(1000, 0.05, 12)
        assert sizes[0] == 50
        assert sizes[-1] == 1000
        assert sizes == sorted(set(sizes))

    def test_fit_classifier_hard_fallback(self):
        data = Dataset.from_classes([0.0, 2.0, 3.0], [1.0])
        config = ExperimentConfig(kind="Fig3Grid")
        with pytest.raises(NotSeparableError):
            fit_classifier("hard-svm", data, config)
        fallback = ExperimentConfig(kind="Fig3Grid", hard_fallback_soft=True)
        model = fit_classifier("hard-svm", data, fallback)
        assert np.all(np.isfinite(model.w))

    def test_fit_classifier_unknown(self):
        data = Dataset.from_classes([1.0], [-1.0])
        with pytest.raises(ValueError):
            fit_classifier("knn", data, ExperimentConfig(kind="Fig3Grid"))

    def test_paired_test_set(self, rng):
        recipe = GenRecipe.for_family("gaussian", 0.5)
        model = LinearModel(w=np.array([1.0]), b=-0.2)
        first, second = paired_wce_empirical(recipe, (model, model), 2000, rng)
        assert first == second
        assert 0.0 < first < 1.0


class TestFig1Sweep:
    """Tests for run_fig1_sweep function."""

    def _config(self, **overrides):
        values = dict(kind="Fig1Sweep", families=["gaussian"], n=200, beta=0.05, trials=10, grid_size=5, seed=3)
        values.update(overrides)
        return ExperimentConfig(**values)

    def test_rows(self):
        config = self._config()
        rows = run_fig1_sweep(config)
        sizes = fig1_sizes(200, 0.05, 5)
        assert len(rows) == 2 * len(sizes)
        assert [r.n for r in rows if r.stat == "wce"] == sizes
        assert rows[0].beta == 1.0
        assert rows[-1].beta == pytest.approx(0.05)
        assert all(0.0 <= r.mean <= 1.0 for r in rows if r.trials)

    def test_reproducible_across_jobs(self):
        config = self._config(trials=4)
        single = _table(run_fig1_sweep(config, jobs=1))
        pooled = _table(run_fig1_sweep(config, jobs=2))
        np.testing.assert_array_equal(np.array(single, dtype=object), np.array(pooled, dtype=object))

    @pytest.mark.slow
    def test_minimum_near_balanced(self):
        """The wce minimum sits within one grid step of the balanced size; average error falls with s."""
        config = preset_config("fig1", trials=500, seed=7)
        rows = run_fig1_sweep(config, jobs=4)
        sizes = fig1_sizes(config.n, config.beta, config.grid_size)
        wce, avg = _means(rows, "wce"), _means(rows, "avg_err")
        assert int(np.argmin(wce)) <= 1
        assert sizes[0] == 50
        assert spearman(sizes, avg) <= -0.8


class TestFig3Grid:
    """Tests for run_fig3_grid function."""

    def test_rows_per_cell(self):
        config = ExperimentConfig(
            kind="Fig3Grid", families=["gaussian", "laplace"], classifiers=["hard-svm"], dims=[1],
            mus=[3.0], n=100, beta=0.1, trials=5, test_points=500, hard_fallback_soft=True,
        )
        rows = run_fig3_grid(config)
        assert len(rows) == 2 * 3
        assert [r.stat for r in rows[:3]] == ["wce_erm", "wce_sub", "delta"]
        erm, sub, delta = rows[:3]
        assert delta.mean == pytest.approx(erm.mean - sub.mean)

    def test_balanced_is_noop(self):
        """beta = 1: the subsample is the full dataset, so delta is exactly zero."""
        config = ExperimentConfig(
            kind="Fig3Grid", families=["gaussian"], classifiers=["hard-svm", "logistic"], dims=[1],
            mus=[3.0], n=50, beta=1.0, trials=5, test_points=500, logistic_steps=50,
        )
        deltas = [r for r in run_fig3_grid(config) if r.stat == "delta"]
        for row in deltas:
            if row.trials:
                assert row.mean == 0.0
                assert row.std == 0.0

    def test_analytic_mode_guard(self):
        config = ExperimentConfig(kind="Fig3Grid", families=["laplace"], dims=[2], wce_mode="analytic", trials=2)
        with pytest.raises(ValueError):
            run_fig3_grid(config)

    def test_failures_counted(self):
        """Overlapping 1-D classes break the hard SVM; the cell reports NaN with failures."""
        config = ExperimentConfig(
            kind="Fig3Grid", families=["gaussian"], classifiers=["hard-svm"], dims=[1],
            mus=[0.1], n=200, beta=0.1, trials=3, test_points=100,
        )
        erm = run_fig3_grid(config)[0]
        assert erm.trials == 0
        assert erm.failures == 3
        assert np.isnan(erm.mean)

    @pytest.mark.slow
    def test_subsampling_never_worse(self):
        config = preset_config("fig3", trials=100, seed=7, hard_fallback_soft=True)
        rows = run_fig3_grid(config, jobs=4)
        for row in rows:
            if row.stat == "delta" and row.trials > 1:
                assert row.mean >= -2 * row.std / np.sqrt(row.trials)

    @pytest.mark.slow
    def test_low_dimension_overlap_gap(self):
        config = ExperimentConfig(
            kind="Fig3Grid", families=["gaussian"], classifiers=["soft-svm"], dims=[1], mus=[1.0],
            n=500, beta=0.1, trials=200, test_points=10_000, seed=7,
        )
        delta = [r for r in run_fig3_grid(config, jobs=4) if r.stat == "delta"][0]
        assert delta.mean > 3 * delta.std / np.sqrt(delta.trials)


class TestCosineStudy:
    """Tests for run_cosine_study function."""

    def test_needs_dimension(self):
        with pytest.raises(ValueError):
            run_cosine_study(ExperimentConfig(kind="CosineStudy", dims=[1], trials=1))

    def test_rows(self):
        config = ExperimentConfig(kind="CosineStudy", dims=[5], n_grid=[200, 2000], beta=0.1, trials=5, seed=2)
        rows = run_cosine_study(config)
        assert [r.stat for r in rows] == ["cos_phi", "r_b", "wce_gap"] * 2
        cos = _means(rows, "cos_phi")
        assert np.all(cos <= 1.0)
        assert cos[-1] >= 0.8
        assert all(r.mean >= 0.0 for r in rows if r.stat == "r_b")

    @pytest.mark.slow
    def test_direction_converges(self):
        config = preset_config("fig4", trials=100, seed=7)
        rows = run_cosine_study(config, jobs=4)
        cos = _means(rows, "cos_phi")
        assert cos[-1] >= 0.97
        assert spearman(config.n_grid, cos) >= 0.8


class TestTheoremCampaign:
    """Tests for run_theorem_campaign and summaries."""

    def _config(self):
        return ExperimentConfig(
            kind="TheoremCampaign", trials=100, seed=4,
            budgets=[
                BudgetEntry(family="laplace", beta=0.01, n=10_000),
                BudgetEntry(family="gaussian", gamma=0.3),
            ],
        )

    def test_rejected_budget_becomes_error(self):
        result = run_theorem_campaign(self._config())
        assert len(result.reports) == 1
        assert len(result.errors) == 1
        assert "Vacuous" in result.errors[0].error
        assert not result.all_passed
        stats = [r.stat for r in result.rows]
        assert stats[:3] == ["event_freq", "prob_floor", "passed"]
        assert stats[-1] == "error"

    def test_dispatch_and_summaries(self):
        result = run_experiment(self._config())
        assert isinstance(result, CampaignResult)
        table = summarize_reports(result.reports, result.errors)
        assert "laplace" in table
        assert "Vacuous" in table
        assert "event_freq" in summarize_rows(result.rows)

    def test_write_campaign(self, tmp_path):
        result = run_theorem_campaign(self._config())
        paths = write_campaign(result, tmp_path)
        assert set(paths) == {"results", "config", "reports"}
        assert len(load_result_rows(paths["results"])) == len(result.rows)
        saved = json.loads(paths["config"].read_text(encoding="utf-8"))
        assert saved["kind"] == "TheoremCampaign"
        reports = json.loads(paths["reports"].read_text(encoding="utf-8"))
        assert len(reports["errors"]) == 1

    def test_write_rows_only(self, tmp_path):
        config = ExperimentConfig(kind="Fig1Sweep", n=100, beta=0.1, trials=2, grid_size=3)
        paths = write_campaign(run_experiment(config), tmp_path)
        assert set(paths) == {"results", "config"}

    @pytest.mark.slow
    def test_default_suite_passes(self):
        config = ExperimentConfig(kind="TheoremCampaign", trials=2000, seed=7)
        result = run_theorem_campaign(config, jobs=4)
        assert result.all_passed
        assert [r.mode for r in result.reports] == ["ks", "event", "event", "event"]
