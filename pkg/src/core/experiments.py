"""
Experiment campaigns.

Subsampling sweep (error against retained majority size), the classifier x
family x dimension x center grid comparing ERM with subsampling, the cosine
study of the multivariate hard-margin direction, and theorem-validation
campaigns. Every campaign returns ResultRow tables; row order follows the
config order and trial streams are keyed by (cell, trial), so output does not
depend on the worker count.
"""
import logging
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
from tabulate import tabulate

from .config import (
    DEFAULT_FIG1_TRIALS,
    DEFAULT_GRID_TRIALS,
    DEFAULT_TEST_POINTS,
    LOGGER_NAME,
)
from .datagen import (
    EMPIRICAL_CHUNK,
    Dataset,
    average_error_analytic,
    draw_class,
    generate,
    mu_schedule,
    subsample_majority,
    wce_analytic,
)
from .errors import WorstClassError
from .evt_limits import projected_wce_gap, validate_theorem
from .file_manager import save_json, save_result_rows
from .models import (
    BudgetEntry,
    CampaignError,
    ExperimentConfig,
    GenRecipe,
    ResultRow,
    TheoremBudget,
    ValidationReport,
)
from .svm import LinearModel, offset_for_direction, train_hard_svm, train_logistic, train_soft_svm, train_svm_1d
from ..utils.parallel import run_indexed
from ..utils.rng import child_rng
from ..utils.stats import binomial_sigma, mean_std, minority_count

logger = logging.getLogger(f"{LOGGER_NAME}.experiments")


@dataclass
class CampaignResult:
    """Rows of a campaign plus, for theorem campaigns, the reports and rejected budgets."""
    config: ExperimentConfig
    rows: List[ResultRow] = field(default_factory=list)
    reports: List[ValidationReport] = field(default_factory=list)
    errors: List[CampaignError] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(report.passed for report in self.reports) and not self.errors


# Presets

DEFAULT_BUDGETS: List[BudgetEntry] = [
    BudgetEntry(family="uniform", epsilon=0.1, delta=0.1, gamma=0.1, beta=0.1, n=100_000),
    BudgetEntry(family="laplace", epsilon=0.1, delta=0.1, gamma=0.1, beta=0.01, n=1_000_000),
    BudgetEntry(family="gaussian", epsilon=0.1, delta=0.1, gamma=0.1, beta=0.05, n=1_000_000),
    BudgetEntry(family="frechet", epsilon=0.1, delta=0.1, gamma=0.1, beta=0.01, n=1_000_000, alpha=2.0),
]


def preset_config(target: str, **overrides) -> ExperimentConfig:
    """
    Configuration reproducing one figure at desk scale.

    Args:
        target: fig1, fig3 or fig4
        **overrides: Field values replacing the preset's

    Raises:
        ValueError: If the target is unknown
    """
    if target == "fig1":
        base = dict(
            kind="Fig1Sweep", families=["gaussian"], classifiers=["hard-svm"], dims=[1],
            n=1000, beta=0.05, trials=DEFAULT_FIG1_TRIALS,
        )
    elif target == "fig3":
        base = dict(
            kind="Fig3Grid", families=["uniform", "gaussian", "laplace", "frechet"],
            classifiers=["hard-svm", "soft-svm", "logistic"], dims=[1, 10], mus=[1.0, 3.0],
            n=500, beta=0.1, trials=DEFAULT_GRID_TRIALS, test_points=DEFAULT_TEST_POINTS,
        )
    elif target == "fig4":
        base = dict(
            kind="CosineStudy", families=["gaussian"], classifiers=["hard-svm"], dims=[10],
            n_grid=[100, 300, 1000, 3000, 10_000], beta=0.1, trials=DEFAULT_GRID_TRIALS,
        )
    else:
        raise ValueError(f"Unknown preset: {target}")
    base.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**base)


# Shared helpers

def fit_classifier(classifier: str, data: Dataset, config: ExperimentConfig) -> LinearModel:
    """
    Train one of the campaign classifiers.

    Hard SVM on one-dimensional data uses the closed form; a non-separable
    hard-SVM draw is refit as a soft SVM at hard_c when hard_fallback_soft is set.
    """
    if classifier == "hard-svm":
        try:
            if data.dim == 1:
                return train_svm_1d(data)
            return train_hard_svm(data, c=config.hard_c)
        except WorstClassError:
            if not config.hard_fallback_soft:
                raise
            return train_soft_svm(data, c=config.hard_c)
    if classifier == "soft-svm":
        return train_soft_svm(data, c=config.soft_c)
    if classifier == "logistic":
        return train_logistic(data, steps=config.logistic_steps, step_size=config.logistic_step_size)
    raise ValueError(f"Unknown classifier: {classifier}")


def paired_wce_empirical(
    recipe: GenRecipe,
    models: Tuple[LinearModel, ...],
    m: int,
    rng: np.random.Generator,
) -> List[float]:
    """Worst-class errors of several models on one shared test set of m points per class."""
    wrong = np.zeros((len(models), 2))
    for column, label in enumerate((+1, -1)):
        remaining = m
        while remaining > 0:
            chunk = min(remaining, EMPIRICAL_CHUNK)
            X = draw_class(recipe, label, chunk, rng)
            for row, model in enumerate(models):
                wrong[row, column] += np.sum(model.predict(X) != label)
            remaining -= chunk
    return [float(np.max(counts) / m) for counts in wrong]


def _row(base: Dict, stat: str, values: np.ndarray, attempted: int) -> ResultRow:
    finite = values[np.isfinite(values)]
    mean, std = mean_std(finite)
    return ResultRow(stat=stat, mean=mean, std=std, trials=int(finite.size), failures=attempted - int(finite.size), **base)


def fig1_sizes(n: int, beta: float, grid_size: int) -> List[int]:
    """Log-spaced retained majority sizes from the minority count up to n."""
    n_minor = minority_count(n, beta)
    grid = np.unique(np.rint(np.geomspace(n_minor, n, grid_size)).astype(int))
    return [int(s) for s in grid]


# Figure 1: subsampling sweep

def _fig1_trial(index: int, recipe: GenRecipe, config: ExperimentConfig, sizes: List[int], cell: int) -> np.ndarray:
    rng = child_rng(config.seed, cell, index)
    data = generate(recipe, config.n, config.beta, rng)
    out = np.full((len(sizes), 2), np.nan)
    for k, size in enumerate(sizes):
        kept = subsample_majority(data, rng, size)
        try:
            model = fit_classifier(config.classifiers[0], kept, config)
        except WorstClassError as e:
            logger.debug(f"fig1 trial {index}, size {size}: {e}")
            continue
        out[k, 0] = wce_analytic(recipe, model)
        out[k, 1] = average_error_analytic(recipe, model, config.beta)
    return out


def run_fig1_sweep(config: ExperimentConfig, jobs: int = 1) -> List[ResultRow]:
    """
    Worst-class and average error against the retained majority size.

    For each family, each trial draws one dataset with the mu_n schedule and
    subsamples its majority to every grid size; the classifier is refit on each
    subsample and scored analytically. Rows carry the retained size in n and
    the effective ratio in beta.
    """
    rows: List[ResultRow] = []
    sizes = fig1_sizes(config.n, config.beta, config.grid_size)
    n_minor = minority_count(config.n, config.beta)
    for cell, family in enumerate(config.families):
        mu_n = mu_schedule(family, config.n, config.epsilon, config.alpha)
        recipe = GenRecipe.for_family(family, mu_n, dim=1, epsilon=config.epsilon, alpha=config.alpha)
        logger.info(f"Fig1 sweep {family.value}: mu_n={mu_n:.6g}, sizes={sizes}, {config.trials} trials")
        trial_fn = partial(_fig1_trial, recipe=recipe, config=config, sizes=sizes, cell=cell)
        results = np.stack(run_indexed(trial_fn, config.trials, jobs))
        for k, size in enumerate(sizes):
            base = dict(
                kind=config.kind, family=family.value, classifier=config.classifiers[0], dim=1,
                mu=mu_n, n=size, beta=n_minor / size,
            )
            rows.append(_row(base, "wce", results[:, k, 0], config.trials))
            rows.append(_row(base, "avg_err", results[:, k, 1], config.trials))
    return rows


# Figure 3: classifier x family x dim x mu grid

def _fig3_trial(index: int, recipe: GenRecipe, classifier: str, config: ExperimentConfig, cell: int) -> Tuple[float, float]:
    rng = child_rng(config.seed, cell, index)
    data = generate(recipe, config.n, config.beta, rng)
    balanced = subsample_majority(data, rng)
    try:
        erm = fit_classifier(classifier, data, config)
        sub = fit_classifier(classifier, balanced, config)
    except WorstClassError as e:
        logger.debug(f"cell {cell} trial {index}: {e}")
        return float("nan"), float("nan")
    if config.wce_mode == "analytic":
        return wce_analytic(recipe, erm), wce_analytic(recipe, sub)
    wce_erm, wce_sub = paired_wce_empirical(recipe, (erm, sub), config.test_points, rng)
    return wce_erm, wce_sub


def run_fig3_grid(config: ExperimentConfig, jobs: int = 1) -> List[ResultRow]:
    """
    Mean and spread of delta = wce(ERM) - wce(SUB) over a grid of cells.

    mu is a fixed class center here (no schedule). ERM and SUB in a trial
    share the dataset (SUB fits its balanced subsample) and the test set.
    Cells whose fits fail report NaN statistics with the failure count.

    Raises:
        ValueError: If analytic wce is requested for non-Gaussian noise with d > 1
    """
    if config.wce_mode == "analytic" and any(d > 1 for d in config.dims):
        non_gaussian = [f.value for f in config.families if f.value != "gaussian"]
        if non_gaussian:
            raise ValueError(f"Analytic wce for d > 1 only covers Gaussian noise, not {', '.join(non_gaussian)}")
    rows: List[ResultRow] = []
    mus = config.mus or [1.0, 3.0]
    cell = 0
    for classifier in config.classifiers:
        for family in config.families:
            for dim in config.dims:
                for mu in mus:
                    recipe = GenRecipe.for_family(family, mu, dim=dim, alpha=config.alpha)
                    trial_fn = partial(_fig3_trial, recipe=recipe, classifier=classifier, config=config, cell=cell)
                    pairs = np.array(run_indexed(trial_fn, config.trials, jobs), dtype=float)
                    wce_erm, wce_sub = pairs[:, 0], pairs[:, 1]
                    base = dict(
                        kind=config.kind, family=family.value, classifier=classifier, dim=dim,
                        mu=mu, n=config.n, beta=config.beta,
                    )
                    rows.append(_row(base, "wce_erm", wce_erm, config.trials))
                    rows.append(_row(base, "wce_sub", wce_sub, config.trials))
                    rows.append(_row(base, "delta", wce_erm - wce_sub, config.trials))
                    failures = int(np.sum(~np.isfinite(wce_erm)))
                    if failures:
                        logger.warning(f"{classifier}/{family.value}/d={dim}/mu={mu}: {failures} of {config.trials} trials failed")
                    else:
                        logger.info(f"{classifier}/{family.value}/d={dim}/mu={mu}: mean delta {rows[-1].mean:.4g}")
                    cell += 1
    return rows


# Figure 4: cosine study

def _cosine_trial(index: int, recipe: GenRecipe, n: int, config: ExperimentConfig, cell: int) -> Tuple[float, float, float]:
    rng = child_rng(config.seed, cell, index)
    data = generate(recipe, n, config.beta, rng)
    try:
        model = fit_classifier("hard-svm", data, config)
    except WorstClassError as e:
        logger.debug(f"cosine n={n} trial {index}: {e}")
        return float("nan"), float("nan"), float("nan")
    unit = model.normalized()
    cos_phi = float(unit.w[0])
    axis = np.zeros(recipe.dim)
    axis[0] = 1.0
    try:
        b_axis = offset_for_direction(data, axis)
    except WorstClassError:
        return cos_phi, float("nan"), float("nan")
    r_b = abs(unit.b - b_axis)
    gap = projected_wce_gap(recipe.noise_spec(), recipe.mu_n, -b_axis, cos_phi, r_b)
    return cos_phi, r_b, gap


def run_cosine_study(config: ExperimentConfig, jobs: int = 1) -> List[ResultRow]:
    """
    Alignment of the hard-margin direction with the class-mean direction.

    Per majority size n (mu_n from the Gaussian schedule), records cos(phi)
    between w/||w|| and e_1, the offset discrepancy r_b = |b(w) - b(e_1)| and
    the resulting bound on the projected wce gap.

    Raises:
        ValueError: If a configured dimension is 1
    """
    rows: List[ResultRow] = []
    n_grid = config.n_grid or [config.n]
    cell = 0
    for family in config.families:
        for dim in config.dims:
            if dim < 2:
                raise ValueError(f"Cosine study needs d > 1, got d={dim}")
            for n in n_grid:
                mu_n = mu_schedule(family, n, config.epsilon, config.alpha)
                recipe = GenRecipe.for_family(family, mu_n, dim=dim, epsilon=config.epsilon, alpha=config.alpha)
                trial_fn = partial(_cosine_trial, recipe=recipe, n=n, config=config, cell=cell)
                values = np.array(run_indexed(trial_fn, config.trials, jobs), dtype=float)
                base = dict(
                    kind=config.kind, family=family.value, classifier="hard-svm", dim=dim,
                    mu=mu_n, n=n, beta=config.beta,
                )
                rows.append(_row(base, "cos_phi", values[:, 0], config.trials))
                rows.append(_row(base, "r_b", values[:, 1], config.trials))
                rows.append(_row(base, "wce_gap", values[:, 2], config.trials))
                logger.info(f"cosine {family.value} d={dim} n={n}: mean cos phi {rows[-3].mean:.4f}")
                cell += 1
    return rows


# Theorem campaigns

def _report_rows(report: ValidationReport, kind: str) -> List[ResultRow]:
    budget = report.budget
    base = dict(kind=kind, family=report.family.value, classifier="hard-svm", dim=1, mu=report.mu_n, n=budget.n, beta=budget.beta)
    failures = report.non_separable_count
    rows = [
        ResultRow(stat="event_freq", mean=report.empirical_freq, std=binomial_sigma(report.empirical_freq, report.trials),
                  trials=report.trials, failures=failures, **base),
        ResultRow(stat="prob_floor", mean=report.prob_floor, std=0.0, trials=report.trials, failures=failures, **base),
        ResultRow(stat="passed", mean=float(report.passed), std=0.0, trials=report.trials, failures=failures, **base),
    ]
    if report.mode == "ks":
        rows.append(ResultRow(stat="levy", mean=report.levy_distance, std=0.0, trials=report.trials, failures=failures, **base))
        rows.append(ResultRow(stat="ks", mean=report.ks_statistic, std=0.0, trials=report.trials, failures=failures, **base))
    else:
        rows.append(ResultRow(stat="wce_erm", mean=report.mean_wce_erm, std=float("nan"), trials=report.trials - failures,
                              failures=failures, **base))
        rows.append(ResultRow(stat="wce_sub", mean=report.mean_wce_sub, std=float("nan"), trials=report.trials - failures,
                              failures=failures, **base))
    return rows


def run_theorem_campaign(config: ExperimentConfig, jobs: int = 1) -> CampaignResult:
    """
    Validate every configured budget; a rejected budget becomes an error entry and the campaign continues.

    Uses DEFAULT_BUDGETS when the config lists none.
    """
    result = CampaignResult(config=config)
    entries = config.budgets or DEFAULT_BUDGETS
    for entry in entries:
        try:
            budget = TheoremBudget(
                epsilon=entry.epsilon, delta=entry.delta, gamma=entry.gamma,
                beta=entry.beta, n=entry.n, alpha=entry.alpha,
            )
            report = validate_theorem(entry.family, budget, config.trials, config.seed, jobs, config.ks_threshold)
        except (ValueError, WorstClassError) as e:
            logger.warning(f"Budget {entry.model_dump()} rejected: {e}")
            result.errors.append(CampaignError(family=entry.family, entry=entry, error=str(e)))
            result.rows.append(ResultRow(
                kind=config.kind, family=entry.family.value, classifier="hard-svm", dim=1, mu=float("nan"),
                n=entry.n, beta=entry.beta, stat="error", mean=float("nan"), std=float("nan"), trials=0, failures=1,
            ))
            continue
        result.reports.append(report)
        result.rows.extend(_report_rows(report, config.kind))
    return result


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> CampaignResult:
    """Dispatch a configuration to its campaign."""
    logger.info(f"Running {config.kind} (seed={config.seed}, jobs={jobs})")
    if config.kind == "TheoremCampaign":
        return run_theorem_campaign(config, jobs)
    runners = {
        "Fig1Sweep": run_fig1_sweep,
        "Fig3Grid": run_fig3_grid,
        "CosineStudy": run_cosine_study,
    }
    return CampaignResult(config=config, rows=runners[config.kind](config, jobs))


# Summaries

def summarize_reports(reports: List[ValidationReport], errors: Optional[List[CampaignError]] = None) -> str:
    """Pass/fail table of validation reports."""
    table = []
    for report in reports:
        statistic = report.levy_distance if report.mode == "ks" else report.empirical_freq
        table.append([
            report.family.value, report.mode, report.budget.n, report.budget.beta, report.trials,
            f"{statistic:.4f}", f"{report.prob_floor:.3f}", f"{report.wilson_slack:.4f}",
            report.non_separable_count, "PASS" if report.passed else "FAIL",
        ])
    for error in errors or []:
        table.append([error.family.value, "error", error.entry.n, error.entry.beta, 0, "-", "-", "-", "-", error.error])
    headers = ["family", "mode", "n", "beta", "trials", "statistic", "floor", "slack", "non-sep", "result"]
    return tabulate(table, headers=headers, tablefmt="github")


def summarize_rows(rows: List[ResultRow]) -> str:
    """Compact table of result rows (one line per row)."""
    table = [
        [r.kind, r.family, r.classifier, r.dim, f"{r.mu:.4g}", r.n, f"{r.beta:.4g}", r.stat,
         f"{r.mean:.6g}", f"{r.std:.3g}", r.trials, r.failures]
        for r in rows
    ]
    headers = ["kind", "family", "classifier", "dim", "mu", "n", "beta", "stat", "mean", "std", "trials", "failures"]
    return tabulate(table, headers=headers, tablefmt="github")


def summarize_runs(runs: Dict[str, List[str]]) -> str:
    """Table of run directories, one line per run, newest date first."""
    table = [[date, name] for date, names in runs.items() for name in names]
    return tabulate(table, headers=["date", "run"], tablefmt="github")


def write_campaign(result: CampaignResult, out_dir: Path) -> Dict[str, Path]:
    """Persist rows (CSV), resolved config (JSON sidecar) and any reports."""
    paths = {
        "results": save_result_rows(result.rows, out_dir / "results.csv"),
        "config": save_json(result.config.model_dump(mode="json"), out_dir / "config.json"),
    }
    if result.reports or result.errors:
        payload = {
            "reports": [r.model_dump(mode="json") for r in result.reports],
            "errors": [e.model_dump(mode="json") for e in result.errors],
        }
        paths["reports"] = save_json(payload, out_dir / "reports.json")
    return paths
