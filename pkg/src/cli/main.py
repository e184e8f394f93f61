"""
Command-line front end.

Grammar:
    simulate [--config FILE] [campaign flags]
    validate <family> [--epsilon E] [--delta D] [--gamma G] [--beta B] [--n N]
             [--alpha A] [--trials T] [--ks-threshold K]
    reproduce <fig1|fig3|fig4> [campaign flags]
    inspect [results.csv]

Every subcommand accepts --seed, --jobs, --out, --log-level and --log-dir.
Exit codes: 0 success, 1 validation failed, 2 usage error, 3 runtime error.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from pydantic import ValidationError

from .logging_config import setup_cli_logging
from ..core.config import (
    CLASSIFIERS,
    DEFAULT_SEED,
    DEFAULT_THEOREM_TRIALS,
    LOGGER_NAME,
    REPRODUCE_TARGETS,
    RESULTS_DIR,
    default_jobs,
    env_seed,
)
from ..core.errors import BudgetError
from ..core.evt_limits import bounds_for
from ..core.experiments import (
    DEFAULT_BUDGETS,
    CampaignResult,
    preset_config,
    run_experiment,
    summarize_reports,
    summarize_rows,
    summarize_runs,
    write_campaign,
)
from ..core.file_manager import list_runs, load_json, load_result_rows, prepare_output_dir, save_json
from ..core.models import BudgetEntry, ExperimentConfig, Family, TheoremBudget
from ..utils.family import normalize_family, normalize_target, parse_family_list

logger = logging.getLogger(f"{LOGGER_NAME}.cli")

EXIT_OK = 0
EXIT_VALIDATION_FAILED = 1
EXIT_USAGE = 2
EXIT_RUNTIME = 3


class UsageError(Exception):
    """Arguments parsed but describe an invalid run."""


class _Reported(Exception):
    """Runtime failure whose error record has already been persisted."""

    def __init__(self, record: Dict[str, str]):
        super().__init__(record["message"])
        self.record = record


def _int_list(value: str) -> List[int]:
    return [int(v) for v in value.split(",") if v.strip()]


def _float_list(value: str) -> List[float]:
    return [float(v) for v in value.split(",") if v.strip()]


def _family_list(value: str) -> List[str]:
    return list(parse_family_list(value))


def _classifier_list(value: str) -> List[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="Master seed (default: $IMB_SEED, then 0)")
    common.add_argument("--jobs", type=int, default=None, help="Worker processes (default: $IMB_JOBS, then CPU count)")
    common.add_argument("--out", type=Path, default=None, help="Output directory (default: data/results/<date>/<kind>_<time>)")
    common.add_argument(
        "--log-level",
        type=str,
        default="info",
        choices=["critical", "error", "warning", "info", "debug"],
        help="Console log level (default: info)",
    )
    common.add_argument("--log-dir", type=Path, default=None, help="Log directory (default: data/logs/cli)")
    return common


def _add_campaign_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--family", dest="families", type=_family_list, default=None,
                        help="Comma-separated families (uniform, gaussian, laplace, frechet)")
    parser.add_argument("--classifier", dest="classifiers", type=_classifier_list, default=None,
                        help=f"Comma-separated classifiers ({', '.join(CLASSIFIERS)})")
    parser.add_argument("--dims", type=_int_list, default=None, help="Comma-separated dimensions")
    parser.add_argument("--mus", type=_float_list, default=None, help="Comma-separated class centers (grid)")
    parser.add_argument("--n", type=int, default=None, help="Majority size")
    parser.add_argument("--n-grid", dest="n_grid", type=_int_list, default=None, help="Comma-separated majority sizes")
    parser.add_argument("--beta", type=float, default=None, help="Imbalance ratio")
    parser.add_argument("--epsilon", type=float, default=None, help="Separability budget of the mu schedule")
    parser.add_argument("--alpha", type=float, default=None, help="Fréchet shape")
    parser.add_argument("--trials", type=int, default=None, help="Monte Carlo trials")
    parser.add_argument("--test-points", dest="test_points", type=int, default=None, help="Test points per class")
    parser.add_argument("--grid-size", dest="grid_size", type=int, default=None, help="Subsampling sweep points")
    parser.add_argument("--wce-mode", dest="wce_mode", choices=["empirical", "analytic"], default=None)
    parser.add_argument("--hard-fallback-soft", dest="hard_fallback_soft", action="store_true", default=None,
                        help="Refit non-separable hard-SVM draws as soft SVM at the hard-margin C")


CAMPAIGN_FIELDS = (
    "families", "classifiers", "dims", "mus", "n", "n_grid", "beta", "epsilon", "alpha",
    "trials", "test_points", "grid_size", "wce_mode", "hard_fallback_soft",
)


def build_parser() -> argparse.ArgumentParser:
    """Argument parser of the four subcommands."""
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="worst-class-evt",
        description="Worst-class error of hard-margin SVMs under class imbalance",
    )
    sub = parser.add_subparsers(dest="command", metavar="{simulate,validate,reproduce,inspect}")
    sub.required = True

    simulate = sub.add_parser("simulate", parents=[common], help="Run a campaign from a JSON config and/or flags")
    simulate.add_argument("--config", type=Path, default=None, help="ExperimentConfig JSON file")
    simulate.add_argument("--kind", choices=["Fig1Sweep", "Fig3Grid", "CosineStudy", "TheoremCampaign"], default=None)
    _add_campaign_flags(simulate)

    validate = sub.add_parser("validate", parents=[common], help="Monte Carlo check of a theorem budget")
    validate.add_argument("family", type=normalize_family, help="uniform, gaussian, laplace or frechet")
    validate.add_argument("--epsilon", type=float, default=0.1)
    validate.add_argument("--delta", type=float, default=0.1)
    validate.add_argument("--gamma", type=float, default=0.1)
    validate.add_argument("--beta", type=float, default=None, help="Imbalance ratio (default: family preset)")
    validate.add_argument("--n", type=int, default=None, help="Majority size (default: family preset)")
    validate.add_argument("--alpha", type=float, default=None, help="Fréchet shape (default: 2)")
    validate.add_argument("--trials", type=int, default=DEFAULT_THEOREM_TRIALS)
    validate.add_argument("--ks-threshold", dest="ks_threshold", type=float, default=None)

    reproduce = sub.add_parser("reproduce", parents=[common], help="Run a figure preset")
    reproduce.add_argument("target", type=normalize_target, help=f"One of {', '.join(REPRODUCE_TARGETS)}")
    _add_campaign_flags(reproduce)

    inspect = sub.add_parser("inspect", parents=[common], help="Summarize a results CSV, or list past runs")
    inspect.add_argument("csv", type=Path, nargs="?", default=None,
                         help="results.csv written by a campaign (omit to list runs under --out or data/results)")

    return parser


def resolve_seed(flag: Optional[int], file_value: Optional[int] = None) -> int:
    """Seed precedence: flag, config file, IMB_SEED, DEFAULT_SEED."""
    if flag is not None:
        return flag
    if file_value is not None:
        return file_value
    fallback = env_seed()
    return DEFAULT_SEED if fallback is None else fallback


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    return {name: getattr(args, name) for name in CAMPAIGN_FIELDS if getattr(args, name, None) is not None}


def config_for_simulate(args: argparse.Namespace) -> ExperimentConfig:
    """
    Merge the JSON config file (if any) with flag overrides.

    Raises:
        UsageError: If neither a config file nor --kind is given, or the file is missing
        ValidationError: If the merged values violate the config schema
    """
    values: Dict[str, Any] = {}
    if args.config is not None:
        loaded = load_json(args.config)
        if loaded is None:
            raise UsageError(f"Config file not found: {args.config}")
        if not isinstance(loaded, dict):
            raise UsageError(f"Config file must hold a JSON object: {args.config}")
        values.update(loaded)
    if args.kind is not None:
        values["kind"] = args.kind
    if "kind" not in values:
        raise UsageError("simulate needs --config FILE or --kind")
    values.update(_overrides(args))
    values["seed"] = resolve_seed(args.seed, values.get("seed"))
    if args.out is not None:
        values["output"] = str(args.out)
    return ExperimentConfig.model_validate(values)


def config_for_validate(args: argparse.Namespace) -> ExperimentConfig:
    """
    Single-budget theorem campaign; beta / n default to the family's preset budget.

    Raises:
        ValidationError: If the budget is malformed or vacuous
        BudgetError: If it violates the family's side conditions
    """
    family = Family(args.family)
    preset = next(entry for entry in DEFAULT_BUDGETS if entry.family == family)
    entry = BudgetEntry(
        family=family,
        epsilon=args.epsilon,
        delta=args.delta,
        gamma=args.gamma,
        beta=preset.beta if args.beta is None else args.beta,
        n=preset.n if args.n is None else args.n,
        alpha=preset.alpha if args.alpha is None else args.alpha,
    )
    budget = TheoremBudget(**entry.model_dump(exclude={"family"}))
    if family != Family.UNIFORM:
        bounds_for(family, budget)
    values: Dict[str, Any] = dict(
        kind="TheoremCampaign",
        families=[family],
        budgets=[entry],
        trials=args.trials,
        alpha=entry.alpha,
        seed=resolve_seed(args.seed),
    )
    if args.ks_threshold is not None:
        values["ks_threshold"] = args.ks_threshold
    if args.out is not None:
        values["output"] = str(args.out)
    return ExperimentConfig(**values)


def config_for_reproduce(args: argparse.Namespace) -> ExperimentConfig:
    """Figure preset with flag overrides."""
    overrides = _overrides(args)
    overrides["seed"] = resolve_seed(args.seed)
    if args.out is not None:
        overrides["output"] = str(args.out)
    return preset_config(args.target, **overrides)


def _exit_code(result: CampaignResult) -> int:
    if result.config.kind == "TheoremCampaign" and not result.all_passed:
        return EXIT_VALIDATION_FAILED
    return EXIT_OK


def run_campaign(config: ExperimentConfig, jobs: int, out: Optional[Path]) -> int:
    """Run a resolved config, persist it and print its summary."""
    out_dir = prepare_output_dir(out, label=config.kind)
    try:
        result = run_experiment(config, jobs)
    except Exception as e:
        record = _error_record(e, config.kind)
        save_json(record, out_dir / "error.json")
        raise _Reported(record) from e

    paths = write_campaign(result, out_dir)
    if result.reports or result.errors:
        print(summarize_reports(result.reports, result.errors))
    else:
        print(summarize_rows(result.rows))
    logger.info(f"Wrote {', '.join(str(p) for p in paths.values())}")
    return _exit_code(result)


def _error_record(error: BaseException, command: str) -> Dict[str, str]:
    return {"command": command, "error": type(error).__name__, "message": str(error)}


def inspect_results(path: Path) -> int:
    """Print the rows of a results CSV as a table."""
    rows = load_result_rows(path)
    print(summarize_rows(rows))
    logger.info(f"{len(rows)} rows in {path}")
    return EXIT_OK


def inspect_runs(results_dir: Path) -> int:
    """Print the run directories under results_dir, newest first."""
    runs = list_runs(results_dir)
    if not runs:
        print(f"No runs under {results_dir}")
        return EXIT_OK
    print(summarize_runs(runs))
    logger.info(f"{sum(len(names) for names in runs.values())} runs in {results_dir}")
    return EXIT_OK


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "inspect":
        if args.csv is None:
            return inspect_runs(args.out or RESULTS_DIR)
        return inspect_results(args.csv)

    try:
        env_seed()
        jobs = args.jobs if args.jobs is not None else default_jobs()
    except ValueError as e:
        raise UsageError(str(e)) from e
    if jobs < 1:
        raise UsageError(f"--jobs must be at least 1, got {jobs}")

    if args.command == "simulate":
        config = config_for_simulate(args)
    elif args.command == "validate":
        config = config_for_validate(args)
    else:
        config = config_for_reproduce(args)
    return run_campaign(config, jobs, args.out)


def parse_and_dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse argv, run the matching subcommand and map the outcome to an exit code.

    Args:
        argv: Arguments without the program name (default: sys.argv[1:])

    Returns:
        0 success, 1 validation failed, 2 usage error, 3 runtime error
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    setup_cli_logging(args.log_level, args.log_dir)
    try:
        return _dispatch(args)
    except (UsageError, ValidationError, BudgetError) as e:
        parser.print_usage(sys.stderr)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except _Reported as e:
        logger.error(f"{args.command} failed: {e}")
        print(json.dumps(e.record), file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as e:
        logger.error(f"{args.command} failed: {e}", exc_info=True)
        print(json.dumps(_error_record(e, args.command)), file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(parse_and_dispatch())


if __name__ == "__main__":
    main()
