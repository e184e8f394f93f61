"""
Asymptotics of the ERM and subsampling thresholds.

Limit-law samplers for theta_erm / theta_sub, the closed-form bounds of the
Laplace, Gaussian and Fréchet results, small analytic helpers used in their
arguments, and Monte Carlo validators that test the high-probability events
at a finite n.
"""
import logging
import math
from functools import partial
from typing import Callable, List, NamedTuple, Sequence, Tuple, Union

import numpy as np

from .config import (
    DEFAULT_KS_THRESHOLD,
    DEFAULT_SEED,
    DEFAULT_THEOREM_TRIALS,
    LOGGER_NAME,
    WILSON_CONFIDENCE,
)
from .datagen import generate, mu_schedule, subsample_majority, wce_analytic
from .distributions import cdf, evt_constants, sample_limit, tail_function
from .errors import BudgetError, NotSeparableError
from .models import (
    BoundSet,
    DistributionSpec,
    EvtNormalization,
    Family,
    GenRecipe,
    TheoremBudget,
    ValidationReport,
)
from .svm import train_svm_1d
from ..utils.parallel import run_indexed
from ..utils.rng import child_rng
from ..utils.stats import ks_two_sample, levy_distance, wilson_interval

logger = logging.getLogger(f"{LOGGER_NAME}.evt_limits")

MIN_VALIDATION_TRIALS = 100
SHRINK_DRAWS = 100_000
SHRINK_FINAL_TOLERANCE = 1e-3


# Limit laws of the thresholds

def limit_theta_sub(norm_minor: EvtNormalization, rng: np.random.Generator, size=None, asymptotic: bool = False):
    """
    Draw from the limit of theta_sub: a_{beta n} (Z_1 - Z_2) / 2.

    Args:
        norm_minor: Normalization at the minority size beta n
        rng: Random stream
        size: None for a scalar, otherwise the output shape
        asymptotic: Use the textbook constants instead of the exact ones
    """
    a = norm_minor.asymptotic_a_n if asymptotic else norm_minor.a_n
    z1 = sample_limit(norm_minor, rng, size)
    z2 = sample_limit(norm_minor, rng, size)
    return 0.5 * a * (np.asarray(z1) - np.asarray(z2)) if size is not None else 0.5 * a * (z1 - z2)


def limit_theta_erm(
    norm_major: EvtNormalization,
    norm_minor: EvtNormalization,
    rng: np.random.Generator,
    size=None,
    asymptotic: bool = False,
):
    """
    Draw from the limit of theta_erm: (b_{beta n} - b_n + a_{beta n} Z_3 - a_n Z_4) / 2.

    Raises:
        ValueError: If the two normalizations are of different families or
            the minority size exceeds the majority size
    """
    if norm_major.tail_type != norm_minor.tail_type:
        raise ValueError("Majority and minority normalizations must share a tail type")
    if norm_minor.n > norm_major.n:
        raise ValueError(f"Minority size {norm_minor.n} exceeds majority size {norm_major.n}")
    if asymptotic:
        major, minor = norm_major.asymptotic(), norm_minor.asymptotic()
    else:
        major, minor = norm_major, norm_minor
    z3 = np.asarray(sample_limit(minor, rng, size))
    z4 = np.asarray(sample_limit(major, rng, size))
    out = 0.5 * (minor.b_n - major.b_n + minor.a_n * z3 - major.a_n * z4)
    return float(out) if size is None else out


def weibull_difference_scale(spec: DistributionSpec, n: int, beta_n: int) -> float:
    """
    Coefficient (U(n) - U(beta n)) / 2 of the extra ERM term for Weibull-type noise.

    This is the only difference between the ERM and subsampling limits when
    the class-conditionals have a finite right endpoint.
    """
    centered = spec.centered()
    return 0.5 * (float(tail_function(centered, n)) - float(tail_function(centered, beta_n)))


# Analytic helpers

def logistic_diff_cdf(tau: float) -> float:
    """P(|Z_3 - Z_4| <= tau) for independent standard Gumbel Z: 1 - 2 / (1 + e^tau)."""
    if tau < 0:
        raise ValueError(f"tau must be non-negative, got {tau}")
    return float(np.tanh(0.5 * tau))


def gaussian_tail_bounds(t: float) -> Tuple[float, float]:
    """
    Mills-ratio bounds on the standard normal tail P(X >= t).

    Returns:
        (phi(t) (1/t - 1/t^3), phi(t) / t); the lower bound is negative for t < 1
    """
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    density = math.exp(-0.5 * t * t) / math.sqrt(2.0 * math.pi)
    return density * (1.0 / t - 1.0 / t ** 3), density / t


def expx_sandwich(x: Union[float, np.ndarray]):
    """Bounds x (1 - 1/e) <= 1 - e^{-x} <= x, valid on [0, 1]."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(arr > 1):
        raise ValueError(f"x must lie in [0, 1], got {x}")
    lower = arr * (1.0 - math.exp(-1.0))
    if np.ndim(x) == 0:
        return float(lower), float(arr)
    return lower, arr


def exceedance_curve(
    samples_fn: Callable[[np.random.Generator, int], np.ndarray],
    lambdas: Sequence[float],
    epsilon: float = 0.1,
    draws: int = SHRINK_DRAWS,
    seed: int = DEFAULT_SEED,
) -> List[float]:
    """Empirical P(lambda_k |B| >= epsilon) for each lambda_k, fresh draws of B per k."""
    curve = []
    for k, lam in enumerate(lambdas):
        b = np.asarray(samples_fn(child_rng(seed, k), draws), dtype=float)
        curve.append(float(np.mean(lam * np.abs(b) >= epsilon)))
    return curve


def shrink_to_zero_check(
    samples_fn: Callable[[np.random.Generator, int], np.ndarray],
    lambdas: Sequence[float],
    epsilon: float = 0.1,
    draws: int = SHRINK_DRAWS,
    seed: int = DEFAULT_SEED,
    final_tolerance: float = SHRINK_FINAL_TOLERANCE,
) -> bool:
    """
    Monte Carlo check that lambda_n B vanishes in probability along the sequence.

    Passes when the exceedance frequencies strictly decrease until they reach
    zero and the last one is at most final_tolerance.
    """
    if any(lam < 0 for lam in lambdas):
        raise ValueError("lambda_n must be non-negative")
    curve = exceedance_curve(samples_fn, lambdas, epsilon, draws, seed)
    logger.debug(f"exceedance curve: {curve}")
    decreasing = all(later < earlier or later == 0.0 for earlier, later in zip(curve, curve[1:]))
    return bool(decreasing and curve[-1] <= final_tolerance)


def projected_wce_gap(spec: DistributionSpec, mu: float, theta: float, cos_phi: float, r_b: float) -> float:
    """
    Upper bound on wce((w, b)) - wce(theta) when w is at angle phi from mu.

    F(-mu + theta) - F(-mu cos(phi) + theta + r_b) with F the centered
    one-dimensional marginal of the noise.
    """
    marginal = spec.centered()
    return float(cdf(marginal, -mu + theta) - cdf(marginal, -mu * cos_phi + theta + r_b))


# Closed-form bounds

def _prob_floor(budget: TheoremBudget) -> float:
    return 1.0 - 2.0 * budget.epsilon - 2.0 * budget.delta - 3.0 * budget.gamma


def _frechet_floor(budget: TheoremBudget) -> float:
    return 1.0 - 2.0 * (budget.epsilon + budget.delta) - 5.0 * budget.gamma


def _clamped(value: float) -> Tuple[float, bool]:
    if value <= 0:
        return 0.0, True
    return value, False


def bounds_laplace(budget: TheoremBudget) -> BoundSet:
    """Threshold and wce bounds for Laplace class-conditionals with mu_n = log(n / epsilon)."""
    eps, gamma, beta, n = budget.epsilon, budget.gamma, budget.beta, budget.n
    erm_theta, degenerate = _clamped(0.5 * (math.log(1.0 / beta) - math.log(1.0 / gamma)))
    return BoundSet(
        family=Family.LAPLACE,
        erm_theta_lower=erm_theta,
        sub_theta_upper=0.5 * math.log(1.0 / gamma),
        erm_wce_lower=min(1.0, eps * math.sqrt(gamma) / (2.0 * n * math.sqrt(beta))),
        sub_wce_upper=eps / (n * math.sqrt(gamma)),
        prob_floor=_prob_floor(budget),
        degenerate=degenerate,
    )


def bounds_gaussian(budget: TheoremBudget) -> BoundSet:
    """
    Threshold and wce bounds for Gaussian class-conditionals.

    Raises:
        BudgetError: If beta < n^(-3/4), n beta^2 < epsilon, or beta n <= 1
    """
    eps, gamma, beta, n = budget.epsilon, budget.gamma, budget.beta, budget.n
    if beta < n ** -0.75:
        raise BudgetError(f"Gaussian bounds need beta >= n^(-3/4) = {n ** -0.75:.4g}, got {beta}")
    if n * beta * beta < eps:
        raise BudgetError(f"Gaussian wce bounds need n * beta^2 >= epsilon, got {n * beta * beta:.4g} < {eps}")
    if beta * n <= 1:
        raise BudgetError(f"Gaussian bounds need beta * n > 1, got {beta * n}")
    scale = 2.0 * math.sqrt(2.0 * math.log(beta * n))
    erm_theta, degenerate = _clamped(((2.0 / 3.0) * math.log(1.0 / beta) - 2.0 * math.log(1.0 / gamma)) / scale)
    return BoundSet(
        family=Family.GAUSSIAN,
        erm_theta_lower=erm_theta,
        sub_theta_upper=math.log(1.0 / gamma) / scale,
        erm_wce_lower=min(1.0, eps * gamma ** 0.25 / (2.0 * n * beta ** (1.0 / 12.0))),
        sub_wce_upper=2.0 * eps / (gamma * n),
        prob_floor=_prob_floor(budget),
        degenerate=degenerate,
    )


def _root(value: float, alpha: float) -> float:
    """value^(1/alpha) through logs."""
    return math.exp(math.log(value) / alpha) if value > 0 else 0.0


def frechet_theta_bounds(n: int, beta: float, gamma: float, alpha: float) -> Tuple[float, float]:
    """(|theta_erm| lower bound, |theta_sub| upper bound) for two-sided Fréchet noise, unclamped."""
    log_major = math.log(n / math.log(1.0 / gamma)) / alpha
    log_minor = math.log(n * beta / gamma) / alpha
    sub_upper = 0.5 * math.exp(log_minor)
    # 1/2 e^A - 1/2 e^B without forming either term when both are huge
    erm_lower = -0.5 * math.exp(log_major) * math.expm1(log_minor - log_major)
    return erm_lower, sub_upper


def frechet_wce_bounds(n: int, epsilon: float, beta: float, gamma: float, alpha: float) -> Tuple[float, float]:
    """(wce(theta_erm) lower bound, wce(theta_sub) upper bound) for two-sided Fréchet noise."""
    minor_term = 0.5 * _root(2.0 * epsilon * beta / gamma, alpha)
    major_term = 0.5 * _root(2.0 * epsilon / math.log(1.0 / gamma), alpha)
    if minor_term >= 1.0 or 1.0 - major_term + minor_term <= 0.0:
        raise BudgetError(f"Fréchet wce bounds undefined for epsilon={epsilon}, beta={beta}, gamma={gamma}")
    base = epsilon / n
    sub_upper = base / (1.0 - minor_term) ** alpha
    erm_lower = base * (1.0 - math.exp(-1.0)) / (1.0 - major_term + minor_term) ** alpha
    return erm_lower, sub_upper


def bounds_frechet(budget: TheoremBudget) -> BoundSet:
    """
    Threshold and wce bounds for two-sided Fréchet class-conditionals with mu_n = (n / 2 epsilon)^(1/alpha).

    Raises:
        BudgetError: If the probability floor 1 - 2(epsilon + delta) - 5 gamma is not positive
    """
    floor = _frechet_floor(budget)
    if floor <= 0:
        raise BudgetError(f"Fréchet probability floor 1 - 2(epsilon + delta) - 5 gamma = {floor:.4g} is vacuous")
    erm_theta, sub_theta = frechet_theta_bounds(budget.n, budget.beta, budget.gamma, budget.alpha)
    erm_theta, degenerate = _clamped(erm_theta)
    erm_wce, sub_wce = frechet_wce_bounds(budget.n, budget.epsilon, budget.beta, budget.gamma, budget.alpha)
    return BoundSet(
        family=Family.FRECHET,
        erm_theta_lower=erm_theta,
        sub_theta_upper=sub_theta,
        erm_wce_lower=min(1.0, erm_wce),
        sub_wce_upper=sub_wce,
        prob_floor=floor,
        degenerate=degenerate,
    )


BOUNDS = {
    Family.LAPLACE: bounds_laplace,
    Family.GAUSSIAN: bounds_gaussian,
    Family.FRECHET: bounds_frechet,
}


def bounds_for(family: Union[str, Family], budget: TheoremBudget) -> BoundSet:
    """Dispatch to the family's bound calculator."""
    fam = family if isinstance(family, Family) else Family(family)
    if fam not in BOUNDS:
        raise ValueError(f"No closed-form threshold bounds for {fam.value}")
    return BOUNDS[fam](budget)


# Monte Carlo validation

class TrialOutcome(NamedTuple):
    separable: bool
    theta_erm: float
    theta_sub: float
    wce_erm: float
    wce_sub: float


def _theorem_trial(index: int, recipe: GenRecipe, n: int, beta: float, seed: int, with_wce: bool) -> TrialOutcome:
    """One draw: fit both thresholds on the same dataset and its subsample."""
    rng = child_rng(seed, index)
    data = generate(recipe, n, beta, rng)
    balanced = subsample_majority(data, rng)
    try:
        erm = train_svm_1d(data)
        sub = train_svm_1d(balanced)
    except NotSeparableError:
        nan = float("nan")
        return TrialOutcome(False, nan, nan, nan, nan)
    wce_erm = wce_analytic(recipe, erm) if with_wce else float("nan")
    wce_sub = wce_analytic(recipe, sub) if with_wce else float("nan")
    return TrialOutcome(True, erm.theta, sub.theta, wce_erm, wce_sub)


def wilson_verdict(hits: int, trials: int, prob_floor: float, confidence: float = WILSON_CONFIDENCE) -> dict:
    """
    Statistical pass rule for an event frequency against a probability floor.

    slack = freq - wilson_lower; passed iff freq >= prob_floor - slack;
    the run is underpowered when slack > 1 - prob_floor.
    """
    lower, upper = wilson_interval(hits, trials, confidence)
    freq = hits / trials
    slack = freq - lower
    return {
        "empirical_freq": freq,
        "wilson_lower": lower,
        "wilson_upper": upper,
        "wilson_slack": slack,
        "passed": bool(freq >= prob_floor - slack),
        "insufficient_trials": bool(slack > 1.0 - prob_floor),
    }


def _nanmean(values: np.ndarray) -> float:
    finite = values[np.isfinite(values)]
    return float(finite.mean()) if finite.size else float("nan")


def _uniform_shrink_check(recipe: GenRecipe, budget: TheoremBudget, seed: int, threshold: float) -> bool:
    """The extra ERM term (U(k) - U(beta k)) (Z_3 - Z_4) / 2 vanishes along k -> n."""
    sizes = [k for k in (budget.n // 100, budget.n // 10, budget.n) if budget.beta * k >= 2]
    if not sizes:
        return True
    spec = recipe.noise_spec()
    norm = evt_constants(spec, sizes[-1])
    lambdas = [weibull_difference_scale(spec, k, max(2, int(round(budget.beta * k)))) for k in sizes]

    def difference(rng: np.random.Generator, size: int) -> np.ndarray:
        return np.asarray(sample_limit(norm, rng, size)) - np.asarray(sample_limit(norm, rng, size))

    return shrink_to_zero_check(difference, lambdas, epsilon=threshold, seed=seed)


def validate_theorem(
    family: Union[str, Family],
    budget: TheoremBudget,
    trials: int = DEFAULT_THEOREM_TRIALS,
    seed: int = DEFAULT_SEED,
    jobs: int = 1,
    ks_threshold: float = DEFAULT_KS_THRESHOLD,
) -> ValidationReport:
    """
    Test a theorem's high-probability event by Monte Carlo at finite n.

    Each trial draws a dataset with the family's mu_n schedule, fits the
    one-dimensional SVM on it (theta_erm) and on a balanced subsample
    (theta_sub). The event is: separable, |theta_erm| >= erm_theta_lower and
    |theta_sub| <= sub_theta_upper; non-separable draws count as failures.
    Uniform noise has no event; its report compares the {theta_erm} and
    {theta_sub} samples instead (passes on the Lévy distance, also reports KS).

    Args:
        family: Class-conditional family
        budget: Theorem constants
        trials: Monte Carlo trials (>= 100)
        seed: Master seed; trial i uses child stream (seed, i)
        jobs: Worker processes
        ks_threshold: Distance threshold of the uniform comparison

    Returns:
        ValidationReport

    Raises:
        ValueError: If trials < 100
        BudgetError: If the budget violates the family's side conditions
    """
    fam = family if isinstance(family, Family) else Family(family)
    if trials < MIN_VALIDATION_TRIALS:
        raise ValueError(f"validate_theorem needs at least {MIN_VALIDATION_TRIALS} trials, got {trials}")

    bounds = bounds_for(fam, budget) if fam != Family.UNIFORM else None
    mu_n = mu_schedule(fam, budget.n, budget.epsilon, budget.alpha)
    recipe = GenRecipe.for_family(fam, mu_n, dim=1, epsilon=budget.epsilon, alpha=budget.alpha)
    logger.info(
        f"Validating {fam.value}: n={budget.n}, beta={budget.beta}, mu_n={mu_n:.6g}, "
        f"{trials} trials on {jobs} worker(s)"
    )

    trial_fn = partial(
        _theorem_trial, recipe=recipe, n=budget.n, beta=budget.beta, seed=seed, with_wce=bounds is not None
    )
    outcomes = run_indexed(trial_fn, trials, jobs)

    separable = np.array([o.separable for o in outcomes], dtype=bool)
    theta_erm = np.array([o.theta_erm for o in outcomes])
    theta_sub = np.array([o.theta_sub for o in outcomes])
    wce_erm = np.array([o.wce_erm for o in outcomes])
    wce_sub = np.array([o.wce_sub for o in outcomes])
    non_separable = int(trials - separable.sum())

    common = {
        "family": fam,
        "trials": trials,
        "mean_theta_erm": _nanmean(theta_erm),
        "mean_theta_sub": _nanmean(theta_sub),
        "non_separable_count": non_separable,
        "mu_n": mu_n,
        "budget": budget,
        "bounds": bounds,
        "seed": seed,
    }

    if bounds is None:
        prob_floor = _prob_floor(budget)
        hits = int(separable.sum())
        verdict = wilson_verdict(hits, trials, prob_floor)
        if hits == 0:
            raise NotSeparableError("No separable uniform draw; cannot compare threshold distributions")
        ks = ks_two_sample(theta_erm[separable], theta_sub[separable])
        levy = levy_distance(theta_erm[separable], theta_sub[separable])
        shrink = _uniform_shrink_check(recipe, budget, seed, ks_threshold)
        verdict["passed"] = bool(levy <= ks_threshold and shrink)
        logger.info(f"{fam.value}: Lévy {levy:.3g}, KS {ks:.3g} (threshold {ks_threshold}), shrink check {shrink}")
        return ValidationReport(
            mode="ks",
            event_hits=hits,
            prob_floor=prob_floor,
            ks_statistic=ks,
            levy_distance=levy,
            ks_threshold=ks_threshold,
            shrink_check=shrink,
            **verdict,
            **common,
        )

    with np.errstate(invalid="ignore"):
        event = separable & (np.abs(theta_erm) >= bounds.erm_theta_lower) & (np.abs(theta_sub) <= bounds.sub_theta_upper)
        claims = event & (wce_erm >= bounds.erm_wce_lower) & (wce_sub <= bounds.sub_wce_upper)
    hits = int(event.sum())
    verdict = wilson_verdict(hits, trials, bounds.prob_floor)
    if verdict["insufficient_trials"]:
        logger.warning(f"{fam.value}: {trials} trials cannot resolve floor {bounds.prob_floor:.3g}")
    logger.info(
        f"{fam.value}: event frequency {verdict['empirical_freq']:.4f} vs floor {bounds.prob_floor:.3f} "
        f"(slack {verdict['wilson_slack']:.4f}), {non_separable} non-separable, passed={verdict['passed']}"
    )
    return ValidationReport(
        mode="event",
        event_hits=hits,
        prob_floor=bounds.prob_floor,
        mean_wce_erm=_nanmean(wce_erm),
        mean_wce_sub=_nanmean(wce_sub),
        wce_claim_hits=int(claims.sum()),
        wce_claim_freq=float(claims.sum()) / trials,
        **verdict,
        **common,
    )
