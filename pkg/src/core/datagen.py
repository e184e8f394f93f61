"""
Imbalanced data generation and worst-class error metrics.

Data follow X = Y * mu_n * e_1 + xi with symmetric noise xi: the n majority
points are positives, the beta * n minority points negatives. For d = 1 this
is D(+mu_n) against D(-mu_n); for d > 1 the noise coordinates are i.i.d.
draws of the family (spherical for the Gaussian).
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple, Union

import numpy as np
from scipy import optimize

from .config import DEFAULT_FRECHET_ALPHA, LOGGER_NAME
from .distributions import cdf, sample
from .models import Family, GenRecipe
from .svm import LinearModel
from ..utils.stats import as_ratio, minority_count

logger = logging.getLogger(f"{LOGGER_NAME}.datagen")

GAUSSIAN_RESIDUAL_TOL = 1e-12
EMPIRICAL_CHUNK = 250_000


@dataclass(frozen=True)
class Dataset:
    """
    Labeled training sample, positives (majority) first.

    Attributes:
        X: Inputs, shape (N, d)
        y: Labels in {-1.0, +1.0}, shape (N,)
        n_major: Number of positives
        beta: Exact imbalance ratio (negatives / positives)
    """
    X: np.ndarray
    y: np.ndarray
    n_major: int
    beta: Fraction

    def __post_init__(self):
        if self.X.ndim != 2 or self.X.shape[0] != self.y.shape[0]:
            raise ValueError(f"X must be (N, d) matching y, got {self.X.shape} and {self.y.shape}")
        if int(np.sum(self.y > 0)) != self.n_major:
            raise ValueError(f"Expected {self.n_major} positives, found {int(np.sum(self.y > 0))}")
        if Fraction(self.n_minor, self.n_major) != self.beta:
            raise ValueError(f"beta={self.beta} does not match counts {self.n_minor}/{self.n_major}")

    @property
    def dim(self) -> int:
        return int(self.X.shape[1])

    @property
    def n_minor(self) -> int:
        return int(np.sum(self.y < 0))

    @property
    def positives(self) -> np.ndarray:
        return self.X[self.y > 0]

    @property
    def negatives(self) -> np.ndarray:
        return self.X[self.y < 0]

    @classmethod
    def from_classes(cls, positives: np.ndarray, negatives: np.ndarray) -> "Dataset":
        """Build a dataset from per-class input arrays (1-D arrays mean d = 1)."""
        pos = np.asarray(positives, dtype=float)
        neg = np.asarray(negatives, dtype=float)
        if pos.ndim == 1:
            pos = pos[:, None]
        if neg.ndim == 1:
            neg = neg[:, None]
        if pos.shape[0] == 0:
            raise ValueError("A dataset needs at least one positive example")
        X = np.vstack([pos, neg])
        y = np.concatenate([np.ones(pos.shape[0]), -np.ones(neg.shape[0])])
        return cls(X=X, y=y, n_major=pos.shape[0], beta=Fraction(neg.shape[0], pos.shape[0]))


def _gaussian_gap(mu: float, target: float) -> float:
    return math.exp(-0.5 * mu * mu) / (math.sqrt(2.0 * math.pi) * mu) - target


def mu_schedule(
    family: Union[str, Family],
    n: int,
    epsilon: float,
    alpha: float = DEFAULT_FRECHET_ALPHA,
) -> float:
    """
    Class-center magnitude that keeps a draw of n points separable w.p. about 1 - 2 epsilon.

    Uniform 1/2; Laplace log(n / epsilon); Fréchet (n / 2 epsilon)^(1/alpha);
    Gaussian the root mu > 1 of exp(-mu^2/2) / (sqrt(2 pi) mu) = epsilon / n.

    Raises:
        ValueError: If n < 2, epsilon is outside (0, 1), or the Gaussian
            bracket does not contain a root
    """
    fam = family if isinstance(family, Family) else Family(family)
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")

    if fam == Family.UNIFORM:
        return 0.5
    if fam == Family.LAPLACE:
        return math.log(n / epsilon)
    if fam == Family.FRECHET:
        if alpha <= 0:
            raise ValueError(f"alpha must be positive, got {alpha}")
        return (n / (2.0 * epsilon)) ** (1.0 / alpha)

    target = epsilon / n
    lo, hi = 1.0, math.sqrt(2.0 * math.log(n / epsilon)) + 2.0
    if not (_gaussian_gap(lo, target) > 0 > _gaussian_gap(hi, target)):
        raise ValueError(f"Gaussian schedule has no root in [{lo}, {hi:.6g}] for n={n}, epsilon={epsilon}")
    root = optimize.bisect(_gaussian_gap, lo, hi, args=(target,), xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    residual = abs(_gaussian_gap(root, target))
    if residual > GAUSSIAN_RESIDUAL_TOL:
        raise ValueError(f"Gaussian schedule residual {residual:.3e} exceeds {GAUSSIAN_RESIDUAL_TOL}")
    return float(root)


def draw_class(recipe: GenRecipe, label: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw count inputs of class label (+1 or -1), shape (count, d)."""
    noise = sample(recipe.noise_spec(), rng, count * recipe.dim).reshape(count, recipe.dim)
    noise[:, 0] += label * recipe.mu_n
    return noise


def generate(
    recipe: GenRecipe,
    n: int,
    beta: Union[float, Fraction],
    rng: np.random.Generator,
) -> Dataset:
    """
    Draw n majority positives and beta * n minority negatives.

    Args:
        recipe: Generative recipe
        n: Majority count (>= 1)
        beta: Imbalance ratio; beta * n must be an integer
        rng: Random stream (positives drawn first)

    Returns:
        Dataset with positives first

    Raises:
        ValueError: If beta * n is not a positive integer
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    n_minor = minority_count(n, as_ratio(beta))
    positives = draw_class(recipe, +1, n, rng)
    negatives = draw_class(recipe, -1, n_minor, rng)
    return Dataset.from_classes(positives, negatives)


def subsample_majority(data: Dataset, rng: np.random.Generator, size: Optional[int] = None) -> Dataset:
    """
    Keep a uniform subset of the positives, without replacement.

    Args:
        data: Source dataset
        rng: Random stream
        size: Positives to keep; defaults to the minority count (balanced result)

    Returns:
        New Dataset; negatives untouched, kept positives in original order

    Raises:
        ValueError: If size is outside [n_minor, n_major]
    """
    keep = data.n_minor if size is None else int(size)
    if not data.n_minor <= keep <= data.n_major:
        raise ValueError(f"size must be in [{data.n_minor}, {data.n_major}], got {keep}")
    chosen = np.sort(rng.choice(data.n_major, size=keep, replace=False))
    return Dataset.from_classes(data.positives[chosen], data.negatives)


def class_errors_analytic(recipe: GenRecipe, model: LinearModel) -> Tuple[float, float]:
    """
    Exact per-class errors (positive, negative) of a linear model.

    Class y errs when y w.xi < -(mu w_1 + y b); by symmetry this has
    probability F0(-(mu w_1 + y b) / ||w||) with F0 the centered marginal of
    the noise along w.

    Raises:
        ValueError: On dimension mismatch, or non-Gaussian noise with d > 1
    """
    if model.dim != recipe.dim:
        raise ValueError(f"Model has d={model.dim}, recipe has d={recipe.dim}")
    if recipe.dim > 1 and recipe.family != Family.GAUSSIAN:
        raise ValueError(f"Closed-form errors for d > 1 need Gaussian noise, got {recipe.family.value}")
    norm = float(np.linalg.norm(model.w))
    if norm == 0.0:
        raise ValueError("Model direction is zero")
    signal = recipe.mu_n * float(model.w[0])
    marginal = recipe.noise_spec()
    err_pos = cdf(marginal, -(signal + model.b) / norm)
    err_neg = cdf(marginal, -(signal - model.b) / norm)
    return float(err_pos), float(err_neg)


def wce_analytic(recipe: GenRecipe, model: LinearModel) -> float:
    """Worst-class error max(err+, err-) in closed form."""
    return max(class_errors_analytic(recipe, model))


def average_error_analytic(recipe: GenRecipe, model: LinearModel, beta: Union[float, Fraction]) -> float:
    """Test error under the training class priors n : beta n."""
    err_pos, err_neg = class_errors_analytic(recipe, model)
    ratio = float(beta)
    return (err_pos + ratio * err_neg) / (1.0 + ratio)


def class_errors_empirical(
    recipe: GenRecipe,
    model: LinearModel,
    m: int,
    rng: np.random.Generator,
) -> Tuple[float, float]:
    """Misclassification frequencies over m fresh test points per class."""
    if m < 1:
        raise ValueError(f"m must be at least 1, got {m}")
    errors = []
    for label in (+1, -1):
        wrong = 0
        remaining = m
        while remaining > 0:
            chunk = min(remaining, EMPIRICAL_CHUNK)
            wrong += int(np.sum(model.predict(draw_class(recipe, label, chunk, rng)) != label))
            remaining -= chunk
        errors.append(wrong / m)
    return errors[0], errors[1]


def wce_empirical(recipe: GenRecipe, model: LinearModel, m: int, rng: np.random.Generator) -> float:
    """Monte Carlo worst-class error with m test points per class."""
    return max(class_errors_empirical(recipe, model, m, rng))
