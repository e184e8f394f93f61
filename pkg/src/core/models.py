"""
Pydantic models for specs, budgets, reports and run configuration.
"""
import math
from enum import Enum
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .config import (
    DEFAULT_EPSILON,
    DEFAULT_FRECHET_ALPHA,
    DEFAULT_GRID_TRIALS,
    DEFAULT_HARD_MARGIN_C,
    DEFAULT_KS_THRESHOLD,
    DEFAULT_LOGISTIC_STEP_SIZE,
    DEFAULT_LOGISTIC_STEPS,
    DEFAULT_SEED,
    DEFAULT_SOFT_MARGIN_C,
    DEFAULT_TEST_POINTS,
    FIG1_GRID_SIZE,
    UNIFORM_HALF_WIDTH,
)
from ..utils.family import normalize_classifier, normalize_family
from ..utils.stats import as_ratio


class Family(str, Enum):
    """Class-conditional family."""
    UNIFORM = "uniform"
    GAUSSIAN = "gaussian"
    LAPLACE = "laplace"
    FRECHET = "frechet"


class TailType(str, Enum):
    """Extreme-value domain of attraction."""
    FRECHET = "Frechet"
    WEIBULL = "Weibull"
    GUMBEL = "Gumbell"


def _coerce_family(value):
    if isinstance(value, Family):
        return value
    return Family(normalize_family(str(value)))


class DistributionSpec(BaseModel):
    """One symmetric class-conditional law D(mu)."""
    model_config = ConfigDict(frozen=True)

    family: Family = Field(..., description="uniform, gaussian, laplace or frechet (two-sided)")
    mu: float = Field(0.0, description="Center / symmetry axis")
    scale: float = Field(1.0, gt=0, description="Half-width (uniform), std-dev (gaussian), scale (laplace)")
    alpha: float = Field(1.0, gt=0, description="Shape of the two-sided Frechet law (ignored otherwise)")

    _normalize_family = field_validator("family", mode="before")(_coerce_family)

    @field_validator("mu")
    @classmethod
    def _finite_mu(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError(f"mu must be finite, got {value}")
        return value

    def centered(self) -> "DistributionSpec":
        """Same family and shape, recentered at zero."""
        return self.model_copy(update={"mu": 0.0})


class EvtNormalization(BaseModel):
    """Fisher-Tippett-Gnedenko normalization of the maximum of n centered draws."""
    model_config = ConfigDict(frozen=True)

    tail_type: TailType
    alpha: float = Field(..., gt=0, description="Shape of the limit law (1 for Gumbel)")
    n: int = Field(..., ge=2, description="Sample size the constants refer to")
    a_n: float = Field(..., gt=0, description="Scale sequence computed from the tail function U")
    b_n: float = Field(..., description="Location sequence computed from the tail function U")
    x_f: Optional[float] = Field(None, description="Right endpoint; None means +infinity")
    asymptotic_a_n: float = Field(..., gt=0, description="Textbook asymptotic scale constant")
    asymptotic_b_n: float = Field(..., description="Textbook asymptotic location constant")

    @property
    def has_finite_endpoint(self) -> bool:
        return self.x_f is not None

    def asymptotic(self) -> "EvtNormalization":
        """Copy whose a_n / b_n are the asymptotic constants."""
        return self.model_copy(update={"a_n": self.asymptotic_a_n, "b_n": self.asymptotic_b_n})


class GenRecipe(BaseModel):
    """Generative recipe X = Y * (mu_n e_1 + xi)."""
    model_config = ConfigDict(frozen=True)

    family: Family
    mu_n: float = Field(..., gt=0, description="Class-center magnitude")
    dim: int = Field(1, ge=1)
    epsilon: Optional[float] = Field(None, gt=0, lt=1, description="Separability budget that produced mu_n")
    alpha: float = Field(DEFAULT_FRECHET_ALPHA, gt=0)
    scale: float = Field(1.0, gt=0)

    _normalize_family = field_validator("family", mode="before")(_coerce_family)

    @classmethod
    def for_family(
        cls,
        family,
        mu_n: float,
        dim: int = 1,
        epsilon: Optional[float] = None,
        alpha: float = DEFAULT_FRECHET_ALPHA,
    ) -> "GenRecipe":
        """Recipe with the family's unit noise (uniform noise has half-width 1/2)."""
        fam = _coerce_family(family)
        scale = UNIFORM_HALF_WIDTH if fam == Family.UNIFORM else 1.0
        return cls(family=fam, mu_n=mu_n, dim=dim, epsilon=epsilon, alpha=alpha, scale=scale)

    def noise_spec(self) -> DistributionSpec:
        """Centered one-dimensional noise law (per coordinate for d > 1)."""
        return DistributionSpec(family=self.family, mu=0.0, scale=self.scale, alpha=self.alpha)


class TheoremBudget(BaseModel):
    """Constants parametrizing the finite-sample theorems."""
    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(..., gt=0, lt=1)
    delta: float = Field(..., gt=0, lt=1)
    gamma: float = Field(..., gt=0, lt=1)
    beta: float = Field(..., gt=0, lt=1)
    n: int = Field(..., ge=2)
    alpha: float = Field(DEFAULT_FRECHET_ALPHA, gt=0)

    @model_validator(mode="after")
    def _check_budget(self) -> "TheoremBudget":
        total = 2 * self.epsilon + 2 * self.delta + 3 * self.gamma
        if total >= 1:
            raise ValueError(
                f"Vacuous budget: 2*epsilon + 2*delta + 3*gamma = {total:.4g} >= 1"
            )
        product = as_ratio(self.beta) * self.n
        if product.denominator != 1 or product < 1:
            raise ValueError(f"beta * n must be a positive integer, got {self.beta} * {self.n}")
        return self

    @property
    def minority(self) -> int:
        return int(as_ratio(self.beta) * self.n)


class BoundSet(BaseModel):
    """Closed-form bounds of one theorem evaluated at a budget."""
    family: Family
    erm_theta_lower: float = Field(..., ge=0)
    sub_theta_upper: float = Field(..., ge=0)
    erm_wce_lower: float = Field(..., ge=0, le=1)
    sub_wce_upper: float = Field(..., ge=0)
    prob_floor: float = Field(..., gt=0, lt=1)
    degenerate: bool = Field(False, description="True when erm_theta_lower was clamped at 0")


class ValidationReport(BaseModel):
    """Outcome of a Monte Carlo theorem validation."""
    family: Family
    mode: Literal["event", "ks"] = "event"
    trials: int
    event_hits: int
    empirical_freq: float
    prob_floor: float
    wilson_lower: float
    wilson_upper: float
    wilson_slack: float
    passed: bool
    insufficient_trials: bool = False
    mean_theta_erm: float
    mean_theta_sub: float
    non_separable_count: int
    mean_wce_erm: Optional[float] = None
    mean_wce_sub: Optional[float] = None
    wce_claim_hits: Optional[int] = Field(None, description="Event trials where both wce bounds held")
    wce_claim_freq: Optional[float] = None
    ks_statistic: Optional[float] = None
    levy_distance: Optional[float] = None
    ks_threshold: Optional[float] = None
    shrink_check: Optional[bool] = Field(None, description="ERM/SUB limit difference term shrinks to zero (uniform)")
    mu_n: float
    budget: TheoremBudget
    bounds: Optional[BoundSet] = None
    seed: int


class BudgetEntry(BaseModel):
    """Raw campaign entry; validated into a TheoremBudget when the campaign runs."""
    family: Family
    epsilon: float = 0.1
    delta: float = 0.1
    gamma: float = 0.1
    beta: float = 0.01
    n: int = 1_000_000
    alpha: float = DEFAULT_FRECHET_ALPHA

    _normalize_family = field_validator("family", mode="before")(_coerce_family)


class CampaignError(BaseModel):
    """Budget that could not be validated."""
    family: Family
    entry: BudgetEntry
    error: str


ExperimentKind = Literal["Fig1Sweep", "Fig3Grid", "CosineStudy", "TheoremCampaign"]


class ExperimentConfig(BaseModel):
    """Resolved configuration of one campaign; persisted next to its results."""
    kind: ExperimentKind
    families: List[Family] = Field(default_factory=lambda: [Family.GAUSSIAN])
    classifiers: List[str] = Field(default_factory=lambda: ["hard-svm"])
    dims: List[int] = Field(default_factory=lambda: [1])
    mus: List[float] = Field(default_factory=list, description="Fixed centers (Fig-3 grid)")
    n: int = Field(1000, ge=1)
    n_grid: List[int] = Field(default_factory=list, description="Majority sizes (cosine study)")
    beta: float = Field(0.05, gt=0, le=1)
    epsilon: float = Field(DEFAULT_EPSILON, gt=0, lt=1)
    alpha: float = Field(DEFAULT_FRECHET_ALPHA, gt=0)
    trials: int = Field(DEFAULT_GRID_TRIALS, ge=1)
    test_points: int = Field(DEFAULT_TEST_POINTS, ge=1)
    grid_size: int = Field(FIG1_GRID_SIZE, ge=2)
    wce_mode: Literal["empirical", "analytic"] = "empirical"
    soft_c: float = Field(DEFAULT_SOFT_MARGIN_C, gt=0)
    hard_c: float = Field(DEFAULT_HARD_MARGIN_C, gt=0)
    hard_fallback_soft: bool = Field(False, description="Refit non-separable hard-SVM cells as soft SVM at hard_c")
    logistic_steps: int = Field(DEFAULT_LOGISTIC_STEPS, ge=1)
    logistic_step_size: float = Field(DEFAULT_LOGISTIC_STEP_SIZE, gt=0)
    budgets: List[BudgetEntry] = Field(default_factory=list)
    ks_threshold: float = Field(DEFAULT_KS_THRESHOLD, gt=0)
    seed: int = DEFAULT_SEED
    output: Optional[str] = None

    _normalize_families = field_validator("families", mode="before")(
        lambda value: [_coerce_family(v) for v in value]
    )

    @field_validator("classifiers")
    @classmethod
    def _normalize_classifiers(cls, value: List[str]) -> List[str]:
        return [normalize_classifier(v) for v in value]

    @field_validator("dims")
    @classmethod
    def _positive_dims(cls, value: List[int]) -> List[int]:
        if any(d < 1 for d in value):
            raise ValueError(f"dims must be >= 1, got {value}")
        return value


class ResultRow(BaseModel):
    """One statistic of one campaign cell."""
    kind: str
    family: str
    classifier: str
    dim: int
    mu: float
    n: int
    beta: float
    stat: str
    mean: float
    std: float
    trials: int = Field(..., description="Successful trials the statistic averages over")
    failures: int = Field(0, description="Attempted minus successful trials")
