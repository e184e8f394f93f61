"""
Linear classifiers.

Closed-form one-dimensional hard-margin SVM, a d-dimensional hard / soft
margin SVM solved in the dual by two-multiplier coordinate ascent (maximal
violating pair), unregularized logistic regression by full-batch gradient
descent, and the optimal offset for a fixed direction.
"""
import logging
import math
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Tuple

import numpy as np
from scipy import optimize, special

from .config import (
    DEFAULT_HARD_MARGIN_C,
    DEFAULT_LOGISTIC_STEP_SIZE,
    DEFAULT_LOGISTIC_STEPS,
    DEFAULT_MAX_PAIR_UPDATES,
    DEFAULT_SOFT_MARGIN_C,
    DEFAULT_SVM_TOL,
    LOGGER_NAME,
)
from .errors import IterationLimitError, NonFiniteError, NotSeparableError

if TYPE_CHECKING:
    from .datagen import Dataset

logger = logging.getLogger(f"{LOGGER_NAME}.svm")


@dataclass(frozen=True)
class LinearModel:
    """
    Linear classifier sign(w.x + b).

    Attributes:
        w: Direction, length d
        b: Offset
        margin: Geometric margin on the training data (NaN when not computed)
        kkt_violation: Final maximal KKT violation of the dual solver
        iterations: Pair updates (SMO) or gradient steps (logistic)
    """
    w: np.ndarray
    b: float
    margin: float = float("nan")
    kkt_violation: float = 0.0
    iterations: int = 0

    @property
    def dim(self) -> int:
        return int(self.w.shape[0])

    @property
    def theta(self) -> float:
        """Threshold along the unit direction, -b / ||w|| (equals -b when w = 1)."""
        return -self.b / float(np.linalg.norm(self.w))

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X, dtype=float).reshape(-1, self.dim) @ self.w + self.b

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.where(self.decision_function(X) >= 0.0, 1, -1)

    def normalized(self) -> "LinearModel":
        """Same classifier with ||w|| = 1."""
        norm = float(np.linalg.norm(self.w))
        if norm == 0.0:
            raise ValueError("Cannot normalize a zero direction")
        return replace(self, w=self.w / norm, b=self.b / norm)


def _split(X: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    return X[y < 0], X[y > 0]


def solve_svm_1d(neg_max: float, pos_min: float) -> LinearModel:
    """
    Hard-margin SVM on the line: the midpoint of the gap between classes.

    Args:
        neg_max: Largest negative example M-
        pos_min: Smallest positive example m+

    Returns:
        LinearModel with w = 1, theta = (M- + m+) / 2, margin = (m+ - M-) / 2

    Raises:
        NotSeparableError: If neg_max >= pos_min
    """
    if not neg_max < pos_min:
        raise NotSeparableError(f"Classes overlap on the line: max negative {neg_max} >= min positive {pos_min}")
    theta = 0.5 * (neg_max + pos_min)
    return LinearModel(w=np.array([1.0]), b=-theta, margin=0.5 * (pos_min - neg_max))


def train_svm_1d(data: "Dataset") -> LinearModel:
    """Closed-form hard-margin fit of one-dimensional data (positives to the right)."""
    if data.dim != 1:
        raise ValueError(f"train_svm_1d needs one-dimensional data, got d={data.dim}")
    negatives, positives = _split(data.X[:, 0], data.y)
    if negatives.size == 0 or positives.size == 0:
        raise ValueError("Both classes must be present")
    return solve_svm_1d(float(negatives.max()), float(positives.min()))


def offset_for_direction(data: "Dataset", w: np.ndarray) -> float:
    """
    Offset b equalizing the two classes' minimum margins along w.

    This is the one-dimensional SVM on the projections w.x; positively
    homogeneous in w.

    Raises:
        ValueError: If w is zero or has the wrong length
        NotSeparableError: If the projections interleave
    """
    direction = np.asarray(w, dtype=float).ravel()
    if direction.shape[0] != data.dim:
        raise ValueError(f"Direction has length {direction.shape[0]}, data has d={data.dim}")
    if not np.any(direction):
        raise ValueError("Direction must be nonzero")
    proj = data.X @ direction
    negatives, positives = _split(proj, data.y)
    return solve_svm_1d(float(negatives.max()), float(positives.min())).b


def is_separable(data: "Dataset") -> bool:
    """
    Strict linear separability of the training data.

    One dimension is decided exactly in either orientation. For d > 1 a
    separator with y (w.x + b) >= 1 on every point is searched by linear
    programming; the program is feasible exactly when a zero-training-error
    hyperplane exists.
    """
    X, y = data.X, data.y
    if data.dim == 1:
        negatives, positives = _split(X[:, 0], y)
        if negatives.size == 0 or positives.size == 0:
            return True
        return bool(negatives.max() < positives.min() or positives.max() < negatives.min())

    constraints = -y[:, None] * np.hstack([X, np.ones((X.shape[0], 1))])
    result = optimize.linprog(
        c=np.zeros(data.dim + 1),
        A_ub=constraints,
        b_ub=-np.ones(X.shape[0]),
        bounds=[(None, None)] * (data.dim + 1),
        method="highs",
    )
    if result.status not in (0, 2):
        logger.warning(f"Separability program ended with status {result.status}: {result.message}")
    return bool(result.status == 0)


def _smo(
    X: np.ndarray,
    y: np.ndarray,
    c: float,
    tol: float,
    max_updates: int,
) -> Tuple[np.ndarray, np.ndarray, float, float, int]:
    """
    Maximal-violating-pair coordinate ascent on the linear SVM dual.

    Maintains w = sum(alpha_i y_i x_i) and v = y - X w; the pair (i, j)
    maximizes v over I_up and minimizes it over I_low (first index on ties).

    Returns:
        (alpha, w, m, M, updates) with m - M the final violation
    """
    n_samples, dim = X.shape
    alpha = np.zeros(n_samples)
    w = np.zeros(dim)
    v = y.astype(float).copy()
    pos = y > 0

    for updates in range(max_updates + 1):
        up = np.where(pos, alpha < c, alpha > 0)
        low = np.where(pos, alpha > 0, alpha < c)
        v_up = np.where(up, v, -np.inf)
        v_low = np.where(low, v, np.inf)
        i = int(np.argmax(v_up))
        j = int(np.argmin(v_low))
        m, M = float(v_up[i]), float(v_low[j])
        if m - M <= tol:
            return alpha, w, m, M, updates
        if updates == max_updates:
            break

        diff = X[i] - X[j]
        step = (m - M) / max(float(diff @ diff), 1e-12)
        step = min(step, c - alpha[i] if pos[i] else alpha[i])
        step = min(step, alpha[j] if pos[j] else c - alpha[j])

        alpha[i] += step if pos[i] else -step
        alpha[j] -= step if pos[j] else -step
        w += step * diff
        v -= step * (X @ diff)

    raise IterationLimitError(
        f"Dual ascent stopped after {max_updates} pair updates with violation {m - M:.3e} > {tol:.1e}",
        iterations=max_updates,
        violation=m - M,
    )


def _geometric_margin(X: np.ndarray, y: np.ndarray, w: np.ndarray, b: float) -> float:
    return float(np.min(y * (X @ w + b)) / np.linalg.norm(w))


def train_soft_svm(
    data: "Dataset",
    c: float = DEFAULT_SOFT_MARGIN_C,
    tol: float = DEFAULT_SVM_TOL,
    max_updates: int = DEFAULT_MAX_PAIR_UPDATES,
) -> LinearModel:
    """
    Soft-margin linear SVM: min 1/2 ||w||^2 + c * sum hinge(y (w.x + b)).

    Args:
        data: Training data
        c: Slack penalty (> 0)
        tol: Stop when the maximal KKT violation is at most tol
        max_updates: Pair-update budget

    Returns:
        Fitted LinearModel; b averages y - w.x over free support vectors

    Raises:
        IterationLimitError: If tol is not reached within max_updates
    """
    if c <= 0:
        raise ValueError(f"c must be positive, got {c}")
    X, y = data.X, data.y
    alpha, w, m, M, updates = _smo(X, y, c, tol, max_updates)
    free = (alpha > 0) & (alpha < c)
    v = y - X @ w
    b = float(v[free].mean()) if np.any(free) else 0.5 * (m + M)
    margin = _geometric_margin(X, y, w, b) if np.any(w) else float("nan")
    logger.debug(f"soft SVM c={c:g}: {updates} updates, violation {m - M:.2e}, {int(np.sum(alpha > 0))} SVs")
    return LinearModel(w=w, b=b, margin=margin, kkt_violation=max(m - M, 0.0), iterations=updates)


def train_hard_svm(
    data: "Dataset",
    tol: float = DEFAULT_SVM_TOL,
    c: float = DEFAULT_HARD_MARGIN_C,
    max_updates: int = DEFAULT_MAX_PAIR_UPDATES,
) -> LinearModel:
    """
    Hard-margin linear SVM (min ||w||^2 s.t. y (w.x + b) >= 1).

    Solved as the box-constrained dual with a very large box c; the offset
    is then set by offset_for_direction so both classes' minimum functional
    margins are equal.

    Raises:
        NotSeparableError: If the data is not strictly separable, or a
            multiplier saturates the box
        IterationLimitError: If tol is not reached within max_updates
    """
    if not is_separable(data):
        raise NotSeparableError(f"Training data ({data.X.shape[0]} points, d={data.dim}) is not linearly separable")
    X, y = data.X, data.y
    alpha, w, m, M, updates = _smo(X, y, c, tol, max_updates)
    if np.any(alpha >= c):
        raise NotSeparableError(f"Dual multiplier reached the box c={c:g}")
    b = offset_for_direction(data, w)
    margin = _geometric_margin(X, y, w, b)
    if margin <= 0:
        raise NotSeparableError(f"Hard-margin fit has negative margin {margin:.3e}")
    logger.debug(f"hard SVM: {updates} updates, violation {m - M:.2e}, margin {margin:.6g}")
    return LinearModel(w=w, b=b, margin=margin, kkt_violation=max(m - M, 0.0), iterations=updates)


def logistic_loss_and_grad(X: np.ndarray, y: np.ndarray, w: np.ndarray, b: float) -> Tuple[float, np.ndarray, float]:
    """
    Mean logistic loss log(1 + exp(-y (w.x + b))) and its gradient.

    Returns:
        (loss, grad_w, grad_b)
    """
    margins = y * (X @ w + b)
    loss = float(np.mean(np.logaddexp(0.0, -margins)))
    weights = -y * special.expit(-margins) / X.shape[0]
    return loss, X.T @ weights, float(weights.sum())


def train_logistic(
    data: "Dataset",
    steps: int = DEFAULT_LOGISTIC_STEPS,
    step_size: float = DEFAULT_LOGISTIC_STEP_SIZE,
) -> LinearModel:
    """
    Unregularized logistic regression by full-batch gradient descent from zero.

    Raises:
        ValueError: If steps < 1 or step_size <= 0
        NonFiniteError: If the loss or parameters stop being finite
    """
    if steps < 1:
        raise ValueError(f"steps must be at least 1, got {steps}")
    if step_size <= 0:
        raise ValueError(f"step_size must be positive, got {step_size}")

    X, y = data.X, data.y
    w = np.zeros(data.dim)
    b = 0.0
    loss = math.log(2.0)
    for _ in range(steps):
        loss, grad_w, grad_b = logistic_loss_and_grad(X, y, w, b)
        if not math.isfinite(loss):
            raise NonFiniteError(f"Logistic loss overflowed (step_size={step_size})")
        w = w - step_size * grad_w
        b = b - step_size * grad_b
        if not (np.all(np.isfinite(w)) and math.isfinite(b)):
            raise NonFiniteError(f"Logistic parameters diverged (step_size={step_size})")
    logger.debug(f"logistic: {steps} steps, final loss {loss:.6g}")
    return LinearModel(w=w, b=b, iterations=steps)
