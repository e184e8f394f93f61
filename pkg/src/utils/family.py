"""
Family and target name normalization utilities.

Handles the various spellings accepted on the command line and in config files
and normalizes them to canonical names.
Supports: Gaussian/normal -> gaussian, Fréchet/two_sided_frechet -> frechet, etc.
"""
from typing import Tuple

from ..core.config import CLASSIFIERS, FAMILIES, FAMILY_ALIASES, REPRODUCE_TARGETS


def normalize_family(family: str) -> str:
    """
    Normalize a family name to its canonical form.

    Supports:
    - uniform, Uniform, unif -> uniform
    - gaussian, Gaussian, normal -> gaussian
    - laplace, Laplace -> laplace
    - frechet, Fréchet, TwoSidedFrechet -> frechet

    Args:
        family: Family name in any accepted spelling

    Returns:
        Canonical family name

    Raises:
        ValueError: If the family is empty or unknown
    """
    if not family:
        raise ValueError("Family cannot be empty")

    key = family.strip().lower().replace("-", "_").replace(" ", "_")
    if key in FAMILY_ALIASES:
        return FAMILY_ALIASES[key]

    compact = key.replace("_", "")
    if compact in FAMILY_ALIASES:
        return FAMILY_ALIASES[compact]

    raise ValueError(
        f"Unsupported family: {family}. Expected one of {', '.join(FAMILIES)}"
    )


def normalize_target(target: str) -> str:
    """
    Normalize a `reproduce` target (fig1, Fig1, figure1, 1 -> fig1).

    Raises:
        ValueError: If the target is not one of the reproducible figures
    """
    if not target:
        raise ValueError("Target cannot be empty")

    tf = target.strip().lower().replace("figure", "fig")
    if tf.isdigit():
        tf = f"fig{tf}"
    if tf not in REPRODUCE_TARGETS:
        raise ValueError(f"Unknown target: {target}. Expected one of {', '.join(REPRODUCE_TARGETS)}")
    return tf


def normalize_classifier(classifier: str) -> str:
    """
    Normalize a classifier name (hard_svm, Hard-SVM, hard -> hard-svm).

    Raises:
        ValueError: If the classifier is unknown
    """
    if not classifier:
        raise ValueError("Classifier cannot be empty")

    key = classifier.strip().lower().replace("_", "-")
    if key in ("hard", "svm"):
        key = "hard-svm"
    elif key == "soft":
        key = "soft-svm"
    elif key in ("logreg", "logistic-regression"):
        key = "logistic"
    if key not in CLASSIFIERS:
        raise ValueError(f"Unknown classifier: {classifier}. Expected one of {', '.join(CLASSIFIERS)}")
    return key


def parse_family_list(value: str) -> Tuple[str, ...]:
    """
    Parse a comma-separated family list ("gaussian,laplace") into canonical names.

    Raises:
        ValueError: If any entry is invalid
    """
    parts = [p for p in (value or "").split(",") if p.strip()]
    if not parts:
        raise ValueError("Family list cannot be empty")
    return tuple(normalize_family(p) for p in parts)
