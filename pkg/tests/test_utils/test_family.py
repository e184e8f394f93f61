"""
Unit tests for family / target / classifier name utilities.
"""
import pytest

from src.utils.family import (
    normalize_classifier,
    normalize_family,
    normalize_target,
    parse_family_list,
)


class TestNormalizeFamily:
    """Tests for normalize_family function."""

    def test_canonical_names(self):
        """Canonical names map to themselves."""
        for name in ("uniform", "gaussian", "laplace", "frechet"):
            assert normalize_family(name) == name

    def test_aliases_and_case(self):
        """Aliases, case and padding are accepted."""
        assert normalize_family("Normal") == "gaussian"
        assert normalize_family(" GAUSS ") == "gaussian"
        assert normalize_family("Fréchet") == "frechet"
        assert normalize_family("TwoSidedFrechet") == "frechet"
        assert normalize_family("two-sided-frechet") == "frechet"
        assert normalize_family("unif") == "uniform"

    def test_invalid_families(self):
        """Unknown or empty names raise ValueError."""
        with pytest.raises(ValueError):
            normalize_family("")
        with pytest.raises(ValueError):
            normalize_family("cauchy")


class TestNormalizeTarget:
    """Tests for normalize_target function."""

    def test_spellings(self):
        """fig1, Fig1, figure1 and 1 all name the same preset."""
        assert normalize_target("fig1") == "fig1"
        assert normalize_target("Fig3") == "fig3"
        assert normalize_target("figure4") == "fig4"
        assert normalize_target("1") == "fig1"

    def test_unknown_target(self):
        with pytest.raises(ValueError):
            normalize_target("fig9")
        with pytest.raises(ValueError):
            normalize_target("")


class TestNormalizeClassifier:
    """Tests for normalize_classifier function."""

    def test_spellings(self):
        assert normalize_classifier("hard") == "hard-svm"
        assert normalize_classifier("Hard_SVM") == "hard-svm"
        assert normalize_classifier("soft") == "soft-svm"
        assert normalize_classifier("logreg") == "logistic"

    def test_unknown(self):
        with pytest.raises(ValueError):
            normalize_classifier("random-forest")


class TestParseFamilyList:
    """Tests for parse_family_list function."""

    def test_comma_list(self):
        assert parse_family_list("gaussian, Laplace,frechet") == ("gaussian", "laplace", "frechet")

    def test_empty_or_invalid(self):
        with pytest.raises(ValueError):
            parse_family_list("")
        with pytest.raises(ValueError):
            parse_family_list("gaussian,cauchy")
