"""
Unit tests for class-conditional distributions and extreme-value constants.
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from src.core.distributions import (
    cdf,
    evt_constants,
    gumbel_auxiliary,
    isf,
    limit_cdf,
    log_sf,
    quantile,
    sample,
    sample_limit,
    sample_maximum,
    sf,
    tail_function,
)
from src.core.models import DistributionSpec, Family, TailType
from src.utils.stats import ks_distance

SPECS = [
    DistributionSpec(family="uniform", mu=0.3, scale=0.5),
    DistributionSpec(family="gaussian", mu=-1.0, scale=2.0),
    DistributionSpec(family="laplace", mu=0.5, scale=1.5),
    DistributionSpec(family="frechet", mu=0.0, alpha=2.0),
    DistributionSpec(family="frechet", mu=1.0, alpha=0.7),
]


class TestSpecs:
    """Tests for DistributionSpec validation."""

    def test_family_aliases(self):
        assert DistributionSpec(family="Normal").family == Family.GAUSSIAN
        assert DistributionSpec(family="Fréchet").family == Family.FRECHET

    def test_invalid_values(self):
        with pytest.raises(ValueError):
            DistributionSpec(family="gaussian", scale=0.0)
        with pytest.raises(ValueError):
            DistributionSpec(family="gaussian", mu=float("inf"))
        with pytest.raises(ValueError):
            DistributionSpec(family="cauchy")


class TestCdfQuantile:
    """Tests for cdf, sf, quantile and isf."""

    @pytest.mark.parametrize("spec", SPECS, ids=lambda s: f"{s.family.value}-{s.mu}")
    @settings(max_examples=50, deadline=None)
    @given(p=st.floats(1e-9, 1 - 1e-9))
    def test_round_trip(self, spec, p):
        """quantile inverts cdf to 1e-12."""
        assert cdf(spec, quantile(spec, p)) == pytest.approx(p, rel=1e-9, abs=1e-12)

    @pytest.mark.parametrize("spec", SPECS, ids=lambda s: f"{s.family.value}-{s.mu}")
    @settings(max_examples=50, deadline=None)
    @given(z=st.floats(-20, 20))
    def test_symmetry(self, spec, z):
        """F(mu + z) = 1 - F(mu - z)."""
        assert cdf(spec, spec.mu + z) == pytest.approx(1.0 - cdf(spec, spec.mu - z), abs=1e-12)

    def test_matches_scipy(self):
        """Gaussian and Laplace agree with scipy.stats."""
        x = np.linspace(-6, 6, 41)
        g = DistributionSpec(family="gaussian", mu=0.5, scale=1.3)
        l = DistributionSpec(family="laplace", mu=-0.2, scale=0.7)
        np.testing.assert_allclose(cdf(g, x), stats.norm.cdf(x, 0.5, 1.3), atol=1e-14)
        np.testing.assert_allclose(cdf(l, x), stats.laplace.cdf(x, -0.2, 0.7), atol=1e-14)

    def test_uniform_support(self):
        spec = DistributionSpec(family="uniform", mu=0.0, scale=0.5)
        assert cdf(spec, -0.5) == 0.0
        assert cdf(spec, 0.5) == 1.0
        assert cdf(spec, 0.0) == 0.5
        assert cdf(spec, 3.0) == 1.0

    def test_frechet_closed_form(self):
        """Two-sided Fréchet: F(x) = 1/2 + 1/2 exp(-x^-alpha) for x > 0."""
        spec = DistributionSpec(family="frechet", alpha=2.0)
        assert cdf(spec, 2.0) == pytest.approx(0.5 + 0.5 * math.exp(-0.25))
        assert cdf(spec, -2.0) == pytest.approx(0.5 - 0.5 * math.exp(-0.25))

    def test_far_tail_precision(self):
        """Survival probabilities near 1e-7 keep relative precision."""
        spec = DistributionSpec(family="gaussian")
        q = 1e-7
        x = isf(spec, q)
        assert sf(spec, x) == pytest.approx(q, rel=1e-10)
        assert log_sf(spec, x) == pytest.approx(math.log(q), rel=1e-10)
        assert sf(spec, 30.0) > 0.0

    def test_scalar_and_array(self):
        spec = SPECS[1]
        assert isinstance(cdf(spec, 0.0), float)
        assert cdf(spec, np.zeros(3)).shape == (3,)

    def test_quantile_domain(self):
        spec = SPECS[0]
        for bad in (0.0, 1.0, -0.1, float("nan")):
            with pytest.raises(ValueError):
                quantile(spec, bad)
        with pytest.raises(ValueError):
            isf(spec, 1.0)


class TestSampling:
    """Tests for inverse-transform sampling."""

    @pytest.mark.parametrize("spec", SPECS, ids=lambda s: f"{s.family.value}-{s.mu}")
    def test_ks_against_cdf(self, spec, rng):
        draws = sample(spec, rng, 20_000)
        assert ks_distance(draws, lambda x: cdf(spec, x)) < 0.02

    def test_deterministic(self):
        spec = SPECS[2]
        a = sample(spec, np.random.default_rng(5), 10)
        b = sample(spec, np.random.default_rng(5), 10)
        np.testing.assert_array_equal(a, b)

    def test_empty_and_negative(self, rng):
        assert sample(SPECS[0], rng, 0).shape == (0,)
        with pytest.raises(ValueError):
            sample(SPECS[0], rng, -1)

    @pytest.mark.parametrize("spec", SPECS[:4], ids=lambda s: s.family.value)
    def test_maximum_matches_brute_force(self, spec):
        """Exact maxima agree in distribution with max over n draws."""
        n = 50
        brute = np.array([sample(spec, np.random.default_rng(i), n).max() for i in range(2000)])
        exact = sample_maximum(spec, n, np.random.default_rng(99), 2000)
        assert stats.ks_2samp(brute, exact).pvalue > 1e-3


class TestTailFunction:
    """Tests for tail_function and gumbel_auxiliary."""

    def test_values(self):
        g = DistributionSpec(family="gaussian")
        assert tail_function(g, 1000.0) == pytest.approx(stats.norm.isf(1e-3), rel=1e-12)
        l = DistributionSpec(family="laplace")
        assert tail_function(l, 100.0) == pytest.approx(math.log(50.0), rel=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            tail_function(SPECS[1], 1.0)

    def test_laplace_auxiliary(self):
        spec = DistributionSpec(family="laplace", scale=1.5)
        assert gumbel_auxiliary(spec, 4.0) == 1.5
        assert gumbel_auxiliary(spec, 4.0, closed_form=False) == pytest.approx(1.5, rel=1e-8)

    def test_gaussian_auxiliary_mills_ratio(self):
        """For the Gaussian, g(t) = E[X - t | X > t] ~ 1/t for large t."""
        spec = DistributionSpec(family="gaussian")
        t = 5.0
        expected = (stats.norm.pdf(t) - t * stats.norm.sf(t)) / stats.norm.sf(t)
        assert gumbel_auxiliary(spec, t) == pytest.approx(expected, rel=1e-8)

    def test_auxiliary_domain(self):
        with pytest.raises(ValueError):
            gumbel_auxiliary(SPECS[3], 2.0)


class TestEvtConstants:
    """Tests for evt_constants, limit_cdf and sample_limit."""

    def test_tail_types(self):
        assert evt_constants(SPECS[0], 100).tail_type == TailType.WEIBULL
        assert evt_constants(SPECS[1], 100).tail_type == TailType.GUMBEL
        assert evt_constants(SPECS[2], 100).tail_type == TailType.GUMBEL
        assert evt_constants(SPECS[3], 100).tail_type == TailType.FRECHET

    def test_laplace_constants(self):
        norm = evt_constants(DistributionSpec(family="laplace", mu=4.0), 1000)
        assert norm.a_n == 1.0
        assert norm.b_n == pytest.approx(math.log(500.0))
        assert norm.asymptotic_b_n == pytest.approx(math.log(1000.0))
        assert norm.x_f is None

    def test_uniform_constants(self):
        norm = evt_constants(DistributionSpec(family="uniform", scale=0.5), 1000)
        assert norm.has_finite_endpoint
        assert norm.x_f == 0.5
        assert norm.b_n == 0.5
        assert norm.a_n == pytest.approx(1e-3)
        assert norm.alpha == 1.0

    def test_frechet_constants(self):
        norm = evt_constants(DistributionSpec(family="frechet", alpha=2.0), 10_000)
        assert norm.b_n == 0.0
        assert norm.a_n == pytest.approx(math.sqrt(5000.0), rel=1e-3)
        assert norm.asymptotic_a_n == pytest.approx(100.0)

    def test_small_n(self):
        with pytest.raises(ValueError):
            evt_constants(SPECS[1], 1)

    def test_limit_cdf(self):
        norm = evt_constants(SPECS[1], 100)
        assert limit_cdf(norm, 0.0) == pytest.approx(math.exp(-1.0))
        frechet = evt_constants(SPECS[3], 100)
        assert limit_cdf(frechet, -1.0) == 0.0
        weibull = evt_constants(SPECS[0], 100)
        assert limit_cdf(weibull, 0.5) == 1.0
        assert limit_cdf(weibull, -1.0) == pytest.approx(math.exp(-1.0))

    @pytest.mark.parametrize("spec", SPECS[:4], ids=lambda s: s.family.value)
    def test_limit_sampler_matches_cdf(self, spec, rng):
        norm = evt_constants(spec, 100)
        draws = sample_limit(norm, rng, 20_000)
        assert ks_distance(draws, lambda x: limit_cdf(norm, x)) < 0.02
        assert isinstance(sample_limit(norm, rng), float)

    @pytest.mark.parametrize("spec", SPECS[:4], ids=lambda s: s.family.value)
    def test_normalized_maxima_converge(self, spec):
        """(M_n - b_n) / a_n is within KS 0.05 of the limit law at n = 10^5."""
        n = 100_000
        norm = evt_constants(spec, n)
        maxima = sample_maximum(spec.centered(), n, np.random.default_rng(2024), 10_000)
        scaled = (maxima - norm.b_n) / norm.a_n
        assert ks_distance(scaled, lambda x: limit_cdf(norm, x)) <= 0.05
