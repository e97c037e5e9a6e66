import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.random import Generator, Philox

from fabcarbon import KdeInput, default_grid, kde_fit
from fabcarbon.errors import (
    EmptyInputError,
    GridTooNarrowError,
    NonPositiveBandwidthError,
    ValidationError,
    ZeroWeightSumError,
)
from fabcarbon.kde import (
    effective_sample_size,
    kde_density,
    scott_bandwidth,
    silverman_bandwidth,
    weighted_mean_std,
)

SQRT_2PI = np.sqrt(2.0 * np.pi)


class TestValidation:
    def test_empty_points(self):
        with pytest.raises(EmptyInputError):
            KdeInput(points=[])

    def test_zero_weight_sum(self):
        with pytest.raises(ZeroWeightSumError):
            KdeInput(points=[1.0, 2.0], weights=[0.0, 0.0])

    def test_negative_weights(self):
        with pytest.raises(ValidationError):
            KdeInput(points=[1.0, 2.0], weights=[1.0, -1.0])

    def test_non_positive_bandwidth(self):
        with pytest.raises(NonPositiveBandwidthError):
            KdeInput(points=[1.0], bandwidth=0.0)

    def test_unknown_rule(self):
        with pytest.raises(ValidationError):
            KdeInput(points=[1.0], bandwidth="sheather")

    def test_grid_too_narrow_reports_span(self):
        kin = KdeInput(points=[0.0], bandwidth=1.0)
        with pytest.raises(GridTooNarrowError, match=r"\[-4\.0, 4\.0\]"):
            kde_fit(kin, (-2.0, 2.0, 128))


class TestSingleKernel:
    def test_matches_standard_normal_pointwise(self):
        # density of one unit-bandwidth kernel at 0 equals the analytic normal
        kin = KdeInput(points=[0.0], bandwidth=1.0)
        dist = kde_fit(kin, (-6.0, 6.0, 4801))
        expected = np.exp(-0.5 * dist.x**2) / SQRT_2PI
        assert np.max(np.abs(dist.density - expected)) < 1e-6
        at_zero = dist.density[np.argmin(np.abs(dist.x))]
        assert at_zero == pytest.approx(1.0 / SQRT_2PI, abs=1e-6)

    def test_integral_is_one(self):
        kin = KdeInput(points=[0.0], bandwidth=1.0)
        dist = kde_fit(kin, (-6.0, 6.0, 4801))
        assert np.trapezoid(dist.density, dist.x) == pytest.approx(1.0, abs=1e-6)


class TestWeightedMixture:
    def test_capacity_split_mixture(self):
        # two kernels weighted like a 31%/69% regional capacity split;
        # a wide grid keeps the renormalization factor at 1 + O(1e-15)
        a, b, h = 100.0, 500.0, 25.0
        kin = KdeInput(points=[a, b], weights=[0.31, 0.69], bandwidth=h)
        dist = kde_fit(kin, (a - 8 * h, b + 8 * h, 8192))
        expected = (
            0.31 * np.exp(-0.5 * ((dist.x - a) / h) ** 2)
            + 0.69 * np.exp(-0.5 * ((dist.x - b) / h) ** 2)
        ) / (h * SQRT_2PI)
        assert np.max(np.abs(dist.density - expected)) < 1e-9

    def test_mixture_mass_split_matches_weights(self):
        # raw kernel-group masses on a wide grid split exactly as the weights
        a, b, h = 100.0, 500.0, 25.0
        x = np.linspace(a - 8 * h, b + 8 * h, 8192)
        mass_a = np.trapezoid(kde_density(np.array([a]), np.array([0.31]), h, x), x)
        mass_b = np.trapezoid(kde_density(np.array([b]), np.array([0.69]), h, x), x)
        assert mass_a / (mass_a + mass_b) == pytest.approx(0.31, abs=1e-9)
        assert mass_b / (mass_a + mass_b) == pytest.approx(0.69, abs=1e-9)

    def test_equal_weights_match_omitted_weights(self):
        points = [1.0, 2.0, 4.0, 7.0]
        with_weights = kde_fit(KdeInput(points=points, weights=[2.0] * 4, bandwidth=0.5), (-2.0, 10.0, 1024))
        without = kde_fit(KdeInput(points=points, bandwidth=0.5), (-2.0, 10.0, 1024))
        assert np.max(np.abs(with_weights.density - without.density)) < 1e-12


class TestRuleBandwidths:
    def test_scott_formula(self):
        points = np.array([1.0, 2.0, 3.0, 4.0])
        weights = np.ones(4)
        _, sigma = weighted_mean_std(points, weights)
        assert scott_bandwidth(points, weights) == pytest.approx(sigma * 4 ** (-0.2))

    def test_effective_sample_size_scale_invariant(self):
        w = np.array([1.0, 2.0, 3.0])
        assert effective_sample_size(w) == pytest.approx(effective_sample_size(10 * w))

    def test_scott_recovers_generator_moments(self):
        # oracle: the generating parameters of a large normal sample
        draws = Generator(Philox(key=2024)).normal(5.0, 2.0, size=10_000)
        kin = KdeInput(points=draws, bandwidth="scott")
        dist = kde_fit(kin, default_grid(kin))
        assert dist.mean() == pytest.approx(5.0, abs=0.05)
        assert dist.std() == pytest.approx(2.0, abs=0.1)

    def test_silverman_close_to_scott_for_normal_data(self):
        draws = Generator(Philox(key=7)).normal(0.0, 1.0, size=5000)
        w = np.ones_like(draws)
        assert silverman_bandwidth(draws, w) == pytest.approx(0.9 * scott_bandwidth(draws, w), rel=0.15)

    def test_degenerate_spread_falls_back(self):
        # identical points with a rule bandwidth still produce a proper kernel
        kin = KdeInput(points=[2.0, 2.0], bandwidth="scott")
        h = kin.bandwidth_value()
        assert h == pytest.approx(0.05 * 2.0)
        dist = kde_fit(kin, default_grid(kin))
        assert dist.mean() == pytest.approx(2.0, rel=1e-9)


class TestKdeProperties:
    @given(
        points=st.lists(st.floats(-50.0, 50.0), min_size=1, max_size=12),
        h=st.floats(0.01, 5.0),
    )
    @settings(max_examples=40, deadline=None)
    def test_always_integrates_to_one(self, points, h):
        kin = KdeInput(points=points, bandwidth=h)
        dist = kde_fit(kin, default_grid(kin, 2048))
        assert np.trapezoid(dist.density, dist.x) == pytest.approx(1.0, abs=1e-6)

    @given(
        weights=st.lists(st.floats(0.01, 10.0), min_size=3, max_size=3),
    )
    @settings(max_examples=30, deadline=None)
    def test_kde_mean_equals_weighted_point_mean(self, weights):
        points = np.array([1.0, 3.0, 6.0])
        w = np.array(weights)
        kin = KdeInput(points=points, weights=w, bandwidth=0.3)
        dist = kde_fit(kin, (1.0 - 8 * 0.3, 6.0 + 8 * 0.3, 4096))
        assert dist.mean() == pytest.approx(float(np.dot(w, points) / w.sum()), rel=1e-4)
