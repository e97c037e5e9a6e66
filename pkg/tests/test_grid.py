import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fabcarbon import GridDistribution, PointMass, grid_from_samples
from fabcarbon.errors import QuantileOutOfRangeError, ValidationError

from conftest import normal_grid


class TestConstruction:
    def test_rejects_negative_density(self):
        with pytest.raises(ValidationError):
            GridDistribution(0.0, 1.0, np.array([1.0, -0.5, 1.0]))

    def test_rejects_unnormalized(self):
        with pytest.raises(ValidationError, match="integrates"):
            GridDistribution(0.0, 1.0, np.array([5.0, 5.0, 5.0]))

    def test_rejects_bad_bounds(self):
        with pytest.raises(ValidationError):
            GridDistribution(1.0, 0.0, np.array([1.0, 1.0]))

    def test_rejects_single_point(self):
        with pytest.raises(ValidationError):
            GridDistribution(0.0, 1.0, np.array([1.0]))

    def test_from_unnormalized_normalizes(self):
        d = GridDistribution.from_unnormalized(0.0, 2.0, np.array([3.0, 3.0, 3.0]))
        assert np.trapezoid(d.density, d.x) == pytest.approx(1.0, abs=1e-12)

    def test_density_is_immutable(self, std_normal):
        with pytest.raises(ValueError):
            std_normal.density[0] = 5.0


class TestMoments:
    def test_normal_moments(self):
        d = normal_grid(3.0, 0.5)
        assert d.mean() == pytest.approx(3.0, abs=1e-9)
        assert d.std() == pytest.approx(0.5, rel=1e-6)

    def test_uniform_moments(self, uniform_01):
        assert uniform_01.mean() == pytest.approx(0.5, abs=1e-12)
        assert uniform_01.variance() == pytest.approx(1.0 / 12.0, rel=1e-5)


class TestQuantiles:
    def test_standard_normal_p95(self, std_normal):
        assert std_normal.quantile(0.95) == pytest.approx(1.6448536269514722, abs=1e-3)

    def test_median_of_symmetric(self, std_normal):
        assert std_normal.quantile(0.5) == pytest.approx(0.0, abs=1e-9)

    def test_out_of_range(self, std_normal):
        with pytest.raises(QuantileOutOfRangeError):
            std_normal.quantile(1.5)

    def test_vectorized_matches_scalar(self, std_normal):
        qs = np.array([0.1, 0.5, 0.9])
        vec = std_normal.quantile(qs)
        assert vec == pytest.approx([std_normal.quantile(q) for q in qs])

    @given(q1=st.floats(0.0, 1.0), q2=st.floats(0.0, 1.0))
    @settings(max_examples=50, deadline=None)
    def test_monotone(self, q1, q2):
        d = normal_grid(2.0, 1.5, n_points=512)
        lo, hi = sorted((q1, q2))
        assert d.quantile(lo) <= d.quantile(hi) + 1e-12

    def test_quantile_skips_zero_mass_plateau(self):
        # two separated spikes: quantiles never land inside the dead zone
        density = np.zeros(101)
        density[10] = 1.0
        density[90] = 1.0
        d = GridDistribution.from_unnormalized(0.0, 1.0, density)
        assert d.quantile(0.25) == pytest.approx(0.10, abs=0.02)
        assert d.quantile(0.75) == pytest.approx(0.90, abs=0.02)


class TestCdf:
    def test_prob_exceed_at_x_min_is_one(self, std_normal):
        assert std_normal.prob_exceed(std_normal.x_min) == pytest.approx(1.0, abs=1e-9)

    def test_prob_exceed_at_x_max_is_zero(self, std_normal):
        assert std_normal.prob_exceed(std_normal.x_max) == pytest.approx(0.0, abs=1e-9)

    def test_cdf_at_median(self, std_normal):
        assert std_normal.cdf(0.0) == pytest.approx(0.5, abs=1e-6)


class TestTruncation:
    def test_truncated_renormalizes(self, std_normal):
        d = std_normal.truncated(lo=0.0)
        assert d.x_min == 0.0
        assert np.trapezoid(d.density, d.x) == pytest.approx(1.0, abs=1e-9)
        # half-normal mean = sigma * sqrt(2/pi)
        assert d.mean() == pytest.approx(np.sqrt(2.0 / np.pi), rel=1e-3)

    def test_noop_truncation_returns_self(self, std_normal):
        assert std_normal.truncated(lo=std_normal.x_min - 5) is std_normal


class TestSerialization:
    def test_csv_round_trip(self, std_normal):
        text = std_normal.to_csv_text()
        back = GridDistribution.from_csv_text(text)
        assert back.x_min == std_normal.x_min
        assert back.x_max == std_normal.x_max
        assert np.array_equal(back.density, std_normal.density)

    def test_json_round_trip(self, std_normal):
        back = GridDistribution.from_json_dict(std_normal.to_json_dict())
        assert np.array_equal(back.density, std_normal.density)

    def test_csv_header(self, std_normal):
        assert std_normal.to_csv_text().splitlines()[0] == "x,density"


class TestPointMass:
    def test_stats(self):
        p = PointMass(2.5)
        assert p.mean() == 2.5
        assert p.variance() == 0.0
        assert p.quantile(0.95) == 2.5
        assert p.prob_exceed(2.0) == 1.0
        assert p.prob_exceed(3.0) == 0.0

    def test_ppf_exact(self):
        p = PointMass(0.3)
        assert np.all(p.ppf(np.linspace(0, 1, 11)) == 0.3)

    def test_to_grid_concentrates(self):
        g = PointMass(7.0).to_grid(512)
        assert g.mean() == pytest.approx(7.0, rel=1e-8)
        assert g.std() < 1e-6


class TestGridFromSamples:
    def test_preserves_moments(self):
        rng = np.random.default_rng(42)
        values = rng.normal(5.0, 2.0, size=200_000)
        d = grid_from_samples(values, 2048)
        assert d.mean() == pytest.approx(values.mean(), abs=0.01)
        assert d.std() == pytest.approx(values.std(), rel=0.01)

    def test_degenerate_sample(self):
        d = grid_from_samples(np.full(100, 3.0), 256)
        assert d.mean() == pytest.approx(3.0, rel=1e-8)

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            grid_from_samples(np.array([]))
