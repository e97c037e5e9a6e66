import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fabcarbon import (
    GridDistribution,
    PointMass,
    auto_out_grid,
    propagate_grid,
    propagate_mc,
    summarize,
)
from fabcarbon.errors import (
    DivisionSupportIncludesZeroError,
    DivisorSupportNonPositiveError,
    OutGridTooNarrowError,
    UnboundInputError,
)
from fabcarbon.propagate import Const, Div, ExpNegMul, Input, PropagationExpr, Scale

from conftest import normal_grid

Z95 = 1.6448536269514722


def expr_of(root, **inputs):
    return PropagationExpr(root=root, inputs=inputs)


class TestValidation:
    def test_unbound_input(self):
        expr = expr_of(Input("X") + Input("Y"), X=PointMass(1.0))
        with pytest.raises(UnboundInputError, match="Y"):
            propagate_mc(expr, n=10, seed=0)

    def test_division_by_zero_support_rejected_at_validation(self, std_normal):
        expr = expr_of(Div(Const(1.0), Input("X")), X=std_normal)
        with pytest.raises(DivisionSupportIncludesZeroError):
            expr.validate()

    def test_strictly_positive_divisor_accepted(self):
        expr = expr_of(Div(Const(1.0), Input("X")), X=normal_grid(10.0, 0.5, span=4.0))
        expr.validate()

    def test_scipy_frozen_distribution_as_source(self):
        scipy_stats = pytest.importorskip("scipy.stats")
        src = scipy_stats.norm(3.0, 0.1)
        expr = expr_of(Input("X") + Const(1.0), X=src)
        out = propagate_mc(expr, n=50_000, seed=5)
        assert out.values.mean() == pytest.approx(4.0, abs=0.01)


class TestSharingSemantics:
    def test_same_name_shares_draw(self, std_normal):
        # X*X is chi-square(1): mean 1, not the product of independent copies
        expr = expr_of(Input("X") * Input("X"), X=std_normal)
        out = propagate_mc(expr, n=400_000, seed=1)
        assert out.values.mean() == pytest.approx(1.0, abs=0.02)
        assert np.all(out.values >= 0.0)

    def test_x_minus_x_is_exactly_zero(self, std_normal):
        expr = expr_of(Input("X") - Input("X"), X=std_normal)
        out = propagate_mc(expr, n=100_000, seed=2)
        assert np.all(out.values == 0.0)

    def test_distinct_names_are_independent(self, std_normal):
        expr = expr_of(Input("X") * Input("Y"), X=std_normal, Y=std_normal)
        out = propagate_mc(expr, n=400_000, seed=3)
        assert out.values.mean() == pytest.approx(0.0, abs=0.01)

    def test_adding_input_does_not_perturb_existing_streams(self, std_normal):
        only_x = propagate_mc(expr_of(Input("X"), X=std_normal), n=10_000, seed=4)
        with_y = propagate_mc(
            expr_of(Input("X") + Scale(Input("Y"), 0.0), X=std_normal, Y=std_normal),
            n=10_000,
            seed=4,
        )
        assert np.array_equal(only_x.values, with_y.values)


class TestIndependentSum:
    def test_normal_sum_moments(self):
        x = normal_grid(1.0, 0.2)
        y = normal_grid(2.0, 0.3)
        out = propagate_mc(expr_of(Input("X") + Input("Y"), X=x, Y=y), n=10**6, seed=11)
        s = summarize(out, quantiles=[0.95])
        assert s.mean == pytest.approx(3.0, abs=0.005)
        assert s.std == pytest.approx(np.sqrt(0.13), abs=0.005)


class TestYieldKernel:
    def test_degenerate_poisson_yield(self):
        expr = expr_of(ExpNegMul(Input("D"), Const(1.0)), D=PointMass(0.1))
        out = propagate_mc(expr, n=1000, seed=6)
        assert np.all(out.values == np.exp(-0.1))

    def test_exp_neg_mul_support(self):
        expr = expr_of(ExpNegMul(Input("D"), Const(2.0)), D=PointMass(0.5))
        lo, hi = expr.root.support({"D": (0.5, 0.5)})
        assert lo == pytest.approx(np.exp(-1.0))
        assert hi == pytest.approx(np.exp(-1.0))


class TestDeterminism:
    def test_worker_count_does_not_change_results(self, std_normal):
        expr = expr_of(Input("X") * Input("Y") + Input("X"), X=std_normal, Y=std_normal)
        seq = propagate_mc(expr, n=300_001, seed=12, workers=1)
        par = propagate_mc(expr, n=300_001, seed=12, workers=4)
        assert np.array_equal(seq.values, par.values)

    def test_rerun_is_bit_identical(self, std_normal):
        expr = expr_of(Scale(Input("X"), 2.0), X=std_normal)
        a = propagate_mc(expr, n=50_000, seed=13)
        b = propagate_mc(expr, n=50_000, seed=13)
        assert np.array_equal(a.values, b.values)


class TestGridOracle:
    def test_add_two_standard_normals(self, std_normal):
        out = propagate_grid("add", std_normal, std_normal, auto_out_grid("add", std_normal, std_normal))
        assert out.mean() == pytest.approx(0.0, abs=1e-3)
        assert out.variance() == pytest.approx(2.0, abs=0.01)

    def test_degenerate_product(self):
        a = PointMass(2.0).to_grid(512)
        b = PointMass(3.0).to_grid(512)
        out = propagate_grid("multiply", a, b, (5.5, 6.5, 2001))
        assert out.mean() == pytest.approx(6.0, rel=1e-6)
        assert out.std() < 1e-3

    def test_commutativity(self):
        a = normal_grid(1.0, 0.2, n_points=1024)
        b = normal_grid(2.0, 0.3, n_points=1024)
        grid = auto_out_grid("add", a, b, 2048)
        ab = propagate_grid("add", a, b, grid)
        ba = propagate_grid("add", b, a, grid)
        assert np.max(np.abs(ab.density - ba.density)) < 1e-9

    def test_division_support_guard(self, std_normal):
        with pytest.raises(DivisorSupportNonPositiveError):
            propagate_grid("divide", std_normal, std_normal, (-10, 10, 128))

    def test_out_grid_too_narrow(self):
        a = normal_grid(1.0, 0.2, n_points=512)
        b = normal_grid(2.0, 0.3, n_points=512)
        with pytest.raises(OutGridTooNarrowError):
            propagate_grid("add", a, b, (2.9, 3.1, 128))

    def test_divide_matches_analytic(self):
        num = normal_grid(4.0, 0.1, n_points=2048)
        den = normal_grid(2.0, 0.05, n_points=2048)
        out = propagate_grid("divide", num, den, auto_out_grid("divide", num, den, 2048))
        # first-order delta method for a ratio of tight normals
        assert out.mean() == pytest.approx(2.0, rel=1e-3)
        expected_std = 2.0 * np.sqrt((0.1 / 4.0) ** 2 + (0.05 / 2.0) ** 2)
        assert out.std() == pytest.approx(expected_std, rel=0.02)


class TestCrossOracle:
    @pytest.mark.parametrize("op,mc_root", [
        ("add", lambda x, y: x + y),
        ("multiply", lambda x, y: x * y),
    ])
    def test_mc_matches_grid(self, op, mc_root):
        x = normal_grid(1.0, 0.2)
        y = normal_grid(2.0, 0.3)
        grid_result = propagate_grid(op, x, y, auto_out_grid(op, x, y, 4096))
        mc = propagate_mc(expr_of(mc_root(Input("X"), Input("Y")), X=x, Y=y), n=10**6, seed=21)
        s = summarize(mc, quantiles=[0.95])
        assert s.mean == pytest.approx(grid_result.mean(), rel=0.01)
        assert s.std == pytest.approx(grid_result.std(), rel=0.01)
        assert s.percentiles[0.95] == pytest.approx(float(grid_result.quantile(0.95)), rel=0.01)


class TestSupportArithmetic:
    @given(
        a_lo=st.floats(-5, 5), a_w=st.floats(0.01, 5),
        b_lo=st.floats(0.5, 5), b_w=st.floats(0.01, 5),
    )
    @settings(max_examples=50, deadline=None)
    def test_division_interval_contains_samples(self, a_lo, a_w, b_lo, b_w):
        num = (a_lo, a_lo + a_w)
        den = (b_lo, b_lo + b_w)
        root = Div(Input("A"), Input("B"))
        lo, hi = root.support({"A": num, "B": den})
        corners = [x / y for x in num for y in den]
        assert lo == pytest.approx(min(corners))
        assert hi == pytest.approx(max(corners))
