import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frontier_dynamics import errors
from frontier_dynamics.market_data import AssetMoments
from frontier_dynamics.mean_variance import (
    PortfolioWeights,
    portfolio_mean,
    portfolio_stddev,
    two_asset_frontier,
)


def moments_2(mu1, mu2, s1, s2, rho):
    cov = rho * s1 * s2
    return AssetMoments(
        np.array([mu1, mu2]),
        np.array([[s1 * s1, cov], [cov, s2 * s2]]),
    )


BASE = moments_2(0.10, 0.15, 0.2, 0.3, 0.0)


class TestPortfolioMean:
    def test_corner(self):
        assert portfolio_mean(PortfolioWeights([1.0, 0.0]), BASE) == pytest.approx(0.10)

    def test_mix(self):
        assert portfolio_mean(PortfolioWeights([0.5, 0.5]), BASE) == pytest.approx(0.125)

    def test_zero_portfolio(self):
        assert portfolio_mean(PortfolioWeights([0.0, 0.0]), BASE) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(errors.DimensionMismatch):
            portfolio_mean(PortfolioWeights([1.0, 0.0, 0.0]), BASE)


class TestPortfolioStddev:
    def test_uncorrelated_mix(self):
        # 0.25 * 0.04 + 0.25 * 0.09 = 0.0325
        got = portfolio_stddev(PortfolioWeights([0.5, 0.5]), BASE)
        assert got == pytest.approx(np.sqrt(0.0325), abs=1e-12)
        assert got == pytest.approx(0.18028, abs=1e-5)

    def test_perfectly_correlated_equal_vols(self):
        m = moments_2(0.1, 0.1, 0.2, 0.2, 1.0)
        for w1 in (0.0, 0.25, 0.7, 1.0):
            got = portfolio_stddev(PortfolioWeights([w1, 1 - w1]), m)
            assert got == pytest.approx(0.2, abs=1e-12)

    def test_single_asset_corner(self):
        assert portfolio_stddev(PortfolioWeights([1.0, 0.0]), BASE) == pytest.approx(
            0.2, abs=1e-15
        )

    def test_perfect_hedge(self):
        # rho = -1 with w1 s1 = w2 s2 cancels all risk; binary-exact inputs
        # so the cancellation is exact in doubles too
        m = moments_2(0.1, 0.12, 0.25, 0.5, -1.0)
        w = PortfolioWeights([0.5, 0.25])  # 0.5*0.25 == 0.25*0.5
        assert portfolio_stddev(w, m) < 1e-12

    @settings(max_examples=60, deadline=None)
    @given(
        c=st.floats(-5, 5, allow_nan=False),
        w1=st.floats(-2, 2, allow_nan=False),
        w2=st.floats(-2, 2, allow_nan=False),
    )
    def test_absolute_homogeneity(self, c, w1, w2):
        w = PortfolioWeights([w1, w2])
        cw = PortfolioWeights([c * w1, c * w2])
        assert portfolio_stddev(cw, BASE) == pytest.approx(
            abs(c) * portfolio_stddev(w, BASE), abs=1e-12
        )


class TestTwoAssetFrontier:
    def test_analytic_minimum_weight(self):
        res = two_asset_frontier(BASE, 11)
        assert res.w1_min_variance == pytest.approx(0.09 / 0.13, abs=1e-12)
        assert res.w1_min_variance == pytest.approx(0.69231, abs=1e-5)
        w_star = PortfolioWeights([res.w1_min_variance, 1 - res.w1_min_variance])
        assert portfolio_stddev(w_star, BASE) == pytest.approx(0.16641, abs=1e-5)

    def test_grid_oracle_confirms_minimum(self):
        # brute-force sweep is the independent check on the closed form
        res = two_asset_frontier(BASE, 11)
        grid = np.linspace(0.0, 1.0, 10_001)
        variances = [
            float(np.array([w1, 1 - w1]) @ BASE.sigma @ np.array([w1, 1 - w1]))
            for w1 in grid
        ]
        best = grid[int(np.argmin(variances))]
        assert abs(best - res.w1_min_variance) < 1e-4
        sigma_min = portfolio_stddev(
            PortfolioWeights([res.w1_min_variance, 1 - res.w1_min_variance]), BASE
        )
        assert min(np.sqrt(np.array(variances))) >= sigma_min - 1e-9

    def test_sweep_endpoints_are_assets(self):
        res = two_asset_frontier(BASE, 21)
        first, last = res.points[-1], res.points[0]  # w1=1 is last in sweep
        assert (first.mu_p, first.sigma_p) == (pytest.approx(0.10), pytest.approx(0.2))
        assert (last.mu_p, last.sigma_p) == (pytest.approx(0.15), pytest.approx(0.3))

    def test_sweep_minimum_respects_analytic(self):
        res = two_asset_frontier(BASE, 501)
        sweep_min = min(p.sigma_p for p in res.points)
        w_star = PortfolioWeights([res.w1_min_variance, 1 - res.w1_min_variance])
        assert sweep_min >= portfolio_stddev(w_star, BASE) - 1e-9

    def test_degenerate_frontier_is_segment(self):
        m = moments_2(0.1, 0.15, 0.2, 0.3, 1.0)
        res = two_asset_frontier(m, 41)
        # all (sigma, mu) points collinear: mu is affine in sigma
        sig = np.array([p.sigma_p for p in res.points])
        mu = np.array([p.mu_p for p in res.points])
        slope = (mu[-1] - mu[0]) / (sig[-1] - sig[0])
        np.testing.assert_allclose(mu, mu[0] + slope * (sig - sig[0]), atol=1e-10)

    def test_point_reproducibility(self):
        res = two_asset_frontier(BASE, 17)
        for p in res.points:
            assert p.mu_p == pytest.approx(portfolio_mean(p.weights, BASE), abs=1e-10)
            assert p.sigma_p == pytest.approx(
                portfolio_stddev(p.weights, BASE), abs=1e-10
            )

    def test_not_two_assets(self):
        m = AssetMoments(np.zeros(3), np.eye(3) * 0.01)
        with pytest.raises(errors.NotTwoAssets):
            two_asset_frontier(m, 5)
