import numpy as np
import pytest

from frontier_dynamics import errors
from frontier_dynamics.market_data import AssetMoments
from frontier_dynamics.mean_variance import PortfolioWeights, portfolio_stddev
from frontier_dynamics.frontier import (
    ConstraintSet,
    corner_portfolios,
    dollar_neutral_optimize,
    efficient_frontier,
    frontier_with_turnover,
    grid_oracle,
    max_sharpe_portfolio,
    min_variance_for_target_return,
    optimize_130_30,
    tangency_portfolio,
)

# three uncorrelated assets; closed forms are easy to derive by hand
MU3 = np.array([0.10, 0.15, 0.12])
SIG3 = np.diag([0.04, 0.09, 0.0625])
M3 = AssetMoments(MU3, SIG3)

M2 = AssetMoments(np.array([0.10, 0.15]), np.diag([0.04, 0.09]))

# rho = 0.5 with vols (0.1, 0.3): the minimum-variance mix clamps to asset 1,
# so the long-only frontier spans the two single-asset portfolios
M2_CLAMPED = AssetMoments(
    np.array([0.10, 0.15]),
    np.array([[0.01, 0.015], [0.015, 0.09]]),
)


def closed_form_gmv(sigma):
    inv1 = np.linalg.solve(sigma, np.ones(sigma.shape[0]))
    w = inv1 / inv1.sum()
    return w, 1.0 / np.sqrt(inv1.sum())


class TestMinVarianceForTarget:
    def test_closed_form_gmv(self):
        w_star, sigma_star = closed_form_gmv(SIG3)
        t = float(MU3 @ w_star)
        pt = min_variance_for_target_return(M3, t, ConstraintSet(budget=1.0))
        np.testing.assert_allclose(
            pt.weights.weights, [0.4797, 0.2132, 0.3070], atol=1e-4
        )
        np.testing.assert_allclose(pt.weights.weights, w_star, atol=1e-10)
        assert pt.sigma_p == pytest.approx(sigma_star, abs=1e-10)
        assert pt.sigma_p == pytest.approx(0.13853, abs=1e-5)

    def test_single_asset_forced(self):
        m1 = AssetMoments(np.array([0.07]), np.array([[0.0225]]))
        pt = min_variance_for_target_return(m1, 0.07, ConstraintSet.long_only())
        assert pt.weights.weights[0] == pytest.approx(1.0, abs=1e-10)
        assert pt.sigma_p == pytest.approx(0.15, abs=1e-10)

    def test_target_above_range_infeasible(self):
        with pytest.raises(errors.Infeasible):
            min_variance_for_target_return(M2, 0.20, ConstraintSet.long_only())

    def test_grid_oracle_agreement_at_gmv(self):
        # interior optimum: the 0.005 lattice sits within half a step per
        # coordinate, so the sigma gap is ~ 0.5 * lmax * (step/2)^2 / sigma,
        # about 2e-6 here
        w_star, _ = closed_form_gmv(SIG3)
        t = float(MU3 @ w_star)
        pt = min_variance_for_target_return(M3, t, ConstraintSet.long_only())
        oracle = grid_oracle(M3, ConstraintSet.long_only(), t, 0.005)
        assert pt.sigma_p <= oracle.sigma_p
        assert oracle.sigma_p - pt.sigma_p < 2.5e-6


class TestEfficientFrontier:
    def test_clamped_two_asset_endpoints(self):
        pts = efficient_frontier(M2_CLAMPED, ConstraintSet.long_only(), 7)
        np.testing.assert_allclose(pts[0].weights.weights, [1, 0], atol=1e-9)
        np.testing.assert_allclose(pts[-1].weights.weights, [0, 1], atol=1e-9)
        assert pts[0].mu_p == pytest.approx(0.10, abs=1e-10)
        assert pts[0].sigma_p == pytest.approx(0.1, abs=1e-9)
        assert pts[-1].sigma_p == pytest.approx(0.3, abs=1e-9)

    def test_sigma_non_decreasing(self):
        pts = efficient_frontier(M3, ConstraintSet.long_only(), 25)
        sig = [p.sigma_p for p in pts]
        assert all(sig[i + 1] >= sig[i] - 1e-10 for i in range(len(sig) - 1))

    def test_sorted_by_return(self):
        pts = efficient_frontier(M3, ConstraintSet.long_only(), 25)
        mus = [p.mu_p for p in pts]
        assert mus == sorted(mus)

    def test_concavity_in_sigma_mu(self):
        pts = efficient_frontier(M3, ConstraintSet.long_only(), 25)
        for a, b, c in zip(pts, pts[1:], pts[2:]):
            if c.sigma_p - a.sigma_p < 1e-12:
                continue
            chord = a.mu_p + (b.sigma_p - a.sigma_p) / (c.sigma_p - a.sigma_p) * (
                c.mu_p - a.mu_p
            )
            assert b.mu_p >= chord - 1e-8

    def test_unbounded_raises(self):
        with pytest.raises(errors.NumericalFailure):
            efficient_frontier(M2, ConstraintSet(budget=1.0), 5)

    def test_points_reproducible_from_weights(self):
        pts = efficient_frontier(M3, ConstraintSet.long_only(), 9)
        for p in pts:
            assert p.sigma_p == pytest.approx(
                portfolio_stddev(p.weights, M3), abs=1e-10
            )


class TestCornerPortfolios:
    def test_two_asset_corners_are_assets(self):
        corners = corner_portfolios(M2_CLAMPED, ConstraintSet.long_only())
        ws = [tuple(np.round(c.weights.weights, 8)) for c in corners]
        assert (1.0, 0.0) in ws
        assert (0.0, 1.0) in ws

    def test_three_asset_interior_corner_drops_asset(self):
        corners = corner_portfolios(M3, ConstraintSet.long_only())
        assert len(corners) >= 3
        dropped = [
            c for c in corners
            if "lb[asset1]" in c.active_set and abs(c.weights.weights[0]) < 1e-8
        ]
        assert dropped, "expected a corner where asset1 leaves the portfolio"

    def test_active_set_changes_between_corners(self):
        corners = corner_portfolios(M3, ConstraintSet.long_only())
        for a, b in zip(corners, corners[1:]):
            assert set(a.active_set) != set(b.active_set)

    def test_midpoint_reconstruction(self):
        corners = corner_portfolios(M3, ConstraintSet.long_only())
        for a, b in zip(corners, corners[1:]):
            t_mid = 0.5 * (a.mu_p + b.mu_p)
            direct = min_variance_for_target_return(
                M3, t_mid, ConstraintSet.long_only()
            )
            combo = 0.5 * (a.weights.weights + b.weights.weights)
            np.testing.assert_allclose(direct.weights.weights, combo, atol=1e-8)

    def test_ordered_by_return(self):
        corners = corner_portfolios(M3, ConstraintSet.long_only())
        mus = [c.mu_p for c in corners]
        assert mus == sorted(mus)


class TestTangency:
    def test_closed_form_unbounded(self):
        res = tangency_portfolio(M2, ConstraintSet(budget=1.0), 0.02)
        # inv(sigma)(mu - rf 1) = (2, 1.4444...), normalized
        unnorm = np.array([0.08 / 0.04, 0.13 / 0.09])
        expected = unnorm / unnorm.sum()
        np.testing.assert_allclose(res.weights.weights, expected, atol=1e-10)
        np.testing.assert_allclose(res.weights.weights, [0.5806, 0.4194], atol=1e-4)
        assert res.mu_p == pytest.approx(0.12097, abs=1e-5)
        assert res.sigma_p == pytest.approx(0.17122, abs=1e-5)
        assert res.sharpe == pytest.approx(0.590, abs=5e-4)

    def test_single_asset(self):
        m1 = AssetMoments(np.array([0.08]), np.array([[0.04]]))
        res = tangency_portfolio(m1, ConstraintSet.long_only(), 0.02)
        assert res.weights.weights[0] == pytest.approx(1.0, abs=1e-9)
        assert res.sharpe == pytest.approx(0.06 / 0.2, abs=1e-9)

    def test_no_excess_return(self):
        with pytest.raises(errors.NoExcessReturn):
            tangency_portfolio(M2, ConstraintSet.long_only(), 0.20)

    def test_sharpe_is_max_over_frontier(self):
        res = tangency_portfolio(M3, ConstraintSet.long_only(), 0.02)
        for p in efficient_frontier(M3, ConstraintSet.long_only(), 41):
            if p.sigma_p > 0:
                assert (p.mu_p - 0.02) / p.sigma_p <= res.sharpe + 1e-9


class TestMaxSharpe:
    @pytest.mark.parametrize(
        "moments,cset",
        [
            (M2, ConstraintSet(budget=1.0)),
            (M2, ConstraintSet.long_only()),
            (M3, ConstraintSet.long_only()),
            (M3, ConstraintSet.one_thirty_thirty(0.3)),
        ],
    )
    def test_agrees_with_tangency(self, moments, cset):
        a = tangency_portfolio(moments, cset, 0.02)
        b = max_sharpe_portfolio(moments, cset, 0.02)
        np.testing.assert_allclose(
            a.weights.weights, b.weights.weights, atol=1e-8
        )

    def test_local_maximum_probe(self):
        res = max_sharpe_portfolio(M3, ConstraintSet.long_only(), 0.02)
        for dt in (-0.01, 0.01):
            t = res.mu_p + dt * (0.15 - 0.10)
            pt = min_variance_for_target_return(M3, t, ConstraintSet.long_only())
            assert (pt.mu_p - 0.02) / pt.sigma_p < res.sharpe

    def test_degenerate_tie_still_valid(self):
        # identical assets: every feasible mix has the same Sharpe ratio
        m = AssetMoments(np.array([0.08, 0.08]), 0.04 * np.ones((2, 2)) + np.diag([0, 0]))
        res = max_sharpe_portfolio(m, ConstraintSet.long_only(), 0.02)
        assert res.weights.weights.sum() == pytest.approx(1.0, abs=1e-9)
        assert res.sharpe == pytest.approx(0.06 / 0.2, abs=1e-9)


class TestTurnover:
    REF = np.array([1 / 3, 1 / 3, 1 / 3])

    def test_zero_cap_collapses_to_reference(self):
        c = ConstraintSet.with_turnover(self.REF, 0.0)
        pts = frontier_with_turnover(M3, c, 11)
        assert len(pts) == 1
        np.testing.assert_allclose(pts[0].weights.weights, self.REF, atol=1e-9)

    def test_slack_cap_matches_unconstrained(self):
        c = ConstraintSet.with_turnover(self.REF, 1.0)
        a = frontier_with_turnover(M3, c, 9)
        b = efficient_frontier(M3, ConstraintSet.long_only(), 9)
        assert len(a) == len(b)
        for x, y in zip(a, b):
            np.testing.assert_allclose(x.weights.weights, y.weights.weights, atol=1e-8)

    def test_cap_is_respected_and_costs_risk(self):
        c = ConstraintSet.with_turnover(self.REF, 0.1)
        pts = frontier_with_turnover(M3, c, 9)
        free = ConstraintSet.long_only()
        for p in pts:
            dist = 0.5 * np.sum(np.abs(p.weights.weights - self.REF))
            assert dist <= 0.1 + 1e-10
            base = min_variance_for_target_return(M3, p.mu_p, free)
            assert p.sigma_p >= base.sigma_p - 1e-10

    def test_infeasible_reference(self):
        c = ConstraintSet.with_turnover(np.array([0.5, 0.5, -0.0001]), 0.1)
        with pytest.raises(errors.Infeasible):
            frontier_with_turnover(M3, c, 5)


class TestDollarNeutral:
    def test_max_return_corner(self):
        pt = dollar_neutral_optimize(M2, ConstraintSet.dollar_neutral(1.0))
        np.testing.assert_allclose(pt.weights.weights, [-0.5, 0.5], atol=1e-10)
        assert pt.mu_p == pytest.approx(0.025, abs=1e-10)
        assert abs(pt.weights.weights.sum()) <= 1e-10

    def test_identical_returns_no_spread(self):
        m = AssetMoments(np.array([0.08, 0.08]), np.diag([0.04, 0.09]))
        pt = dollar_neutral_optimize(m, ConstraintSet.dollar_neutral(1.0))
        assert pt.mu_p == pytest.approx(0.0, abs=1e-10)

    def test_zero_gross_cap(self):
        pt = dollar_neutral_optimize(M2, ConstraintSet.dollar_neutral(0.0))
        np.testing.assert_allclose(pt.weights.weights, [0.0, 0.0], atol=1e-10)

    def test_target_mode_and_caps(self):
        pt = dollar_neutral_optimize(M2, ConstraintSet.dollar_neutral(1.0), target_mu=0.01)
        assert pt.mu_p == pytest.approx(0.01, abs=1e-10)
        assert abs(pt.weights.weights.sum()) <= 1e-10
        assert np.sum(np.abs(pt.weights.weights)) <= 1.0 + 1e-10


class Test130_30:
    def test_max_return_corner(self):
        pt = optimize_130_30(M2, ConstraintSet.one_thirty_thirty(0.3))
        np.testing.assert_allclose(pt.weights.weights, [-0.3, 1.3], atol=1e-10)
        assert pt.mu_p == pytest.approx(0.165, abs=1e-10)

    def test_dominates_long_only(self):
        lo = ConstraintSet.long_only()
        ls = ConstraintSet.one_thirty_thirty(0.3)
        lo_pts = efficient_frontier(M3, lo, 9)
        for p in lo_pts:
            relaxed = min_variance_for_target_return(M3, p.mu_p, ls)
            assert relaxed.sigma_p <= p.sigma_p + 1e-10

    def test_zero_short_cap_reduces_to_long_only(self):
        t = 0.13
        a = min_variance_for_target_return(M3, t, ConstraintSet.one_thirty_thirty(0.0))
        b = min_variance_for_target_return(M3, t, ConstraintSet.long_only())
        np.testing.assert_allclose(a.weights.weights, b.weights.weights, atol=1e-8)

    def test_short_side_capped(self):
        pt = optimize_130_30(M3, ConstraintSet.one_thirty_thirty(0.3))
        shorts = np.sum(np.maximum(-pt.weights.weights, 0.0))
        longs = np.sum(np.maximum(pt.weights.weights, 0.0))
        assert shorts <= 0.3 + 1e-10
        assert longs <= 1.3 + 1e-10
        assert pt.weights.weights.sum() == pytest.approx(1.0, abs=1e-10)


class TestGridOracle:
    def test_single_asset(self):
        m1 = AssetMoments(np.array([0.07]), np.array([[0.0225]]))
        pt = grid_oracle(m1, ConstraintSet.long_only(), 0.07, 0.01)
        assert pt.weights.weights[0] == pytest.approx(1.0)

    def test_infeasible_target(self):
        with pytest.raises(errors.Infeasible):
            grid_oracle(M3, ConstraintSet.long_only(), 0.25, 0.01)

    def test_too_many_assets(self):
        m5 = AssetMoments(np.zeros(5), np.eye(5) * 0.01)
        with pytest.raises(errors.TooManyAssets):
            grid_oracle(m5, ConstraintSet.long_only(), 0.0, 0.01)

    def test_oracle_never_beats_solver_beyond_resolution(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            a = rng.normal(size=(3, 3))
            sigma = a @ a.T / 10 + np.diag(rng.uniform(0.01, 0.05, 3))
            mu = rng.uniform(0.02, 0.15, 3)
            m = AssetMoments(mu, sigma)
            t = float(mu @ np.full(3, 1 / 3))
            solver = min_variance_for_target_return(m, t, ConstraintSet.long_only())
            oracle = grid_oracle(m, ConstraintSet.long_only(), t, 0.01)
            lip = np.sqrt(np.linalg.eigvalsh(sigma)[-1])
            assert solver.sigma_p <= oracle.sigma_p + 2 * 0.01 * lip


class TestInvariants:
    def test_monotone_dominance_tightening(self):
        t = 0.125
        base = min_variance_for_target_return(M3, t, ConstraintSet.long_only())
        for tau in (0.5, 0.2, 0.1, 0.05):
            c = ConstraintSet.with_turnover(np.array([1 / 3, 1 / 3, 1 / 3]), tau)
            pt = min_variance_for_target_return(M3, t, c)
            assert pt.sigma_p >= base.sigma_p - 1e-10
        sig_prev = -np.inf
        for tau in (0.5, 0.2, 0.1, 0.05):
            c = ConstraintSet.with_turnover(np.array([1 / 3, 1 / 3, 1 / 3]), tau)
            pt = min_variance_for_target_return(M3, t, c)
            assert pt.sigma_p >= sig_prev - 1e-12
            sig_prev = pt.sigma_p

    def test_monotone_dominance_gross_and_short(self):
        sig_prev = -np.inf
        for g in (1.0, 0.5, 0.3):
            pt = dollar_neutral_optimize(
                M3, ConstraintSet.dollar_neutral(g), target_mu=0.004
            )
            assert pt.sigma_p >= sig_prev - 1e-12
            sig_prev = pt.sigma_p
        sig_prev = -np.inf
        for s in (0.3, 0.1, 0.0):
            pt = min_variance_for_target_return(
                M3, 0.13, ConstraintSet.one_thirty_thirty(s)
            )
            assert pt.sigma_p >= sig_prev - 1e-12
            sig_prev = pt.sigma_p

    def test_monotone_dominance_tighter_bounds(self):
        sig_prev = -np.inf
        for ub in (1.0, 0.6, 0.45):
            c = ConstraintSet(lower=0.0, upper=ub)
            pt = min_variance_for_target_return(M3, 0.125, c)
            assert pt.sigma_p >= sig_prev - 1e-12
            sig_prev = pt.sigma_p

    def test_tangent_line_dominates_frontier(self):
        r_f = 0.02
        res = tangency_portfolio(M3, ConstraintSet.long_only(), r_f)
        for p in efficient_frontier(M3, ConstraintSet.long_only(), 31):
            line = r_f + res.sharpe * p.sigma_p
            assert p.mu_p <= line + 1e-8

    def test_scale_equivariance(self):
        t = 0.125
        base = min_variance_for_target_return(M3, t, ConstraintSet.long_only())
        for scale in (0.25, 4.0):
            m = AssetMoments(MU3, SIG3 * scale)
            pt = min_variance_for_target_return(m, t, ConstraintSet.long_only())
            np.testing.assert_allclose(
                pt.weights.weights, base.weights.weights, atol=1e-9
            )
            assert pt.sigma_p == pytest.approx(
                base.sigma_p * np.sqrt(scale), abs=1e-10
            )
